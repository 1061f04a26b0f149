# Copyright (C) 2026 The imitator developers
#
# This file is free software; you can redistribute it and/or modify it
# under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.

"""
Pinhole cameras and a deterministic z-buffer software rasterizer.

Camera space is x right, y down, z forward.  Pixel (row i, column j)
has its centre at (j + 0.5, i + 0.5).  Coverage is tested at pixel
centres only (no anti-aliasing) and attributes are interpolated
perspective-correctly.
"""

import json
import logging
import math
from dataclasses import dataclass

import numpy as np

from imitator import configfile, utils
from imitator.body import joint_positions, pose_mesh
from imitator.types import BehindCameraError, ValidationError, \
    check_integer, check_number

log = logging.getLogger(__name__)

# Anything at or closer than this (metres) is behind the camera.
NEAR_PLANE = 1e-4
# Depths closer than this (metres) are ties, won by the lower face index.
DEPTH_TIE = 1e-9


@dataclass(frozen=True)
class Intrinsics:
    """Focal lengths, principal point and image size (pixels)."""

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        """Validate the pinhole parameters."""
        for name in ('fx', 'fy', 'cx', 'cy'):
            check_number(name, getattr(self, name))
        check_integer('width', self.width)
        check_integer('height', self.height)
        if not (self.fx > 0 and self.fy > 0):
            raise ValidationError('focal lengths must be positive')
        if self.width < 1 or self.height < 1:
            raise ValidationError('image size must be at least 1x1')
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise ValidationError('principal point outside the image')

    @classmethod
    def square(cls, size, focal):
        """Return a centred square image of the given size."""
        return cls(focal, focal, size / 2, size / 2, size, size)

    @classmethod
    def from_config(cls):
        """Return the intrinsics configured in the [camera] section."""
        width = configfile.getint('camera', 'width')
        height = configfile.getint('camera', 'height')
        focal = configfile.getfloat('camera', 'focal')
        return cls(focal, focal, width / 2, height / 2, width, height)


@dataclass(frozen=True, eq=False)
class Camera:
    """A pinhole camera with a world-to-camera rigid transform."""

    # pylint: disable=too-many-instance-attributes
    fx: float
    fy: float
    cx: float
    cy: float
    rotation: np.ndarray
    translation: np.ndarray
    width: int
    height: int

    def __post_init__(self):
        """Validate and freeze the extrinsics."""
        Intrinsics(self.fx, self.fy, self.cx, self.cy, self.width,
                   self.height)
        try:
            rot = np.array(self.rotation, dtype=float)
            trans = np.array(self.translation, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f'camera extrinsics: {exc}') from exc
        if rot.shape != (3, 3) or trans.shape != (3,):
            raise ValidationError('camera rotation must be 3x3, '
                                  'translation 3-vector')
        if not np.allclose(rot @ rot.T, np.eye(3), atol=1e-6) or \
           np.linalg.det(rot) < 0:
            raise ValidationError('camera rotation is not a rotation')
        rot.flags.writeable = False
        trans.flags.writeable = False
        object.__setattr__(self, 'rotation', rot)
        object.__setattr__(self, 'translation', trans)

    @classmethod
    def from_intrinsics(cls, intrinsics, rotation, translation):
        """Combine intrinsics with extrinsics."""
        return cls(intrinsics.fx, intrinsics.fy, intrinsics.cx,
                   intrinsics.cy, rotation, translation,
                   intrinsics.width, intrinsics.height)

    @property
    def intrinsics(self):
        """Return the intrinsic part of the camera."""
        return Intrinsics(self.fx, self.fy, self.cx, self.cy,
                          self.width, self.height)

    @property
    def center(self):
        """Return the camera centre in world coordinates."""
        return -self.rotation.T @ self.translation

    def to_dict(self):
        """Return the JSON representation."""
        return {'fx': self.fx, 'fy': self.fy, 'cx': self.cx, 'cy': self.cy,
                'rotation': self.rotation.tolist(),
                'translation': self.translation.tolist(),
                'width': self.width, 'height': self.height}

    @classmethod
    def from_dict(cls, data):
        """Construct from the JSON representation."""
        keys = {'fx', 'fy', 'cx', 'cy', 'rotation', 'translation',
                'width', 'height'}
        if not isinstance(data, dict) or set(data) != keys:
            raise ValidationError(f'camera needs exactly the keys '
                                  f'{sorted(keys)}')
        return cls(**data)

    @classmethod
    def load(cls, path):
        """Read a camera from a JSON file."""
        with open(path, encoding='utf-8') as fileobj:
            return cls.from_dict(json.load(fileobj))


def look_at(eye, target, intrinsics, up=(0.0, 1.0, 0.0)):
    """Return a camera at eye looking at target, world up shown as image up."""
    eye = np.asarray(eye, dtype=float)
    forward = np.asarray(target, dtype=float) - eye
    norm = np.linalg.norm(forward)
    if norm == 0:
        raise ValidationError('eye and target coincide')
    forward /= norm
    right = np.cross(forward, up)
    if np.linalg.norm(right) < 1e-12:
        raise ValidationError('view direction parallel to up vector')
    right /= np.linalg.norm(right)
    down = np.cross(forward, right)
    rotation = np.vstack([right, down, forward])
    return Camera.from_intrinsics(intrinsics, rotation, -rotation @ eye)


def orbit(center, radius, azimuths_deg, intrinsics):
    """Return cameras on a horizontal circle around center.

    Azimuth 0 looks at the front of the body (camera on +z); angles
    increase towards +x.
    """
    if not radius > 0:
        raise ValidationError('orbit radius must be positive')
    center = np.asarray(center, dtype=float)
    cameras = []
    for azimuth in azimuths_deg:
        theta = math.radians(azimuth)
        eye = center + radius * np.array([math.sin(theta), 0.0,
                                          math.cos(theta)])
        cameras.append(look_at(eye, center, intrinsics))
    return cameras


def frame_subject(points, intrinsics, margin=None):
    """Return (center, radius) of an orbit that keeps points in view.

    The bounding sphere of the points, enlarged by margin, must fit the
    narrower field of view from every azimuth.
    """
    if margin is None:
        margin = configfile.getfloat('orbit', 'margin')
    points = np.asarray(points, dtype=float)
    center = 0.5 * (points.min(axis=0) + points.max(axis=0))
    extent = np.linalg.norm(points - center, axis=1).max()
    half_fov = min(math.atan(intrinsics.width / 2 / intrinsics.fx),
                   math.atan(intrinsics.height / 2 / intrinsics.fy))
    radius = margin * extent / math.sin(half_fov)
    return center, max(radius, 1.05 * extent + NEAR_PLANE)


def to_camera(camera, points):
    """Transform world points (N, 3) into camera space."""
    return np.asarray(points, dtype=float) @ camera.rotation.T + \
        camera.translation


def project(camera, point):
    """Project a world point to (pixel x, pixel y, depth).

    >>> cam = Camera(100, 100, 128, 128, np.eye(3), np.zeros(3), 256, 256)
    >>> project(cam, (1, 0, 2))
    (178.0, 128.0, 2.0)
    """
    pcam = to_camera(camera, np.reshape(point, (1, 3)))[0]
    if pcam[2] <= NEAR_PLANE:
        raise BehindCameraError(f'point at depth {pcam[2]} is behind camera')
    return (float(camera.cx + camera.fx * pcam[0] / pcam[2]),
            float(camera.cy + camera.fy * pcam[1] / pcam[2]),
            float(pcam[2]))


def project_points(camera, points_cam):
    """Project camera-space points (N, 3) to pixel coordinates (N, 2).

    No near-plane check is done; callers mask out z <= NEAR_PLANE.
    """
    with np.errstate(divide='ignore', invalid='ignore'):
        xpix = camera.cx + camera.fx * points_cam[:, 0] / points_cam[:, 2]
        ypix = camera.cy + camera.fy * points_cam[:, 1] / points_cam[:, 2]
    return np.stack([xpix, ypix], axis=-1)


@dataclass(frozen=True, eq=False)
class FrameBuffers:
    """Colour, depth, face-id and barycentric buffers of one rasterization."""

    color: np.ndarray
    depth: np.ndarray
    face_id: np.ndarray
    barycentric: np.ndarray

    @property
    def foreground(self):
        """Boolean map of pixels covered by some face."""
        return self.face_id >= 0

    @property
    def shape(self):
        """Return (height, width)."""
        return self.face_id.shape

    def dump(self, prefix):
        """Write depth and face-id as raw little-endian arrays.

        A JSON sidecar prefix.json records file names, shapes and dtypes.
        """
        sidecar = {}
        for name, array, dtype in (('depth', self.depth, '<f8'),
                                   ('face_id', self.face_id, '<i4')):
            filename = f'{prefix}_{name}.raw'
            with utils.atomic_write(filename) as out:
                out.write(array.astype(dtype).tobytes())
            sidecar[name] = {'file': filename.rsplit('/', 1)[-1],
                             'shape': list(array.shape), 'dtype': dtype}
        utils.write_json(f'{prefix}.json', sidecar)


def cover_triangle(corners, width, height):
    """Find the grid cell centres covered by a 2D triangle.

    corners is (3, 2) in continuous grid coordinates where cell (i, j)
    has its centre at (j + 0.5, i + 0.5).  Coverage is inclusive, so a
    centre on a shared edge belongs to both triangles.  Returns rows,
    columns and the (N, 3) barycentric weights of covered centres.
    """
    (x0, y0), (x1, y1), (x2, y2) = corners
    empty = (np.zeros(0, int), np.zeros(0, int), np.zeros((0, 3)))
    area = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
    if area == 0 or not math.isfinite(area):
        return empty
    xs, ys = (x0, x1, x2), (y0, y1, y2)
    jmin = max(math.ceil(min(xs) - 0.5), 0)
    jmax = min(math.floor(max(xs) - 0.5), width - 1)
    imin = max(math.ceil(min(ys) - 0.5), 0)
    imax = min(math.floor(max(ys) - 0.5), height - 1)
    if jmin > jmax or imin > imax:
        return empty
    cols, rows = np.meshgrid(np.arange(jmin, jmax + 1),
                             np.arange(imin, imax + 1))
    cols, rows = cols.ravel(), rows.ravel()
    px, py = cols + 0.5, rows + 0.5
    lam0 = ((x1 - px) * (y2 - py) - (x2 - px) * (y1 - py)) / area
    lam1 = ((x2 - px) * (y0 - py) - (x0 - px) * (y2 - py)) / area
    lam2 = ((x0 - px) * (y1 - py) - (x1 - px) * (y0 - py)) / area
    inside = (lam0 >= 0) & (lam1 >= 0) & (lam2 >= 0)
    bary = np.stack([lam0[inside], lam1[inside], lam2[inside]], axis=-1)
    bary /= bary.sum(axis=1, keepdims=True)
    return rows[inside], cols[inside], bary


def bilinear_taps(xpos, ypos, width, height):
    """Return rows, columns, weights (N, 4) and in-bounds flags of taps.

    Positions are continuous coordinates with cell centres at +0.5.
    Out-of-bounds taps are clamped to the border and flagged.
    """
    gx = np.asarray(xpos, dtype=float) - 0.5
    gy = np.asarray(ypos, dtype=float) - 0.5
    x0, y0 = np.floor(gx), np.floor(gy)
    fx, fy = gx - x0, gy - y0
    x0, y0 = x0.astype(np.int64), y0.astype(np.int64)
    cols = np.stack([x0, x0 + 1, x0, x0 + 1], axis=-1)
    rows = np.stack([y0, y0, y0 + 1, y0 + 1], axis=-1)
    weights = np.stack([(1 - fx) * (1 - fy), fx * (1 - fy),
                        (1 - fx) * fy, fx * fy], axis=-1)
    inside = (cols >= 0) & (cols < width) & (rows >= 0) & (rows < height)
    return (np.clip(rows, 0, height - 1), np.clip(cols, 0, width - 1),
            weights, inside)


def sample_texture(texels, uv, mapped=None):
    """Bilinear texture lookup at atlas coordinates uv (N, 2).

    Texel (i, j) sits at u = (j + 0.5)/R, v = (i + 0.5)/R and borders
    are clamped.  If mapped is given, taps on unmapped texels are
    dropped and the rest renormalised.  Returns float RGB (N, 3).
    """
    res = texels.shape[0]
    uv = np.asarray(uv, dtype=float).reshape(-1, 2)
    rows, cols, weights, _ = bilinear_taps(uv[:, 0] * res, uv[:, 1] * res,
                                           res, res)
    if mapped is not None:
        masked = weights * mapped[rows, cols]
        total = masked.sum(axis=1, keepdims=True)
        weights = np.where(total > 0, masked / np.where(total > 0, total, 1),
                           weights)
    return np.einsum('nk,nkc->nc', weights, texels[rows, cols].astype(float))


# pylint: disable=too-many-arguments,too-many-locals
def rasterize(mesh, camera, texture=None, background=(0, 0, 0),
              mapped=None, cull=True):
    """Rasterize a mesh into FrameBuffers.

    Each pixel shows the nearest front-facing triangle covering its
    centre.  With a texture (anything with a .texels array, or the
    array itself) colours come from a bilinear lookup at the
    perspective-correct UV; otherwise faces are flat shaded.
    """
    width, height = camera.width, camera.height
    depth = np.full((height, width), np.inf)
    face_id = np.full((height, width), -1, dtype=np.int64)
    bary = np.zeros((height, width, 3))

    verts_cam = to_camera(camera, mesh.vertices)
    screen = project_points(camera, verts_cam)
    faces = mesh.faces
    tri_cam = verts_cam[faces]
    in_front = np.all(tri_cam[:, :, 2] > NEAR_PLANE, axis=1)
    normals = np.cross(tri_cam[:, 1] - tri_cam[:, 0],
                       tri_cam[:, 2] - tri_cam[:, 0])
    facing = np.einsum('ij,ij->i', normals, tri_cam[:, 0]) < 0
    candidates = np.flatnonzero(in_front & facing if cull else in_front)

    for face in candidates:
        rows, cols, lam = cover_triangle(screen[faces[face]], width, height)
        if rows.size == 0:
            continue
        inv = lam / tri_cam[face, :, 2]
        total = inv.sum(axis=1)
        zvals = 1 / total
        closer = zvals < depth[rows, cols] - DEPTH_TIE
        rows, cols = rows[closer], cols[closer]
        depth[rows, cols] = zvals[closer]
        face_id[rows, cols] = face
        bary[rows, cols] = inv[closer] / total[closer, None]

    color = np.empty((height, width, 3), dtype=np.uint8)
    color[:] = np.asarray(background, dtype=np.uint8)
    fg_rows, fg_cols = np.nonzero(face_id >= 0)
    if fg_rows.size:
        fids = face_id[fg_rows, fg_cols]
        if texture is not None:
            texels = getattr(texture, 'texels', texture)
            uv = np.einsum('nk,nkc->nc', bary[fg_rows, fg_cols],
                           mesh.uv_coords[fids])
            rgb = sample_texture(texels, uv, mapped)
            color[fg_rows, fg_cols] = np.clip(np.rint(rgb), 0, 255)
        else:
            unit = normals / np.maximum(
                np.linalg.norm(normals, axis=1, keepdims=True), 1e-300)
            centroid = tri_cam.mean(axis=1)
            view = centroid / np.maximum(
                np.linalg.norm(centroid, axis=1, keepdims=True), 1e-300)
            cosine = np.abs(np.einsum('ij,ij->i', unit, view))
            grey = np.rint(40 + 215 * np.minimum(cosine, 1.0))
            color[fg_rows, fg_cols] = grey[fids, None].astype(np.uint8)

    log.debug('rasterized %d/%d faces, %d foreground pixels',
              len(candidates), len(faces), fg_rows.size)
    return FrameBuffers(color, depth, face_id, bary)


def render_turntable(model, pose, texture, cameras, background=(0, 0, 0),
                     mapped=None):
    """Render one posed, textured model from each camera in order."""
    if not cameras:
        raise ValidationError('at least one camera is required')
    mesh = pose_mesh(model, pose)
    return [rasterize(mesh, cam, texture, background, mapped)
            for cam in cameras]


def framed_orbit(model, pose, azimuths_deg, intrinsics=None, margin=None):
    """Return orbit cameras auto-framed on the posed model's joints."""
    intrinsics = intrinsics or Intrinsics.from_config()
    center, radius = frame_subject(joint_positions(model, pose), intrinsics,
                                   margin)
    return orbit(center, radius, azimuths_deg, intrinsics)
