# Copyright (C) 2026 The imitator developers
#
# This file is free software; you can redistribute it and/or modify it
# under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.

"""
UV texture maps: extraction, visibility, inpainting and synthesis.

A texel (row i, column j) of an R x R map sits at atlas coordinates
u = (j + 0.5)/R, v = (i + 0.5)/R.  Texels outside every UV triangle
are unmapped (gutters); they are never filled and never scored.
"""

import abc
import functools
import json
import logging
import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from imitator import configfile, utils
from imitator.body import pose_mesh
from imitator.raster import (NEAR_PLANE, bilinear_taps, cover_triangle,
                             framed_orbit, project_points, rasterize,
                             to_camera)
from imitator.types import ValidationError, check_number

log = logging.getLogger(__name__)

MIN_RESOLUTION = 8

# Body part -> style attribute holding its base colour.
PART_COLORS = {'head': 'skin', 'left_arm': 'skin', 'right_arm': 'skin',
               'torso': 'shirt', 'left_leg': 'pants', 'right_leg': 'pants'}
PATTERNS = ('solid', 'stripes', 'checker')


def _check_resolution(resolution):
    if isinstance(resolution, bool) or not isinstance(resolution,
                                                      (int, np.integer)):
        raise ValidationError('resolution must be an integer')
    if resolution < MIN_RESOLUTION:
        raise ValidationError(
            f'resolution must be >= {MIN_RESOLUTION}, got {resolution}')


def _check_keys(cls, data):
    if not isinstance(data, dict):
        raise ValidationError(f'{cls.__name__}: expected a JSON object')
    unknown = sorted(set(data) - {f.name for f in fields(cls)})
    if unknown:
        raise ValidationError(f'{cls.__name__}: unknown keys {unknown}')


@dataclass(frozen=True, eq=False)
class TextureMap:
    """A square RGB atlas image."""

    texels: np.ndarray

    def __post_init__(self):
        """Validate shape and range, then freeze."""
        texels = np.asarray(self.texels)
        if texels.ndim != 3 or texels.shape[2] != 3 or \
           texels.shape[0] != texels.shape[1]:
            raise ValidationError('texture must be square R x R x 3')
        _check_resolution(texels.shape[0])
        if texels.dtype != np.uint8:
            if texels.size and (texels.min() < 0 or texels.max() > 255):
                raise ValidationError('texel values must lie in 0..255')
            texels = np.rint(texels)
        texels = np.array(texels, dtype=np.uint8)
        texels.flags.writeable = False
        object.__setattr__(self, 'texels', texels)

    @property
    def resolution(self):
        """Return the side length in texels."""
        return self.texels.shape[0]

    @classmethod
    def blank(cls, resolution, color=(0, 0, 0)):
        """Return a uniformly coloured map."""
        _check_resolution(resolution)
        texels = np.empty((resolution, resolution, 3), dtype=np.uint8)
        texels[:] = color
        return cls(texels)

    def save(self, path):
        """Write the map as an RGB PNG."""
        utils.write_png(path, self.texels)

    @classmethod
    def load(cls, path):
        """Read an RGB PNG."""
        return cls(utils.read_png(path, mode='RGB'))


@dataclass(frozen=True, eq=False)
class VisibilityMask:
    """Per-texel visibility bits."""

    bits: np.ndarray

    def __post_init__(self):
        """Validate shape and freeze."""
        bits = np.array(self.bits, dtype=bool)
        if bits.ndim != 2 or bits.shape[0] != bits.shape[1]:
            raise ValidationError('visibility mask must be square')
        _check_resolution(bits.shape[0])
        bits.flags.writeable = False
        object.__setattr__(self, 'bits', bits)

    @property
    def resolution(self):
        """Return the side length in texels."""
        return self.bits.shape[0]

    def count(self):
        """Return the number of visible texels."""
        return int(self.bits.sum())

    def union(self, other):
        """Return the union of two masks."""
        _match(self, other)
        return VisibilityMask(self.bits | other.bits)

    def coverage(self, atlas):
        """Return the fraction of mapped texels that are visible."""
        mapped = atlas.mapped
        return float((self.bits & mapped).sum() / max(mapped.sum(), 1))

    def save(self, path):
        """Write as a greyscale PNG (255 = visible)."""
        utils.write_png(path, np.where(self.bits, 255, 0).astype(np.uint8))

    @classmethod
    def load(cls, path):
        """Read a greyscale PNG; any non-zero value is visible."""
        return cls(utils.read_png(path, mode='L') > 0)


def _match(first, second):
    if first.resolution != second.resolution:
        raise ValidationError(f'resolution mismatch: {first.resolution} '
                              f'vs {second.resolution}')


@dataclass(frozen=True, eq=False)
class TexelAtlasIndex:
    """Texel to surface map: face, barycentric and island per texel."""

    face_id: np.ndarray
    barycentric: np.ndarray
    island: np.ndarray

    @property
    def resolution(self):
        """Return the side length in texels."""
        return self.face_id.shape[0]

    @property
    def mapped(self):
        """Boolean map of texels inside some UV triangle."""
        return self.face_id >= 0


@functools.lru_cache(maxsize=16)
def build_atlas_index(model, resolution):
    """Rasterize the model's UV triangles at texel centres.

    Each mapped texel records exactly one face: where UV triangles
    share an edge, the lower face index keeps the texel.
    """
    _check_resolution(resolution)
    face_id = np.full((resolution, resolution), -1, dtype=np.int64)
    bary = np.zeros((resolution, resolution, 3))
    for face, corners in enumerate(model.uv_coords):
        rows, cols, lam = cover_triangle(corners * resolution,
                                         resolution, resolution)
        free = face_id[rows, cols] < 0
        rows, cols = rows[free], cols[free]
        face_id[rows, cols] = face
        bary[rows, cols] = lam[free]
    island = np.where(face_id >= 0,
                      model.face_parts[np.maximum(face_id, 0)], -1)
    for array in (face_id, bary, island):
        array.flags.writeable = False
    log.debug('atlas index at %d: %.1f%% mapped', resolution,
              100 * (face_id >= 0).mean())
    return TexelAtlasIndex(face_id, bary, island)


@dataclass(frozen=True)
class VisibilityOptions:
    """Tolerances of the texel visibility test."""

    depth_tolerance: float = 1e-3
    grazing_angle_deg: float = 85.0

    def __post_init__(self):
        """Validate tolerances."""
        check_number('depth_tolerance', self.depth_tolerance)
        check_number('grazing_angle_deg', self.grazing_angle_deg)
        if not self.depth_tolerance >= 0:
            raise ValidationError('depth_tolerance must be >= 0')
        if not 0 < self.grazing_angle_deg <= 90:
            raise ValidationError('grazing_angle_deg must be in (0, 90]')

    @classmethod
    def from_config(cls):
        """Return the options configured in the [texture] section."""
        return cls(configfile.getfloat('texture', 'depth-tolerance'),
                   configfile.getfloat('texture', 'grazing-angle-deg'))


@dataclass(frozen=True)
class _Visible:
    """Visible texels and the image taps that colour them."""

    rows: np.ndarray
    cols: np.ndarray
    tap_rows: np.ndarray
    tap_cols: np.ndarray
    weights: np.ndarray


# pylint: disable=too-many-locals
def _visible_texels(model, pose, camera, atlas, options):
    """Project every mapped texel into the camera and test visibility.

    A texel is visible if its surface point is in front of the near
    plane and inside the image, its face is front-facing and not
    grazing, it is no deeper (plus tolerance) than the face covering
    its pixel (or its own face is, at the pixel centre), and at least
    one bilinear image tap lands on the same body part.
    """
    mesh = pose_mesh(model, pose)
    frame = rasterize(mesh, camera)
    width, height = camera.width, camera.height

    rows, cols = np.nonzero(atlas.mapped)
    fids = atlas.face_id[rows, cols]
    tri = to_camera(camera, mesh.vertices)[mesh.faces]
    normals = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    points = np.einsum('nk,nkc->nc', atlas.barycentric[rows, cols],
                       tri[fids])

    keep = points[:, 2] > NEAR_PLANE
    pix = project_points(camera, points[keep])
    keep[keep] = ((pix[:, 0] >= 0) & (pix[:, 0] < width) &
                  (pix[:, 1] >= 0) & (pix[:, 1] < height))
    ndotp = np.einsum('nc,nc->n', normals[fids], points)
    lengths = np.linalg.norm(normals[fids], axis=1) * \
        np.linalg.norm(points, axis=1)
    min_cos = math.cos(math.radians(options.grazing_angle_deg))
    with np.errstate(divide='ignore', invalid='ignore'):
        keep &= (ndotp < 0) & (-ndotp >= min_cos * lengths)

    idx = np.flatnonzero(keep)
    points, fids = points[idx], fids[idx]
    pix = project_points(camera, points)
    prow = np.clip(np.floor(pix[:, 1]).astype(np.int64), 0, height - 1)
    pcol = np.clip(np.floor(pix[:, 0]).astype(np.int64), 0, width - 1)
    cover = frame.face_id[prow, pcol]
    covered = cover >= 0
    # Depth of the covering face's plane along this texel's own ray.
    plane_normal = normals[np.maximum(cover, 0)]
    num = np.einsum('nc,nc->n', plane_normal,
                    tri[np.maximum(cover, 0), 0])
    denom = np.einsum('nc,nc->n', plane_normal, points)
    # Depth of the texel's own face plane along the pixel-centre ray.
    centre_ray = np.stack([(pcol + 0.5 - camera.cx) / camera.fx,
                           (prow + 0.5 - camera.cy) / camera.fy,
                           np.ones(len(pcol))], axis=-1)
    own_num = np.einsum('nc,nc->n', normals[fids], tri[fids, 0])
    own_denom = np.einsum('nc,nc->n', normals[fids], centre_ray)
    with np.errstate(divide='ignore', invalid='ignore'):
        zref = np.where(np.abs(denom) > 1e-12, num / denom * points[:, 2],
                        frame.depth[prow, pcol])
        own = np.where(own_denom < -1e-12, own_num / own_denom, np.inf)
    tol = options.depth_tolerance
    passed = covered & ((points[:, 2] <= zref + tol) |
                        (own <= frame.depth[prow, pcol] + tol))

    tap_rows, tap_cols, weights, inside = bilinear_taps(
        pix[:, 0], pix[:, 1], width, height)
    tap_face = frame.face_id[tap_rows, tap_cols]
    part = model.face_parts[fids]
    same = inside & (tap_face >= 0) & \
        (model.face_parts[np.maximum(tap_face, 0)] == part[:, None])
    weights = weights * same
    total = weights.sum(axis=1)
    passed &= total > 0

    sel = np.flatnonzero(passed)
    return _Visible(rows[idx][sel], cols[idx][sel], tap_rows[sel],
                    tap_cols[sel], weights[sel] / total[sel, None])


def _mask_from(visible, resolution):
    bits = np.zeros((resolution, resolution), dtype=bool)
    bits[visible.rows, visible.cols] = True
    return VisibilityMask(bits)


def _as_image(image, camera):
    image = np.asarray(image)
    if image.shape != (camera.height, camera.width, 3):
        raise ValidationError(
            f"image shape {image.shape} does not match camera "
            f"{camera.height}x{camera.width}x3")
    return image.astype(float)


# pylint: disable=too-many-arguments
def extract_partial_texture(image, model, pose, camera, resolution,
                            options=None):
    """Sample the image at every visible texel.

    Returns (TextureMap, VisibilityMask); invisible texels are black.
    """
    pixels = _as_image(image, camera)
    options = options or VisibilityOptions.from_config()
    atlas = build_atlas_index(model, resolution)
    visible = _visible_texels(model, pose, camera, atlas, options)
    texels = np.zeros((resolution, resolution, 3), dtype=np.uint8)
    taps = pixels[visible.tap_rows, visible.tap_cols]
    rgb = np.einsum('nk,nkc->nc', visible.weights, taps)
    texels[visible.rows, visible.cols] = np.clip(np.rint(rgb), 0, 255)
    log.info('extracted %d visible texels (%.1f%% of mapped)',
             len(visible.rows),
             100 * len(visible.rows) / max(atlas.mapped.sum(), 1))
    return TextureMap(texels), _mask_from(visible, resolution)


def compute_visibility_mask(model, pose, camera, resolution, options=None):
    """Return the visibility mask of a view without sampling any image."""
    options = options or VisibilityOptions.from_config()
    atlas = build_atlas_index(model, resolution)
    return _mask_from(_visible_texels(model, pose, camera, atlas, options),
                      resolution)


def sample_orbit_masks(model, pose, n_views, resolution, intrinsics=None,
                       options=None):
    """Return visibility masks from n_views cameras spread over 360 degrees."""
    if n_views < 1:
        raise ValidationError('n_views must be >= 1')
    azimuths = [360.0 * k / n_views for k in range(n_views)]
    cameras = framed_orbit(model, pose, azimuths, intrinsics)
    return [compute_visibility_mask(model, pose, cam, resolution, options)
            for cam in cameras]


def make_training_partial(full_texture, mask):
    """Mask out a complete texture: keep visible texels, zero the rest."""
    _match(full_texture, mask)
    return TextureMap(full_texture.texels * mask.bits[:, :, None])


def visible_pixel_mask(frame, model, mask):
    """Foreground pixels whose texture taps all fall on visible texels.

    Taps on unmapped texels are ignored; a pixel needs at least one
    mapped tap.
    """
    res = mask.resolution
    atlas = build_atlas_index(model, res)
    result = np.zeros(frame.shape, dtype=bool)
    prow, pcol = np.nonzero(frame.foreground)
    if prow.size == 0:
        return result
    uv = np.einsum('nk,nkc->nc', frame.barycentric[prow, pcol],
                   model.uv_coords[frame.face_id[prow, pcol]])
    trow, tcol, weights, _ = bilinear_taps(uv[:, 0] * res, uv[:, 1] * res,
                                           res, res)
    used = (weights > 0) & atlas.mapped[trow, tcol]
    good = np.all(~used | mask.bits[trow, tcol], axis=1) & used.any(axis=1)
    result[prow[good], pcol[good]] = True
    return result


@dataclass(frozen=True)
class InpaintOptions:
    """Priors and stopping rule of the harmonic inpainter."""

    mirror: bool = True
    max_iterations: int = 500
    epsilon: float = 0.05

    def __post_init__(self):
        """Validate the options."""
        if not isinstance(self.mirror, bool):
            raise ValidationError('mirror must be true or false')
        if isinstance(self.max_iterations, bool) or \
           not isinstance(self.max_iterations, int) or \
           self.max_iterations < 0:
            raise ValidationError('max_iterations must be an integer >= 0')
        check_number('epsilon', self.epsilon)
        if not self.epsilon > 0:
            raise ValidationError('epsilon must be positive')

    @classmethod
    def from_config(cls):
        """Return the options configured in the [inpaint] section."""
        return cls(configfile.getboolean('inpaint', 'mirror'),
                   configfile.getint('inpaint', 'max-iterations'),
                   configfile.getfloat('inpaint', 'epsilon'))

    @classmethod
    def from_dict(cls, data):
        """Construct from a dict, rejecting unknown keys."""
        _check_keys(cls, data)
        return cls(**data)

    @classmethod
    def load(cls, path):
        """Read options from a JSON file."""
        with open(path, encoding='utf-8') as fileobj:
            return cls.from_dict(json.load(fileobj))

    def to_dict(self):
        """Return a JSON-ready dict."""
        return asdict(self)


class Inpainter(abc.ABC):
    """Completes a partial texture map given its visibility mask."""

    @abc.abstractmethod
    def inpaint(self, partial, mask, atlas=None):
        """Return a complete TextureMap.

        Visible texels must be preserved bit-exactly and unmapped
        texels left untouched.
        """

    def __call__(self, partial, mask, atlas=None):
        """Check resolutions then inpaint."""
        _match(partial, mask)
        if atlas is not None and atlas.resolution != partial.resolution:
            raise ValidationError('atlas index resolution mismatch')
        return self.inpaint(partial, mask, atlas)


class HarmonicInpainter(Inpainter):
    """Mirror-prior seeding followed by a Jacobi harmonic fill."""

    def __init__(self, options=None):
        """Construct with InpaintOptions (configured defaults if None)."""
        self.options = options or InpaintOptions.from_config()

    def __repr__(self):
        """Return a representation including the options."""
        return f'{self.__class__.__name__}({self.options})'

    # pylint: disable=too-many-locals
    def inpaint(self, partial, mask, atlas=None):
        """Fill invisible mapped texels; see the class docstring."""
        res = partial.resolution
        if atlas is None:
            mapped = np.ones((res, res), dtype=bool)
            island = np.zeros((res, res), dtype=np.int64)
        else:
            mapped, island = atlas.mapped, atlas.island
        known = mask.bits & mapped
        values = partial.texels.astype(float)
        filled = known.copy()

        if self.options.mirror:
            mirrored = known[:, ::-1] & mapped[:, ::-1]
            seed = mapped & ~known & mirrored
            values[seed] = values[:, ::-1][seed]
            filled |= seed
            log.debug('mirror prior seeded %d texels', seed.sum())
        fixed = filled.copy()
        active = mapped & ~fixed

        # Neighbour links: in bounds, mapped and in the same island.
        shifts = ((1, 0), (-1, 0), (1, 1), (-1, 1))
        links = [_shift(mapped, s, a, False) &
                 (_shift(island, s, a, -2) == island) & active
                 for s, a in shifts]

        iterations = 0
        for iterations in range(1, self.options.max_iterations + 1):
            sums = np.zeros_like(values)
            counts = np.zeros((res, res))
            for link, (step, axis) in zip(links, shifts):
                usable = link & _shift(filled, step, axis, False)
                sums += np.where(usable[:, :, None],
                                 _shift(values, step, axis, 0.0), 0.0)
                counts += usable
            update = counts > 0
            new = values.copy()
            new[update] = sums[update] / counts[update, None]
            newly = update & ~filled
            settled = update & filled
            change = np.abs(new[settled] - values[settled]).max() \
                if settled.any() else 0.0
            values = new
            filled |= update
            if not newly.any() and change < self.options.epsilon:
                break
        log.debug('harmonic fill stopped after %d iterations', iterations)

        stranded = active & ~filled
        if stranded.any():
            _fallback_fill(values, stranded, fixed, island)

        out = np.where(mapped[:, :, None], np.clip(np.rint(values), 0, 255),
                       partial.texels).astype(np.uint8)
        out[known] = partial.texels[known]
        return TextureMap(out)


def _shift(array, step, axis, fill):
    """Return array[i + step] along axis, padding with fill."""
    result = np.full_like(array, fill)
    if axis == 0:
        if step > 0:
            result[:-step] = array[step:]
        else:
            result[-step:] = array[:step]
    else:
        if step > 0:
            result[:, :-step] = array[:, step:]
        else:
            result[:, -step:] = array[:, :step]
    return result


def _fallback_fill(values, stranded, fixed, island):
    """Give unreachable texels their island's mean known colour."""
    overall = values[fixed].mean(axis=0) if fixed.any() else np.zeros(3)
    for isl in np.unique(island[stranded]):
        here = island == isl
        source = fixed & here
        mean = values[source].mean(axis=0) if source.any() else overall
        values[stranded & here] = mean


def inpaint_texture(partial, mask, options=None, atlas=None, inpainter=None):
    """Complete a partial texture with the given (or harmonic) inpainter."""
    inpainter = inpainter or HarmonicInpainter(options)
    return inpainter(partial, mask, atlas)


# pylint: disable=too-many-arguments
def complete_texture(image, model, pose, camera, resolution,
                     inpaint_options=None, visibility_options=None):
    """Run Stage-1: extract the partial texture and inpaint it.

    Returns (complete, partial, mask).
    """
    partial, mask = extract_partial_texture(image, model, pose, camera,
                                            resolution, visibility_options)
    atlas = build_atlas_index(model, resolution)
    complete = inpaint_texture(partial, mask, inpaint_options, atlas)
    return complete, partial, mask


def _check_color(name, value):
    if not isinstance(value, (list, tuple, np.ndarray)) or \
       len(value) != 3 or any(isinstance(c, bool) or
                              not isinstance(c, (int, np.integer)) or
                              not 0 <= c <= 255 for c in value):
        raise ValidationError(f'{name} must be three integers in 0..255')
    return tuple(int(c) for c in value)


@dataclass(frozen=True)
class TextureStyle:
    """Clothing colours and an optional shirt pattern."""

    skin: tuple = (224, 172, 140)
    shirt: tuple = (40, 80, 200)
    pants: tuple = (60, 60, 60)
    pattern: str = 'solid'
    period: int = 8
    pattern_color: tuple = (240, 240, 240)

    def __post_init__(self):
        """Validate colours, pattern and period."""
        for name in ('skin', 'shirt', 'pants', 'pattern_color'):
            object.__setattr__(self, name,
                               _check_color(name, getattr(self, name)))
        if self.pattern not in PATTERNS:
            raise ValidationError(f'unknown pattern {self.pattern!r}')
        if isinstance(self.period, bool) or \
           not isinstance(self.period, int) or self.period < 2:
            raise ValidationError('period must be an integer >= 2')

    @classmethod
    def from_dict(cls, data):
        """Construct from a dict, rejecting unknown keys."""
        _check_keys(cls, data)
        return cls(**data)

    @classmethod
    def load(cls, path):
        """Read a style from a JSON file."""
        with open(path, encoding='utf-8') as fileobj:
            return cls.from_dict(json.load(fileobj))

    @classmethod
    def random(cls, rng):
        """Draw solid clothing colours from a numpy Generator."""
        colors = rng.integers(30, 226, size=(3, 3))
        return cls(skin=tuple(int(c) for c in colors[0]),
                   shirt=tuple(int(c) for c in colors[1]),
                   pants=tuple(int(c) for c in colors[2]))

    def to_dict(self):
        """Return a JSON-ready dict."""
        return {name: list(value) if isinstance(value, tuple) else value
                for name, value in asdict(self).items()}


def island_texels(rect, resolution):
    """Return the (row, column) slices of texel centres inside rect."""
    u0, v0, u1, v1 = rect
    rows = slice(math.ceil(v0 * resolution - 0.5),
                 math.floor(v1 * resolution - 0.5) + 1)
    cols = slice(math.ceil(u0 * resolution - 0.5),
                 math.floor(u1 * resolution - 0.5) + 1)
    return rows, cols


def generate_procedural_texture(style, model, resolution):
    """Paint every atlas island in its body part's colour.

    The torso takes the shirt pattern.  Stripes run along island rows:
    local row r has the pattern colour when r % period >= period // 2.
    """
    _check_resolution(resolution)
    texels = np.zeros((resolution, resolution, 3), dtype=np.uint8)
    for part in model.part_names:
        rows, cols = island_texels(model.islands[part], resolution)
        block = texels[rows, cols]
        block[:] = getattr(style, PART_COLORS.get(part, 'skin'))
        if part == 'torso' and style.pattern != 'solid':
            half = style.period // 2
            local_r = np.arange(block.shape[0])[:, None] % style.period
            local_c = np.arange(block.shape[1])[None, :] % style.period
            on = np.broadcast_to(local_r >= half, block.shape[:2])
            if style.pattern == 'checker':
                on = on != (local_c >= half)
            block[on] = style.pattern_color
    return TextureMap(texels)
