# Copyright (C) 2026 The imitator developers
#
# This file is free software; you can redistribute it and/or modify it
# under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.

"""
A procedural humanoid body model.

The humanoid stands in for a parametric human mesh: a rest mesh of
capped generalised cylinders (head, torso, two arms, two legs), a
kinematic tree of 17 joints, per-vertex skinning weights and a packed
UV atlas with one island per body part.  Poses are applied with linear
blend skinning (LBS) followed by a root similarity transform.

Conventions: metres, y up, the body faces +z and its left side is +x.
The pelvis (root joint) sits at the origin.
"""

import json
import logging
import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np
from scipy.spatial.transform import Rotation

from imitator.types import ValidationError, check_number

log = logging.getLogger(__name__)

JOINT_NAMES = ('pelvis', 'spine', 'chest', 'neck', 'head',
               'left_shoulder', 'left_elbow', 'left_wrist',
               'right_shoulder', 'right_elbow', 'right_wrist',
               'left_hip', 'left_knee', 'left_ankle',
               'right_hip', 'right_knee', 'right_ankle')
JOINT_PARENTS = (-1, 0, 1, 2, 3, 2, 5, 6, 2, 8, 9, 0, 11, 12, 0, 14, 15)
JOINT = {name: num for num, name in enumerate(JOINT_NAMES)}

PART_NAMES = ('torso', 'head', 'left_arm', 'right_arm',
              'left_leg', 'right_leg')

# Atlas islands as (u0, v0, u1, v1).  Central parts are centred on
# u = 0.5; left parts are the mirror images of right parts.
ISLANDS = {
    'right_arm': (0.02, 0.02, 0.24, 0.48),
    'torso': (0.27, 0.02, 0.73, 0.48),
    'left_arm': (0.76, 0.02, 0.98, 0.48),
    'right_leg': (0.02, 0.52, 0.30, 0.98),
    'head': (0.35, 0.52, 0.65, 0.98),
    'left_leg': (0.70, 0.52, 0.98, 0.98),
}
MIRROR = {'torso': 'torso', 'head': 'head',
          'left_arm': 'right_arm', 'right_arm': 'left_arm',
          'left_leg': 'right_leg', 'right_leg': 'left_leg'}

# UV content is inset from the island edges by this much.
ISLAND_MARGIN = 0.015
# Fraction of the inset island height used by the cylinder band; the
# remainder holds the two end caps.
BAND_FRACTION = 0.82


def rodrigues(rotvecs):
    """Convert axis-angle vectors (..., 3) into rotation matrices (..., 3, 3).

    >>> rodrigues([0, 0, 0]).tolist()
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
    """
    rotvecs = np.array(rotvecs, dtype=float)
    flat = rotvecs.reshape(-1, 3)
    mats = Rotation.from_rotvec(flat).as_matrix()
    return mats.reshape(rotvecs.shape[:-1] + (3, 3))


def _check_keys(cls, data):
    """Reject keys that are not fields of the dataclass cls."""
    if not isinstance(data, dict):
        raise ValidationError(f'{cls.__name__}: expected a JSON object')
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ValidationError(f'{cls.__name__}: unknown keys {unknown}')


@dataclass(frozen=True)
class AvatarConfig:
    """Dimensions (metres) and tessellation of the procedural humanoid."""

    # pylint: disable=too-many-instance-attributes
    sides: int = 20
    torso_segments: int = 6
    head_segments: int = 6
    arm_segments: int = 8
    leg_segments: int = 10
    torso_radius: float = 0.17
    torso_depth: float = 0.10
    torso_length: float = 0.60
    head_radius: float = 0.11
    head_length: float = 0.26
    arm_radius: float = 0.045
    upper_arm_length: float = 0.28
    forearm_length: float = 0.26
    hand_length: float = 0.10
    leg_radius: float = 0.06
    thigh_length: float = 0.42
    shin_length: float = 0.40
    foot_length: float = 0.06
    hip_offset: float = 0.09

    def __post_init__(self):
        """Validate segment counts and dimensions."""
        for fld in fields(self):
            value = getattr(self, fld.name)
            if fld.type is int or fld.type == 'int':
                if isinstance(value, bool) or not isinstance(value, int):
                    raise ValidationError(f'{fld.name} must be an integer')
                minimum = 3 if fld.name == 'sides' else 1
                if value < minimum:
                    raise ValidationError(
                        f'{fld.name} must be >= {minimum}, got {value}')
            else:
                check_number(fld.name, value)
                if not math.isfinite(value) or value <= 0:
                    raise ValidationError(
                        f'{fld.name} must be positive, got {value}')

    @classmethod
    def from_dict(cls, data):
        """Construct from a dict, rejecting unknown keys."""
        _check_keys(cls, data)
        return cls(**data)

    @classmethod
    def load(cls, path):
        """Read an AvatarConfig from a JSON document."""
        with open(path, encoding='utf-8') as fileobj:
            return cls.from_dict(json.load(fileobj))

    def to_dict(self):
        """Return a JSON-ready dict."""
        return asdict(self)


def _readonly(array, dtype):
    array = np.array(array, dtype=dtype)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class BodyModel:
    """Rest mesh, skeleton, skinning weights and UV atlas.

    Instances are immutable (all arrays are read-only) and hash by
    identity, so they can be shared between threads and used as cache
    keys.
    """

    # pylint: disable=too-many-instance-attributes
    rest_vertices: np.ndarray
    faces: np.ndarray
    uv_coords: np.ndarray
    joint_parents: tuple
    joint_offsets: np.ndarray
    skin_weights: np.ndarray
    joint_names: tuple = None
    face_parts: np.ndarray = None
    part_names: tuple = ('body',)
    islands: dict = field(default_factory=dict)
    mirror: dict = field(default_factory=dict)

    def __post_init__(self):
        """Freeze arrays and check the structural invariants."""
        setter = object.__setattr__
        setter(self, 'rest_vertices', _readonly(self.rest_vertices, float))
        setter(self, 'faces', _readonly(self.faces, np.int64))
        setter(self, 'uv_coords', _readonly(self.uv_coords, float))
        setter(self, 'joint_parents', tuple(int(p) for p in
                                            self.joint_parents))
        setter(self, 'joint_offsets', _readonly(self.joint_offsets, float))
        setter(self, 'skin_weights', _readonly(self.skin_weights, float))
        if self.joint_names is None:
            setter(self, 'joint_names', tuple(
                f'joint{i}' for i in range(len(self.joint_parents))))
        if self.face_parts is None:
            setter(self, 'face_parts', np.zeros(len(self.faces), int))
        setter(self, 'face_parts', _readonly(self.face_parts, np.int64))
        self.validate()

    # pylint: disable=too-many-branches
    def validate(self):
        """Raise ValidationError if any structural invariant fails."""
        verts, faces, uvs = self.rest_vertices, self.faces, self.uv_coords
        if verts.ndim != 2 or verts.shape[1] != 3:
            raise ValidationError('rest_vertices must be (V, 3)')
        if not np.all(np.isfinite(verts)):
            raise ValidationError('rest_vertices must be finite')
        if faces.ndim != 2 or faces.shape[1] != 3:
            raise ValidationError('faces must be (F, 3)')
        if faces.size and (faces.min() < 0 or faces.max() >= len(verts)):
            raise ValidationError('face references an invalid vertex')
        if uvs.shape != (len(faces), 3, 2):
            raise ValidationError('uv_coords must be (F, 3, 2)')
        if uvs.size and (uvs.min() < 0 or uvs.max() > 1):
            raise ValidationError('uv coordinates must lie in [0, 1]')
        njoints = len(self.joint_parents)
        if njoints == 0 or self.joint_parents[0] != -1:
            raise ValidationError('joint 0 must be the root')
        for num, parent in enumerate(self.joint_parents[1:], start=1):
            if not 0 <= parent < num:
                raise ValidationError(
                    f'joint {num} has invalid parent {parent}')
        if self.joint_offsets.shape != (njoints, 3):
            raise ValidationError('joint_offsets must be (J, 3)')
        if len(self.joint_names) != njoints:
            raise ValidationError('one name per joint required')
        weights = self.skin_weights
        if weights.shape != (len(verts), njoints):
            raise ValidationError('skin_weights must be (V, J)')
        if weights.size and weights.min() < 0:
            raise ValidationError('skin weights must be non-negative')
        if not np.allclose(weights.sum(axis=1), 1, rtol=0, atol=1e-6):
            raise ValidationError('skin weights must sum to one')
        if self.face_parts.shape != (len(faces),):
            raise ValidationError('face_parts must have one entry per face')
        if faces.size and (self.face_parts.min() < 0 or
                           self.face_parts.max() >= len(self.part_names)):
            raise ValidationError('face_parts out of range')

    @property
    def n_joints(self):
        """Return the number of joints."""
        return len(self.joint_parents)

    @property
    def n_vertices(self):
        """Return the number of vertices."""
        return len(self.rest_vertices)

    @property
    def rest_joints(self):
        """Rest-pose joint positions (cumulative offsets)."""
        zeros = np.zeros((self.n_joints, 3))
        return _global_transforms(self, zeros)[:, :3, 3]

    def part_index(self, name):
        """Return the index of the named part."""
        return self.part_names.index(name)

    def subtree(self, joint):
        """Return the set of joints in the subtree rooted at joint."""
        result = {joint}
        for num, parent in enumerate(self.joint_parents):
            if parent in result:
                result.add(num)
        return result

    def check_mirror_islands(self):
        """Check that left/right islands mirror each other under u -> 1-u."""
        for part, other in self.mirror.items():
            if part == other:
                continue
            u0, v0, u1, v1 = self.islands[part]
            mirrored = (1 - u1, v0, 1 - u0, v1)
            if not np.allclose(mirrored, self.islands[other], atol=1e-12):
                return False
            mine = self.uv_coords[self.face_parts == self.part_index(part)]
            theirs = self.uv_coords[self.face_parts == self.part_index(other)]
            if mine.shape != theirs.shape:
                return False
            flipped = mine[:, [0, 2, 1]].copy()
            flipped[..., 0] = 1 - flipped[..., 0]
            if not np.allclose(flipped, theirs, atol=1e-12):
                return False
        return True


@dataclass(frozen=True)
class PoseParams:
    """Per-joint axis-angle rotations plus a root similarity transform."""

    joint_rotations: np.ndarray
    root_rotation: np.ndarray = (0.0, 0.0, 0.0)
    root_translation: np.ndarray = (0.0, 0.0, 0.0)
    scale: float = 1.0

    def __post_init__(self):
        """Validate finiteness and scale."""
        setter = object.__setattr__
        rots = np.array(self.joint_rotations, dtype=float)
        if rots.ndim != 2 or rots.shape[1] != 3:
            raise ValidationError('joint_rotations must be (J, 3)')
        setter(self, 'joint_rotations', _readonly(rots, float))
        for name in ('root_rotation', 'root_translation'):
            vec = np.array(getattr(self, name), dtype=float)
            if vec.shape != (3,):
                raise ValidationError(f'{name} must have 3 components')
            setter(self, name, _readonly(vec, float))
        if not (np.all(np.isfinite(self.joint_rotations)) and
                np.all(np.isfinite(self.root_rotation)) and
                np.all(np.isfinite(self.root_translation))):
            raise ValidationError('pose values must be finite')
        if not math.isfinite(self.scale) or self.scale <= 0:
            raise ValidationError(f'scale must be positive, got {self.scale}')

    @classmethod
    def identity(cls, njoints):
        """Return the rest pose for a skeleton of njoints joints."""
        return cls(np.zeros((njoints, 3)))

    @property
    def n_joints(self):
        """Return the number of joint rotations."""
        return len(self.joint_rotations)

    def to_dict(self):
        """Return the JSON frame representation."""
        return {'root_rotation': self.root_rotation.tolist(),
                'root_translation': self.root_translation.tolist(),
                'scale': float(self.scale),
                'joint_rotations': self.joint_rotations.tolist()}


@dataclass(frozen=True, eq=False)
class Mesh:
    """A posed mesh sharing topology and UVs with its BodyModel."""

    vertices: np.ndarray
    faces: np.ndarray
    uv_coords: np.ndarray

    def face_normals(self):
        """Return unnormalised outward face normals (F, 3)."""
        tri = self.vertices[self.faces]
        return np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])

    def surface_area(self):
        """Return the total surface area in square metres."""
        return 0.5 * np.linalg.norm(self.face_normals(), axis=1).sum()

    def to_obj(self, path):
        """Write an ASCII OBJ file (positions, per-corner UVs, faces)."""
        with open(path, 'w', encoding='utf-8') as out:
            print('# imitator mesh', file=out)
            for vert in self.vertices:
                print(f'v {vert[0]:.6f} {vert[1]:.6f} {vert[2]:.6f}',
                      file=out)
            for corner in self.uv_coords.reshape(-1, 2):
                print(f'vt {corner[0]:.6f} {corner[1]:.6f}', file=out)
            for num, face in enumerate(self.faces):
                idx = [f'{face[k] + 1}/{3 * num + k + 1}' for k in range(3)]
                print('f ' + ' '.join(idx), file=out)


def _global_transforms(model, joint_rotations):
    """Forward kinematics: per-joint 4x4 world transforms (J, 4, 4)."""
    rots = rodrigues(joint_rotations)
    result = np.zeros((model.n_joints, 4, 4))
    for num, parent in enumerate(model.joint_parents):
        local = np.eye(4)
        local[:3, :3] = rots[num]
        local[:3, 3] = model.joint_offsets[num]
        result[num] = local if parent < 0 else result[parent] @ local
    return result


def _check_pose(model, pose):
    if pose.n_joints != model.n_joints:
        raise ValidationError(f'pose has {pose.n_joints} joint rotations, '
                              f'model has {model.n_joints} joints')


def _root_transform(pose, points):
    rot = rodrigues(pose.root_rotation)
    return pose.scale * (points @ rot.T) + pose.root_translation


def pose_mesh(model, pose):
    """Pose the model by linear blend skinning and the root transform."""
    _check_pose(model, pose)
    glob = _global_transforms(model, pose.joint_rotations)
    skin = glob.copy()
    # Skinning transforms map rest positions, so remove each joint's
    # rest location first.
    skin[:, :3, 3] -= np.einsum('jab,jb->ja', glob[:, :3, :3],
                                model.rest_joints)
    blended = np.einsum('vj,jab->vab', model.skin_weights, skin[:, :3, :])
    verts = np.einsum('vab,vb->va', blended[:, :, :3], model.rest_vertices)
    verts += blended[:, :, 3]
    return Mesh(_root_transform(pose, verts), model.faces, model.uv_coords)


def joint_positions(model, pose):
    """Return posed joint positions (J, 3) by forward kinematics."""
    _check_pose(model, pose)
    glob = _global_transforms(model, pose.joint_rotations)
    return _root_transform(pose, glob[:, :3, 3])


def _station_weights(arclen, stations, njoints):
    """Blend weights over the two joints bracketing each arc length."""
    weights = np.zeros((len(arclen), njoints))
    positions = np.array([s for s, _ in stations])
    joints = [j for _, j in stations]
    for num, pos in enumerate(arclen):
        if pos <= positions[0]:
            weights[num, joints[0]] = 1
        elif pos >= positions[-1]:
            weights[num, joints[-1]] = 1
        else:
            k = np.searchsorted(positions, pos, side='right') - 1
            frac = (pos - positions[k]) / (positions[k + 1] - positions[k])
            weights[num, joints[k]] += 1 - frac
            weights[num, joints[k + 1]] += frac
    return weights


# pylint: disable=too-many-arguments,too-many-locals
def _tube(frame, length, profile, segments, sides, stations, rect, up):
    """Build one capped generalised cylinder and its UV island.

    frame is (origin, axis, side, front); profile maps t in [0, 1] to
    (side radius, front radius).  Rings are stacked along the axis and
    parameterised by angle a in [-pi, pi] from the front direction, so
    the seam runs down the back.  up=True puts t=1 at the top of the
    island.
    """
    origin, axis, side, front = (np.asarray(x, float) for x in frame)
    angles = -np.pi + 2 * np.pi * np.arange(sides + 1) / sides
    tvals = np.arange(segments + 1) / segments
    radii = np.array([profile(t) for t in tvals])

    rings = []
    for tval, (rside, rfront) in zip(tvals, radii):
        centre = origin + axis * length * tval
        ring = (centre + rside * np.sin(angles[:sides, None]) * side +
                rfront * np.cos(angles[:sides, None]) * front)
        rings.append(ring)
    verts = np.vstack(rings + [origin[None], (origin + axis * length)[None]])
    arclen = np.concatenate([np.repeat(tvals * length, sides),
                             [0.0, length]])

    u0, v0, u1, v1 = rect
    cu0, cv0 = u0 + ISLAND_MARGIN, v0 + ISLAND_MARGIN
    cu1, cv1 = u1 - ISLAND_MARGIN, v1 - ISLAND_MARGIN
    band_height = (cv1 - cv0) * BAND_FRACTION

    def band_uv(ring, k):
        tval = tvals[ring]
        return (cu0 + (cu1 - cu0) * k / sides,
                cv0 + band_height * ((1 - tval) if up else tval))

    faces, uvs = [], []
    for ring in range(segments):
        for k in range(sides):
            a00, a01 = ring * sides + k, ring * sides + (k + 1) % sides
            a10 = (ring + 1) * sides + k
            a11 = (ring + 1) * sides + (k + 1) % sides
            faces.append((a00, a01, a11))
            uvs.append((band_uv(ring, k), band_uv(ring, k + 1),
                        band_uv(ring + 1, k + 1)))
            faces.append((a00, a11, a10))
            uvs.append((band_uv(ring, k), band_uv(ring + 1, k + 1),
                        band_uv(ring + 1, k)))

    # End caps: two small discs stacked on the island centre line.
    strip = cv1 - (cv0 + band_height)
    rho = min(0.2 * strip, 0.2 * (cu1 - cu0))
    centre_u = 0.5 * (cu0 + cu1)
    for cap, ring in ((0, 0), (1, segments)):
        hub = len(rings) * sides + cap
        hub_uv = (centre_u, cv0 + band_height + strip * (0.3 + 0.45 * cap))
        for k in range(sides):
            kk = (k + 1) % sides
            faces.append((hub, ring * sides + k, ring * sides + kk))
            uvs.append((hub_uv,
                        (hub_uv[0] + rho * np.sin(angles[k]),
                         hub_uv[1] + rho * np.cos(angles[k])),
                        (hub_uv[0] + rho * np.sin(angles[k + 1]),
                         hub_uv[1] + rho * np.cos(angles[k + 1]))))

    faces = np.array(faces)
    uvs = np.array(uvs)
    # Orient every face outward (star-shaped about the tube midpoint).
    tri = verts[faces]
    normals = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    outward = tri.mean(axis=1) - (origin + axis * length / 2)
    flip = np.einsum('ij,ij->i', normals, outward) < 0
    faces[flip] = faces[flip][:, [0, 2, 1]]
    uvs[flip] = uvs[flip][:, [0, 2, 1]]

    weights = _station_weights(arclen, stations, len(JOINT_NAMES))
    return verts, faces, uvs, weights


def _mirror_part(part):
    """Mirror a left part into the matching right part (x -> -x)."""
    verts, faces, uvs, weights = part
    verts = verts * np.array([-1.0, 1.0, 1.0])
    faces = faces[:, [0, 2, 1]]
    uvs = uvs[:, [0, 2, 1]].copy()
    uvs[..., 0] = 1 - uvs[..., 0]
    remap = np.arange(len(JOINT_NAMES))
    for name in JOINT_NAMES:
        if name.startswith('left_'):
            remap[JOINT['right_' + name[5:]]] = JOINT[name]
            remap[JOINT[name]] = JOINT['right_' + name[5:]]
    return verts, faces, uvs, weights[:, remap]


def build_canonical_humanoid(config=None):
    """Build the procedural humanoid described by an AvatarConfig."""
    # pylint: disable=too-many-locals
    cfg = AvatarConfig() if config is None else config
    if not isinstance(cfg, AvatarConfig):
        raise ValidationError('expected an AvatarConfig')

    torso_bottom = -0.15 * cfg.torso_length
    neck_y = 0.85 * cfg.torso_length
    shoulder_y = 0.76 * cfg.torso_length
    shoulder_x = cfg.torso_radius
    arm_start = 0.8 * cfg.torso_radius
    leg_top = torso_bottom + cfg.leg_radius
    head_start = neck_y - 0.3 * cfg.head_radius

    joints = np.zeros((len(JOINT_NAMES), 3))
    joints[JOINT['spine']] = (0, 0.3 * cfg.torso_length, 0)
    joints[JOINT['chest']] = (0, 0.6 * cfg.torso_length, 0)
    joints[JOINT['neck']] = (0, neck_y, 0)
    joints[JOINT['head']] = (0, neck_y + 0.35 * cfg.head_length, 0)
    joints[JOINT['left_shoulder']] = (shoulder_x, shoulder_y, 0)
    joints[JOINT['left_elbow']] = (shoulder_x + cfg.upper_arm_length,
                                   shoulder_y, 0)
    joints[JOINT['left_wrist']] = (shoulder_x + cfg.upper_arm_length +
                                   cfg.forearm_length, shoulder_y, 0)
    joints[JOINT['left_hip']] = (cfg.hip_offset, torso_bottom, 0)
    joints[JOINT['left_knee']] = (cfg.hip_offset,
                                  torso_bottom - cfg.thigh_length, 0)
    joints[JOINT['left_ankle']] = (cfg.hip_offset, torso_bottom -
                                   cfg.thigh_length - cfg.shin_length, 0)
    for name in JOINT_NAMES:
        if name.startswith('left_'):
            joints[JOINT['right_' + name[5:]]] = \
                joints[JOINT[name]] * (-1, 1, 1)

    xaxis, yaxis, zaxis = np.eye(3)
    torso = _tube(
        ((0, torso_bottom, 0), yaxis, xaxis, zaxis),
        neck_y - torso_bottom,
        lambda t: (cfg.torso_radius, cfg.torso_depth),
        cfg.torso_segments, cfg.sides,
        [(-torso_bottom, JOINT['pelvis']),
         (joints[JOINT['spine']][1] - torso_bottom, JOINT['spine']),
         (joints[JOINT['chest']][1] - torso_bottom, JOINT['chest'])],
        ISLANDS['torso'], up=True)
    head_len = neck_y - head_start + cfg.head_length
    head = _tube(
        ((0, head_start, 0), yaxis, xaxis, zaxis), head_len,
        lambda t: (cfg.head_radius * (0.55 + 0.45 * math.sin(math.pi * t)),
                   cfg.head_radius * (0.55 + 0.45 * math.sin(math.pi * t))),
        cfg.head_segments, cfg.sides,
        [(neck_y - head_start, JOINT['neck']),
         (joints[JOINT['head']][1] - head_start, JOINT['head'])],
        ISLANDS['head'], up=True)
    arm_len = (shoulder_x - arm_start + cfg.upper_arm_length +
               cfg.forearm_length + cfg.hand_length)
    arm_stations = [(shoulder_x - arm_start, JOINT['left_shoulder']),
                    (shoulder_x - arm_start + cfg.upper_arm_length,
                     JOINT['left_elbow']),
                    (shoulder_x - arm_start + cfg.upper_arm_length +
                     cfg.forearm_length, JOINT['left_wrist'])]
    left_arm = _tube(
        ((arm_start, shoulder_y, 0), xaxis, yaxis, zaxis), arm_len,
        lambda t: (cfg.arm_radius, cfg.arm_radius),
        cfg.arm_segments, cfg.sides, arm_stations, ISLANDS['left_arm'],
        up=False)
    leg_len = (leg_top - torso_bottom + cfg.thigh_length +
               cfg.shin_length + cfg.foot_length)
    leg_stations = [(leg_top - torso_bottom, JOINT['left_hip']),
                    (leg_top - torso_bottom + cfg.thigh_length,
                     JOINT['left_knee']),
                    (leg_top - torso_bottom + cfg.thigh_length +
                     cfg.shin_length, JOINT['left_ankle'])]
    left_leg = _tube(
        ((cfg.hip_offset, leg_top, 0), -yaxis, xaxis, zaxis), leg_len,
        lambda t: (cfg.leg_radius, cfg.leg_radius),
        cfg.leg_segments, cfg.sides, leg_stations, ISLANDS['left_leg'],
        up=False)

    parts = {'torso': torso, 'head': head,
             'left_arm': left_arm, 'right_arm': _mirror_part(left_arm),
             'left_leg': left_leg, 'right_leg': _mirror_part(left_leg)}
    verts, faces, uvs, weights, face_parts = [], [], [], [], []
    base = 0
    for num, name in enumerate(PART_NAMES):
        pverts, pfaces, puvs, pweights = parts[name]
        verts.append(pverts)
        faces.append(pfaces + base)
        uvs.append(puvs)
        weights.append(pweights)
        face_parts.append(np.full(len(pfaces), num))
        base += len(pverts)

    offsets = joints.copy()
    for num, parent in enumerate(JOINT_PARENTS):
        if parent >= 0:
            offsets[num] = joints[num] - joints[parent]

    model = BodyModel(rest_vertices=np.vstack(verts),
                      faces=np.vstack(faces),
                      uv_coords=np.vstack(uvs),
                      joint_parents=JOINT_PARENTS,
                      joint_offsets=offsets,
                      skin_weights=np.vstack(weights),
                      joint_names=JOINT_NAMES,
                      face_parts=np.concatenate(face_parts),
                      part_names=PART_NAMES,
                      islands=dict(ISLANDS),
                      mirror=dict(MIRROR))
    assert model.check_mirror_islands()
    log.debug('humanoid: %d vertices, %d faces, %d joints',
              model.n_vertices, len(model.faces), model.n_joints)
    return model
