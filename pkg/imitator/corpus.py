# Copyright (C) 2026 The imitator developers
#
# This file is free software; you can redistribute it and/or modify it
# under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.

"""
Synthetic corpus generation.

Layout of a generated corpus:

  out/manifest.json
  out/avatar_000/texture.png
  out/avatar_000/<motion>/poses.json
  out/avatar_000/<motion>/view_00/camera.json
  out/avatar_000/<motion>/view_00/frame_000001.png ...
"""

import json
import logging
import math
import os
from dataclasses import dataclass, fields

import numpy as np

from imitator import utils
from imitator.body import JOINT, JOINT_NAMES, PoseParams, \
    build_canonical_humanoid, pose_mesh
from imitator.motion import OrbitProtocol, PoseSequence
from imitator.raster import Intrinsics, framed_orbit, rasterize
from imitator.texture import TextureStyle, generate_procedural_texture
from imitator.types import ValidationError, check_number

log = logging.getLogger(__name__)

PRESETS = ('idle', 'walk', 'wave', 'spin')
PRESET_FPS = 30.0
WALK_PERIOD = 30
WAVE_PERIOD = 20
# Arms hang this far below the rest T-pose (radians).
ARM_DROP = 1.2


def _walk(num):
    phase = 2 * math.pi * num / WALK_PERIOD
    rots = np.zeros((len(JOINT_NAMES), 3))
    rots[JOINT['left_hip']] = (0.45 * math.sin(phase), 0, 0)
    rots[JOINT['right_hip']] = (-0.45 * math.sin(phase), 0, 0)
    rots[JOINT['left_knee']] = (0.3 * (1 - math.cos(phase)), 0, 0)
    rots[JOINT['right_knee']] = (0.3 * (1 + math.cos(phase)), 0, 0)
    rots[JOINT['left_shoulder']] = (-0.35 * math.sin(phase), 0, -ARM_DROP)
    rots[JOINT['right_shoulder']] = (0.35 * math.sin(phase), 0, ARM_DROP)
    return rots


def _wave(num):
    phase = 2 * math.pi * num / WAVE_PERIOD
    rots = np.zeros((len(JOINT_NAMES), 3))
    rots[JOINT['left_shoulder']] = (0, 0, 0.9)
    rots[JOINT['left_elbow']] = (0, 0, 0.8 + 0.5 * math.sin(phase))
    rots[JOINT['right_shoulder']] = (0, 0, ARM_DROP)
    return rots


def motion_preset(name, n_frames=30):
    """Return an analytic actor motion sampled at 30 fps.

    walk and wave are periodic; spin turns the root once about the
    vertical axis over the whole sequence.
    """
    if name not in PRESETS:
        raise ValidationError(f'unknown motion preset {name!r}')
    if n_frames < 1:
        raise ValidationError('n_frames must be >= 1')
    njoints = len(JOINT_NAMES)
    frames = []
    for num in range(n_frames):
        if name == 'walk':
            frames.append(PoseParams(_walk(num)))
        elif name == 'wave':
            frames.append(PoseParams(_wave(num)))
        elif name == 'spin':
            angle = 2 * math.pi * num / n_frames
            frames.append(PoseParams(np.zeros((njoints, 3)),
                                     root_rotation=(0, angle, 0)))
        else:
            frames.append(PoseParams.identity(njoints))
    return PoseSequence(frames, PRESET_FPS)


@dataclass(frozen=True)
class CorpusSpec:
    """What to generate: avatars, motions, views and image size."""

    # pylint: disable=too-many-instance-attributes
    n_avatars: int = 2
    styles: tuple = ()
    motions: tuple = ('walk',)
    views: OrbitProtocol = OrbitProtocol(0.0, 12.0, 1)
    resolution: int = 256
    texture_resolution: int = 256
    n_frames: int = 30
    seed: int = 0
    test_fraction: float = 0.125

    def __post_init__(self):
        """Validate and normalise nested values."""
        setter = object.__setattr__
        for name in ('n_avatars', 'resolution', 'texture_resolution',
                     'n_frames'):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or \
               value < 1:
                raise ValidationError(f'{name} must be an integer >= 1')
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or \
           not 0 <= self.seed < 2 ** 64:
            raise ValidationError('seed must be a 64-bit unsigned integer')
        check_number('test_fraction', self.test_fraction)
        if not 0 <= self.test_fraction <= 1:
            raise ValidationError('test_fraction must lie in [0, 1]')
        if not isinstance(self.styles, (list, tuple)):
            raise ValidationError('styles must be a list of objects')
        styles = tuple(s if isinstance(s, TextureStyle)
                       else TextureStyle.from_dict(s) for s in self.styles)
        setter(self, 'styles', styles)
        if not isinstance(self.motions, (list, tuple)):
            raise ValidationError('motions must be a list of preset names')
        setter(self, 'motions', tuple(self.motions))
        for motion in self.motions:
            if motion not in PRESETS:
                raise ValidationError(f'unknown motion preset {motion!r}')
        if not self.motions:
            raise ValidationError('at least one motion is required')
        views = self.views
        if isinstance(views, dict):
            try:
                views = OrbitProtocol(**views)
            except TypeError as exc:
                raise ValidationError(f'bad views: {exc}') from exc
        if not isinstance(views, OrbitProtocol):
            raise ValidationError('views must be a JSON object')
        if views.count < 1:
            raise ValidationError('views.count must be >= 1')
        setter(self, 'views', views)

    @classmethod
    def from_dict(cls, data):
        """Construct from a dict, rejecting unknown keys."""
        if not isinstance(data, dict):
            raise ValidationError('CorpusSpec: expected a JSON object')
        unknown = sorted(set(data) - {f.name for f in fields(cls)})
        if unknown:
            raise ValidationError(f'CorpusSpec: unknown keys {unknown}')
        return cls(**data)

    @classmethod
    def load(cls, path):
        """Read a spec from a JSON file."""
        with open(path, encoding='utf-8') as fileobj:
            return cls.from_dict(json.load(fileobj))

    def to_dict(self):
        """Return the JSON form."""
        return {'n_avatars': self.n_avatars,
                'styles': [s.to_dict() for s in self.styles],
                'motions': list(self.motions),
                'views': {'start_deg': self.views.start_deg,
                          'step_deg': self.views.step_deg,
                          'count': self.views.count},
                'resolution': self.resolution,
                'texture_resolution': self.texture_resolution,
                'n_frames': self.n_frames, 'seed': self.seed,
                'test_fraction': self.test_fraction}

    def intrinsics(self):
        """Return square intrinsics, focal length proportional to size."""
        return Intrinsics.square(self.resolution,
                                 self.resolution * 300 / 256)


# pylint: disable=too-many-locals
def generate_corpus(spec, out_dir):
    """Render the corpus described by spec into out_dir; return manifest."""
    rng = np.random.default_rng(spec.seed)
    model = build_canonical_humanoid()
    rest = PoseParams.identity(model.n_joints)
    cameras = framed_orbit(model, rest, spec.views.azimuths(),
                           spec.intrinsics())
    avatars = []
    for num in range(spec.n_avatars):
        ident = f'avatar_{num:03d}'
        if spec.styles:
            style = spec.styles[num % len(spec.styles)]
        else:
            style = TextureStyle.random(rng)
        split = 'test' if rng.random() < spec.test_fraction else 'train'
        texture = generate_procedural_texture(style, model,
                                              spec.texture_resolution)
        entry = {'id': ident, 'split': split, 'style': style.to_dict(),
                 'texture': f'{ident}/texture.png', 'poses': [],
                 'cameras': [], 'frames': []}
        texture.save(os.path.join(out_dir, entry['texture']))

        for motion in spec.motions:
            poses = motion_preset(motion, spec.n_frames)
            rel = f'{ident}/{motion}/poses.json'
            poses.save(os.path.join(out_dir, rel))
            entry['poses'].append(rel)
            meshes = [pose_mesh(model, pose) for pose in poses]
            for view, camera in enumerate(cameras):
                vdir = f'{ident}/{motion}/view_{view:02d}'
                utils.write_json(os.path.join(out_dir, vdir, 'camera.json'),
                                 camera.to_dict())
                entry['cameras'].append(f'{vdir}/camera.json')
                for fnum, mesh in enumerate(meshes):
                    frame = rasterize(mesh, camera, texture)
                    rel = f'{vdir}/{utils.frame_name(fnum + 1)}'
                    utils.write_png(os.path.join(out_dir, rel), frame.color)
                    entry['frames'].append(rel)

        files = [entry['texture']] + entry['poses'] + entry['cameras'] + \
            entry['frames']
        entry['sha256'] = {rel: utils.sha256sum(os.path.join(out_dir, rel))
                           for rel in files}
        avatars.append(entry)
        log.info('%s (%s): %d frames', ident, split, len(entry['frames']))

    manifest = {'seed': spec.seed, 'spec': spec.to_dict(), 'avatars': avatars}
    utils.write_json(os.path.join(out_dir, 'manifest.json'), manifest)
    return manifest
