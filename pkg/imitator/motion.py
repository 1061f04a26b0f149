# Copyright (C) 2026 The imitator developers
#
# This file is free software; you can redistribute it and/or modify it
# under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.

"""Pose sequences, orbit protocols, imitation rendering and clip schedules."""

import json
import logging
import math
from dataclasses import dataclass

import numpy as np

from imitator import configfile, utils
from imitator.body import PoseParams, pose_mesh
from imitator.raster import Camera, orbit, rasterize
from imitator.texture import build_atlas_index, complete_texture
from imitator.types import ParseError, ValidationError, check_integer, \
    check_number

log = logging.getLogger(__name__)

FRAME_KEYS = ('root_rotation', 'root_translation', 'scale',
              'joint_rotations')


@dataclass(frozen=True)
class PoseSequence:
    """An ordered, non-empty list of poses sampled at fps."""

    frames: tuple
    fps: float = 30.0

    def __post_init__(self):
        """Validate the sequence."""
        object.__setattr__(self, 'frames', tuple(self.frames))
        if not self.frames:
            raise ValidationError('pose sequence is empty')
        if not (math.isfinite(self.fps) and self.fps > 0):
            raise ValidationError(f'fps must be positive, got {self.fps}')
        njoints = self.frames[0].n_joints
        for num, frame in enumerate(self.frames):
            if frame.n_joints != njoints:
                raise ParseError(f'{frame.n_joints} joints, expected '
                                 f'{njoints}', frame=num)

    def __len__(self):
        """Return the number of frames."""
        return len(self.frames)

    def __getitem__(self, index):
        """Return frame index."""
        return self.frames[index]

    def __iter__(self):
        """Iterate over frames."""
        return iter(self.frames)

    @property
    def n_joints(self):
        """Return the joint count shared by all frames."""
        return self.frames[0].n_joints

    @property
    def duration(self):
        """Return the duration in seconds."""
        return len(self) / self.fps

    def to_dict(self):
        """Return the JSON document."""
        return {'fps': self.fps, 'joints': self.n_joints,
                'frames': [frame.to_dict() for frame in self.frames]}

    def save(self, path):
        """Write the sequence as JSON."""
        utils.write_json(path, self.to_dict())


def _parse_frame(num, data, njoints):
    if not isinstance(data, dict):
        raise ParseError('expected an object', frame=num)
    missing = [key for key in FRAME_KEYS if key not in data]
    if missing:
        raise ParseError(f'missing fields {missing}', frame=num)
    unknown = sorted(set(data) - set(FRAME_KEYS))
    if unknown:
        raise ParseError(f'unknown fields {unknown}', frame=num)
    try:
        rotations = np.array(data['joint_rotations'], dtype=float)
        root = np.array(data['root_rotation'], dtype=float)
        trans = np.array(data['root_translation'], dtype=float)
        scale = float(data['scale'])
    except (TypeError, ValueError) as exc:
        raise ParseError(f'malformed numbers ({exc})', frame=num) from exc
    if rotations.shape != (njoints, 3):
        raise ParseError(f'joint_rotations has shape {rotations.shape}, '
                         f'expected ({njoints}, 3)', frame=num)
    for array in (rotations, root, trans, np.array([scale])):
        if not np.all(np.isfinite(array)):
            raise ParseError('non-finite value', frame=num)
    try:
        return PoseParams(rotations, root, trans, scale)
    except ValidationError as exc:
        raise ParseError(str(exc), frame=num) from exc


def parse_pose_sequence(doc):
    """Validate a decoded pose-sequence JSON document."""
    if not isinstance(doc, dict):
        raise ParseError('pose sequence must be a JSON object')
    for key in ('fps', 'joints', 'frames'):
        if key not in doc:
            raise ParseError(f'missing field {key!r}')
    njoints, frames = doc['joints'], doc['frames']
    if isinstance(njoints, bool) or not isinstance(njoints, int) or \
       njoints < 1:
        raise ParseError('joints must be a positive integer')
    if not isinstance(frames, list) or not frames:
        raise ParseError('frames must be a non-empty list')
    try:
        fps = float(doc['fps'])
    except (TypeError, ValueError) as exc:
        raise ParseError('fps must be a number') from exc
    if not (math.isfinite(fps) and fps > 0):
        raise ParseError(f'fps must be positive, got {fps}')
    poses = [_parse_frame(num, data, njoints)
             for num, data in enumerate(frames)]
    return PoseSequence(poses, fps)


def load_pose_sequence(path):
    """Read and validate a pose-sequence JSON file."""
    with open(path, encoding='utf-8') as fileobj:
        try:
            doc = json.load(fileobj)
        except json.JSONDecodeError as exc:
            raise ParseError(f'{path}: invalid JSON ({exc})') from exc
    return parse_pose_sequence(doc)


@dataclass(frozen=True)
class OrbitProtocol:
    """Azimuths start + k * step for k = 0 .. count - 1 (degrees)."""

    start_deg: float
    step_deg: float
    count: int

    def __post_init__(self):
        """Reject non-numeric angles and counts."""
        check_number('start_deg', self.start_deg)
        check_number('step_deg', self.step_deg)
        check_integer('count', self.count)

    def azimuths(self):
        """Return the list of azimuths in degrees."""
        return [self.start_deg + k * self.step_deg for k in range(self.count)]

    @classmethod
    def from_config(cls):
        """Return the protocol configured in the [orbit] section."""
        return cls(configfile.getfloat('orbit', 'start-deg'),
                   configfile.getfloat('orbit', 'step-deg'),
                   configfile.getint('orbit', 'count'))


# One frame every 12 degrees around the full circle, and 16 consecutive
# frames every 3 degrees for video metrics.
IMAGE_PROTOCOL = OrbitProtocol(0.0, 12.0, 30)
VIDEO_PROTOCOL = OrbitProtocol(150.0, 3.0, 16)


# pylint: disable=too-many-arguments
def orbit_cameras(center, radius, start_deg, step_deg, count, intrinsics):
    """Return count cameras at azimuths start + k * step around center."""
    check_integer('count', count, minimum=1)
    protocol = OrbitProtocol(start_deg, step_deg, count)
    return orbit(center, radius, protocol.azimuths(), intrinsics)


def _per_frame_cameras(cameras, nframes):
    if isinstance(cameras, Camera):
        return [cameras] * nframes
    cameras = list(cameras)
    if len(cameras) != nframes:
        raise ValidationError(f'{len(cameras)} cameras for {nframes} poses')
    return cameras


# pylint: disable=too-many-arguments
def render_imitation_sequence(model, texture, poses, cameras,
                              background=(0, 0, 0), mapped=None):
    """Render the textured model at every pose of the sequence.

    cameras is a single Camera or one per frame.
    """
    cameras = _per_frame_cameras(cameras, len(poses))
    frames = [rasterize(pose_mesh(model, pose), cam, texture, background,
                        mapped)
              for pose, cam in zip(poses, cameras)]
    log.info('rendered %d imitation frames', len(frames))
    return frames


@dataclass(frozen=True, eq=False)
class TrainingPair:
    """An intermediate rendering and its ground-truth frame."""

    intermediate: np.ndarray
    target: np.ndarray
    frame_index: int

    def __post_init__(self):
        """Check both images have the same size."""
        if np.shape(self.intermediate) != np.shape(self.target):
            raise ValidationError(f'frame {self.frame_index}: image sizes '
                                  'differ')


# pylint: disable=too-many-arguments
def make_training_pairs(model, video_frames, poses, camera, resolution,
                        inpaint_options=None, visibility_options=None,
                        background=(0, 0, 0)):
    """Pair renderings of a video's own texture with the video frames.

    The texture comes from Stage-1 on frame 0 only.
    """
    if len(video_frames) != len(poses):
        raise ValidationError(f'{len(video_frames)} video frames but '
                              f'{len(poses)} poses')
    complete, _, _ = complete_texture(video_frames[0], model, poses[0],
                                      camera, resolution, inpaint_options,
                                      visibility_options)
    mapped = build_atlas_index(model, resolution).mapped
    renders = render_imitation_sequence(model, complete, poses, camera,
                                        background, mapped)
    return [TrainingPair(frame.color, np.asarray(target, dtype=np.uint8),
                         num)
            for num, (frame, target) in enumerate(zip(renders,
                                                      video_frames))]


@dataclass(frozen=True)
class ClipSchedule:
    """Consecutive clips (start, end inclusive, condition frame or None)."""

    clip_length: int
    clips: tuple

    def __len__(self):
        """Return the number of clips."""
        return len(self.clips)

    def lengths(self):
        """Return the length of each clip."""
        return [end - start + 1 for start, end, _ in self.clips]

    def to_dict(self):
        """Return the JSON form."""
        return {'clip_length': self.clip_length,
                'clips': [{'start': start, 'end': end, 'condition': cond}
                          for start, end, cond in self.clips]}


def chunk_clips(sequence_length, clip_length):
    """Tile a sequence into clips of clip_length frames.

    Clip k > 0 is conditioned on the last frame of clip k - 1.

    >>> chunk_clips(40, 16).clips
    ((0, 15, None), (16, 31, 15), (32, 39, 31))
    """
    if sequence_length < 1 or clip_length < 1:
        raise ValidationError('sequence length and clip length must be >= 1')
    clips = []
    for start in range(0, sequence_length, clip_length):
        end = min(start + clip_length, sequence_length) - 1
        clips.append((start, end, start - 1 if start > 0 else None))
    assert clips[-1][1] == sequence_length - 1
    return ClipSchedule(clip_length, tuple(clips))
