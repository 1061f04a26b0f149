# Copyright (C) 2011, 2012, 2014 Ben Elliston
# Copyright (C) 2014, 2015, 2016 The University of New South Wales
# Copyright (C) 2026 The imitator developers
#
# This file is free software; you can redistribute it and/or modify it
# under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.

"""
Implementation of the Context class.

A pipeline context encapsulates all run state so that nothing is left
behind after a run.  It also allows runs to be compared afterwards.
"""

import dataclasses
import json
import math
from dataclasses import dataclass, field

import pint

from imitator import configfile
from imitator.body import build_canonical_humanoid
from imitator.motion import OrbitProtocol
from imitator.texture import InpaintOptions, VisibilityOptions
from imitator.types import ValidationError

ureg = pint.UnitRegistry()
ureg.default_format = '.2f~P'


@dataclass(frozen=True)
class PipelineConfig:
    """Per-run settings; flags on the command line override these."""

    # pylint: disable=too-many-instance-attributes
    texture_resolution: int = field(
        default_factory=lambda: configfile.getint('texture', 'resolution'))
    inpaint: InpaintOptions = field(default_factory=InpaintOptions.from_config)
    visibility: VisibilityOptions = field(
        default_factory=VisibilityOptions.from_config)
    orbit: OrbitProtocol = field(default_factory=OrbitProtocol.from_config)
    clip_length: int = field(
        default_factory=lambda: configfile.getint('motion', 'clip-length'))
    out_dir: str = 'out'
    background: tuple = field(
        default_factory=lambda: configfile.getcolor('render', 'background'))
    seed: int = 0

    def __post_init__(self):
        """Validate values and build nested option objects from dicts."""
        setter = object.__setattr__
        nested = {'inpaint': InpaintOptions, 'visibility': VisibilityOptions,
                  'orbit': OrbitProtocol}
        for name, cls in nested.items():
            value = getattr(self, name)
            if isinstance(value, dict):
                known = {f.name for f in dataclasses.fields(cls)}
                unknown = sorted(set(value) - known)
                if unknown:
                    raise ValidationError(f'{name}: unknown keys {unknown}')
                try:
                    setter(self, name, cls(**value))
                except TypeError as exc:
                    raise ValidationError(f'{name}: {exc}') from exc
        for name in ('texture_resolution', 'clip_length'):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or \
               value < 1:
                raise ValidationError(f'{name} must be an integer >= 1')
        if self.texture_resolution < 8:
            raise ValidationError('texture_resolution must be >= 8')
        if not isinstance(self.background, (list, tuple)):
            raise ValidationError('background must be three integers 0..255')
        background = tuple(self.background)
        if len(background) != 3 or \
           not all(isinstance(c, int) and 0 <= c <= 255 for c in background):
            raise ValidationError('background must be three integers 0..255')
        setter(self, 'background', background)
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise ValidationError('seed must be an integer')

    @classmethod
    def from_dict(cls, data):
        """Construct from a dict, rejecting unknown keys."""
        if not isinstance(data, dict):
            raise ValidationError('pipeline config must be a JSON object')
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValidationError(f'unknown config keys {unknown}')
        return cls(**data)

    @classmethod
    def load(cls, path):
        """Read a pipeline config from a JSON file."""
        with open(path, encoding='utf-8') as fileobj:
            return cls.from_dict(json.load(fileobj))

    def override(self, **changes):
        """Return a copy with the non-None changes applied."""
        return dataclasses.replace(
            self, **{k: v for k, v in changes.items() if v is not None})

    def to_dict(self):
        """Return the JSON form."""
        result = dataclasses.asdict(self)
        result['background'] = list(self.background)
        return result


class Context():
    """All pipeline state is kept in a Context object."""

    # pylint: disable=too-many-instance-attributes
    def __init__(self, config=None, model=None):
        """Initialise a context (default config and humanoid if omitted)."""
        self.config = config or PipelineConfig()
        self.model = model or build_canonical_humanoid()
        self.verbose = False
        self.texture = None
        self.partial = None
        self.mask = None
        self.coverage = math.nan
        self.schedule = None
        self.frames = []
        self.duration = None
        self.timings = {}
        self.stage1_runs = 0

    def add_timing(self, stage, seconds):
        """Accumulate wall-clock seconds spent in a stage."""
        self.timings[stage] = self.timings.get(stage, 0.0) + seconds

    def summary(self):
        """Return the run summary as a JSON-ready dict."""
        return {'frames': len(self.frames),
                'duration_s': self.duration,
                'stage1_runs': self.stage1_runs,
                'texture_coverage': None if math.isnan(self.coverage)
                else self.coverage,
                'timings': dict(self.timings),
                'clip_schedule': None if self.schedule is None
                else self.schedule.to_dict(),
                'config': self.config.to_dict()}

    def __str__(self):
        """Make a human-readable representation of the context."""
        string = f'Texture resolution: {self.config.texture_resolution}\n'
        if self.verbose:
            string += f'Inpainting: {self.config.inpaint}\n'
            string += f'Visibility: {self.config.visibility}\n'
        if math.isnan(self.coverage):
            string += 'No texture extracted\n'
        else:
            string += f'Texture coverage: {self.coverage * 100:.1f}%\n'
        string += f'Frames: {len(self.frames)}\n'
        if self.duration is not None:
            string += f'Duration: {self.duration * ureg.s}\n'
        if self.schedule is not None:
            lengths = '+'.join(str(n) for n in self.schedule.lengths())
            string += f'Clips: {len(self.schedule)} ({lengths})\n'
        for stage, seconds in self.timings.items():
            string += f'{stage}: {(seconds * ureg.s).to_compact()}\n'
        string += f'Stage-1 runs: {self.stage1_runs}'
        return string
