# Copyright (C) 2017 Ben Elliston
# Copyright (C) 2026 The imitator developers
#
# This file is free software; you can redistribute it and/or modify it
# under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.

"""Geometric core of a two-stage human motion imitation pipeline."""

from imitator.context import Context, PipelineConfig
from imitator.pipeline import run, write_outputs

__all__ = ['Context', 'PipelineConfig', 'run', 'write_outputs']
