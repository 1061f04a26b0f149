# Copyright (C) 2022 Ben Elliston
# Copyright (C) 2026 The imitator developers
#
# This file is free software; you can redistribute it and/or modify it
# under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.

"""A testsuite for the Context class."""

import json
import os
import tempfile
import unittest

import imitator
from imitator.motion import OrbitProtocol, chunk_clips
from imitator.texture import InpaintOptions
from imitator.types import ValidationError


class TestPipelineConfig(unittest.TestCase):
    """Tests for PipelineConfig."""

    def test_defaults(self):
        """Test defaults come from the configuration file."""
        config = imitator.PipelineConfig()
        self.assertEqual(config.texture_resolution, 256)
        self.assertEqual(config.clip_length, 16)
        self.assertEqual(config.background, (0, 0, 0))
        self.assertEqual(config.orbit, OrbitProtocol(0, 12, 30))
        self.assertTrue(config.inpaint.mirror)

    def test_nested_dicts(self):
        """Test nested options are built from dicts."""
        config = imitator.PipelineConfig.from_dict(
            {'inpaint': {'mirror': False, 'max_iterations': 10,
                         'epsilon': 0.1},
             'orbit': {'start_deg': 150, 'step_deg': 3, 'count': 16},
             'background': [255, 255, 255]})
        self.assertEqual(config.inpaint, InpaintOptions(False, 10, 0.1))
        self.assertEqual(config.orbit.azimuths()[-1], 195)
        self.assertEqual(config.background, (255, 255, 255))

    def test_invalid(self):
        """Test bad values are rejected."""
        bad = [{'texture_resolution': 4}, {'clip_length': 0},
               {'background': [0, 0]}, {'background': [0, 0, 256]},
               {'seed': 'x'}, {'resolution': 64},
               {'inpaint': {'mirrored': True}}, {'background': 0},
               {'inpaint': {'epsilon': 'a'}}, {'orbit': {'count': 3}},
               {'visibility': {'depth_tolerance': '1mm'}}]
        for data in bad:
            with self.assertRaises(ValidationError, msg=str(data)):
                imitator.PipelineConfig.from_dict(data)

    def test_override(self):
        """Test None leaves a value unchanged."""
        config = imitator.PipelineConfig().override(
            texture_resolution=64, clip_length=None, out_dir='elsewhere')
        self.assertEqual(config.texture_resolution, 64)
        self.assertEqual(config.clip_length, 16)
        self.assertEqual(config.out_dir, 'elsewhere')
        with self.assertRaises(ValidationError):
            config.override(texture_resolution=2)

    def test_load(self):
        """Test to_dict() output can be read back."""
        config = imitator.PipelineConfig(texture_resolution=128, seed=7)
        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, 'config.json')
            with open(path, 'w', encoding='utf-8') as out:
                json.dump(config.to_dict(), out)
            self.assertEqual(imitator.PipelineConfig.load(path), config)


class TestContextMethods(unittest.TestCase):
    """Tests for Context methods."""

    def setUp(self):
        """Test harness setup."""
        self.context = imitator.Context(
            imitator.PipelineConfig(texture_resolution=64))

    def test_fresh(self):
        """Test a new context has no texture or frames."""
        self.assertIsNone(self.context.texture)
        self.assertEqual(self.context.frames, [])
        self.assertEqual(self.context.stage1_runs, 0)
        self.assertEqual(self.context.model.n_joints, 17)

    def test_timing(self):
        """Test timings accumulate per stage."""
        self.context.add_timing('stage2', 0.5)
        self.context.add_timing('stage2', 0.25)
        self.assertEqual(self.context.timings, {'stage2': 0.75})

    def test_summary(self):
        """Test the summary is JSON-ready."""
        self.context.schedule = chunk_clips(20, 16)
        summary = json.loads(json.dumps(self.context.summary()))
        self.assertIsNone(summary['texture_coverage'])
        self.assertEqual(summary['frames'], 0)
        self.assertEqual(len(summary['clip_schedule']['clips']), 2)
        self.assertEqual(summary['config']['texture_resolution'], 64)

    def test_str(self):
        """Test __str__ method."""
        output = str(self.context)
        self.assertIn('Texture resolution: 64', output)
        self.assertIn('No texture extracted', output)
        self.assertNotIn('Inpainting', output)
        self.assertTrue(output.endswith('Stage-1 runs: 0'))
        self.assertNotIn('Duration', output)

    def test_str_verbose(self):
        """Test __str__ method with verbose output."""
        self.context.verbose = True
        self.context.coverage = 0.5
        self.context.schedule = chunk_clips(20, 16)
        self.context.duration = 20 / 30
        self.context.add_timing('stage1', 0.002)
        output = str(self.context)
        self.assertIn('Inpainting: InpaintOptions', output)
        self.assertIn('Texture coverage: 50.0%', output)
        self.assertIn('Clips: 2 (16+4)', output)
        self.assertIn('Duration: 0.67 s', output)
        self.assertRegex(output, r'stage1: [12]\.\d+ m')
