# Copyright (C) 2026 The imitator developers
#
# This file is free software; you can redistribute it and/or modify it
# under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.

"""A testsuite for the metrics module."""

import json
import math
import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from imitator import metrics
from imitator.types import ValidationError


def _horn_rotation(pred, gt):
    """Return the best rotation by the unit-quaternion method."""
    cov = (pred - pred.mean(axis=0)).T @ (gt - gt.mean(axis=0))
    (sxx, sxy, sxz), (syx, syy, syz), (szx, szy, szz) = cov
    nmat = np.array([
        [sxx + syy + szz, syz - szy, szx - sxz, sxy - syx],
        [syz - szy, sxx - syy - szz, sxy + syx, szx + sxz],
        [szx - sxz, sxy + syx, -sxx + syy - szz, syz + szy],
        [sxy - syx, szx + sxz, syz + szy, -sxx - syy + szz]])
    _, vectors = np.linalg.eigh(nmat)
    w, x, y, z = vectors[:, -1]
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)]])


def _similar(points, seed):
    """Return a random similarity transform of points."""
    rng = np.random.default_rng(seed)
    rotation = Rotation.random(random_state=seed).as_matrix()
    scale = rng.uniform(0.5, 2.0)
    translation = rng.normal(size=3)
    return scale * points @ rotation.T + translation, \
        (scale, rotation, translation)


class TestImageMetrics(unittest.TestCase):
    """Tests for psnr(), ssim() and l1()."""

    def setUp(self):
        """Make a random test image."""
        rng = np.random.default_rng(7)
        self.image = rng.integers(0, 256, size=(32, 32, 3)).astype(np.uint8)

    def test_psnr_identical(self):
        """Test identical images have infinite PSNR."""
        self.assertEqual(metrics.psnr(self.image, self.image), math.inf)

    def test_psnr_extremes(self):
        """Test black against white is 0 dB."""
        black = np.zeros((8, 8, 3))
        self.assertAlmostEqual(metrics.psnr(black, black + 255), 0.0)

    def test_psnr_half(self):
        """Test an error of half the peak is about 6.02 dB."""
        black = np.zeros((8, 8, 3))
        self.assertAlmostEqual(metrics.psnr(black, black + 127.5), 6.0206,
                               places=4)

    def test_psnr_noise(self):
        """Test PSNR falls as the noise grows."""
        rng = np.random.default_rng(3)
        base = self.image.astype(float)
        values = [metrics.psnr(base, base + rng.normal(0, sigma, base.shape))
                  for sigma in (1, 5, 20)]
        self.assertGreater(values[0], values[1])
        self.assertGreater(values[1], values[2])

    def test_ssim_identical(self):
        """Test SSIM of an image with itself is 1."""
        self.assertAlmostEqual(metrics.ssim(self.image, self.image), 1.0)

    def test_ssim_constant(self):
        """Test SSIM of two flat images."""
        const1 = (0.01 * 255) ** 2
        black = np.zeros((16, 16, 3))
        self.assertAlmostEqual(metrics.ssim(black, black + 255),
                               const1 / (255 ** 2 + const1))

    def test_ssim_symmetric(self):
        """Test SSIM does not depend on argument order."""
        other = np.roll(self.image, 3, axis=1)
        self.assertAlmostEqual(metrics.ssim(self.image, other),
                               metrics.ssim(other, self.image))
        self.assertLess(metrics.ssim(self.image, other), 1.0)

    def test_ssim_greyscale(self):
        """Test a 2D image is accepted."""
        grey = self.image[:, :, 0]
        self.assertAlmostEqual(metrics.ssim(grey, grey), 1.0)

    def test_ssim_small(self):
        """Test images smaller than the window are rejected."""
        small = np.zeros((8, 8, 3))
        with self.assertRaises(ValidationError):
            metrics.ssim(small, small)

    def test_l1(self):
        """Test L1 on identical, opposite and half-differing images."""
        black = np.zeros((8, 8, 3), np.uint8)
        white = black + 255
        half = black.copy()
        half[:4] = 255
        self.assertEqual(metrics.l1(black, black), 0.0)
        self.assertEqual(metrics.l1(black, white), 1.0)
        self.assertEqual(metrics.l1(black, half), 0.5)

    def test_shape_mismatch(self):
        """Test images of different sizes are rejected."""
        with self.assertRaises(ValidationError):
            metrics.psnr(self.image, self.image[1:])


class TestVertexMetrics(unittest.TestCase):
    """Tests for mpvpe(), procrustes() and pa_mpvpe()."""

    def setUp(self):
        """Make a random vertex cloud."""
        self.points = np.random.default_rng(11).normal(size=(200, 3))

    def test_mpvpe_offset(self):
        """Test a 3-4-5 offset is 5 mm."""
        moved = self.points + (0.003, 0.004, 0)
        self.assertAlmostEqual(metrics.mpvpe(moved, self.points), 5.0)

    def test_mpvpe_mismatch(self):
        """Test vertex sets of different sizes are rejected."""
        with self.assertRaises(ValidationError):
            metrics.mpvpe(self.points, self.points[1:])

    def test_recovery(self):
        """Test procrustes() recovers a known similarity."""
        for seed in range(100):
            gt, (scale, rotation, translation) = _similar(self.points, seed)
            found = metrics.procrustes(self.points, gt)
            self.assertAlmostEqual(found[0], scale, delta=1e-6)
            self.assertTrue(np.allclose(found[1], rotation, atol=1e-6))
            self.assertTrue(np.allclose(found[2], translation, atol=1e-6))
            self.assertLess(metrics.pa_mpvpe(self.points, gt), 1e-6)

    def test_proper_rotation(self):
        """Test the rotation is proper even for a mirrored target."""
        mirrored = self.points * (-1, 1, 1)
        _, rotation, _ = metrics.procrustes(self.points, mirrored)
        self.assertAlmostEqual(np.linalg.det(rotation), 1.0)
        self.assertTrue(np.allclose(rotation @ rotation.T, np.eye(3)))

    def test_quaternion_agreement(self):
        """Test the rotation matches the quaternion solution under noise."""
        rng = np.random.default_rng(5)
        for seed in range(20):
            gt, _ = _similar(self.points, seed)
            gt = gt + rng.normal(0, 0.05, gt.shape)
            scale, rotation, _ = metrics.procrustes(self.points, gt)
            horn = _horn_rotation(self.points, gt)
            self.assertTrue(np.allclose(rotation, horn, atol=1e-8))
            centred_p = self.points - self.points.mean(axis=0)
            centred_g = gt - gt.mean(axis=0)
            expected = np.sum(centred_g * (centred_p @ horn.T)) / \
                np.sum(centred_p ** 2)
            self.assertAlmostEqual(scale, expected, delta=1e-8)

    def test_alignment_helps(self):
        """Test alignment never hurts a transformed noisy copy."""
        rng = np.random.default_rng(9)
        for seed in range(100):
            gt, _ = _similar(self.points, seed)
            pred = self.points + rng.normal(0, 0.01, self.points.shape)
            self.assertLessEqual(metrics.pa_mpvpe(pred, gt),
                                 metrics.mpvpe(pred, gt))

    @given(st.integers(0, 2 ** 16))
    @settings(max_examples=50, deadline=None)
    def test_similarity_invariance(self, seed):
        """Test PA-MPVPE ignores a similarity applied to the prediction."""
        rng = np.random.default_rng(seed)
        pred = self.points + rng.normal(0, 0.02, self.points.shape)
        moved, _ = _similar(pred, seed)
        self.assertAlmostEqual(metrics.pa_mpvpe(moved, self.points),
                               metrics.pa_mpvpe(pred, self.points),
                               delta=1e-6)

    def test_collinear(self):
        """Test collinear vertices are rejected."""
        line = np.outer(np.arange(10.0), (1, 2, 3))
        with self.assertRaises(ValidationError):
            metrics.procrustes(line, self.points[:10])
        with self.assertRaises(ValidationError):
            metrics.pa_mpvpe(self.points[:10], line)


class TestReport(unittest.TestCase):
    """Tests for evaluate_sequence() and MetricsReport."""

    def setUp(self):
        """Make two short sequences."""
        rng = np.random.default_rng(1)
        self.gt = [rng.integers(0, 256, size=(16, 16, 3)).astype(np.uint8)
                   for _ in range(3)]
        self.pred = [self.gt[0]] + [np.clip(frame.astype(int) + 10, 0, 255)
                                    for frame in self.gt[1:]]

    def test_counts(self):
        """Test one FrameMetrics per frame."""
        report = metrics.evaluate_sequence(self.pred, self.gt)
        self.assertEqual(len(report.per_frame), 3)
        self.assertEqual(report.infinite_psnr_frames, 1)
        self.assertIsNone(report.per_frame[0].mpvpe)

    def test_mean_skips_infinite(self):
        """Test the PSNR mean leaves identical frames out."""
        report = metrics.evaluate_sequence(self.pred, self.gt)
        finite = [f.psnr for f in report.per_frame[1:]]
        means = report.aggregates()
        self.assertAlmostEqual(means['psnr'], sum(finite) / 2)
        self.assertEqual(means['infinite_psnr_frames'], 1)

    def test_all_identical(self):
        """Test the mean PSNR is infinite when every frame matches."""
        report = metrics.evaluate_sequence(self.gt, self.gt)
        self.assertEqual(report.aggregates()['psnr'], math.inf)
        doc = report.to_dict()
        self.assertEqual(doc['mean']['psnr'], 'inf')
        self.assertEqual(doc['per_frame'][0]['psnr'], 'inf')

    def test_to_dict(self):
        """Test the JSON form is valid JSON with external slots."""
        report = metrics.evaluate_sequence(self.pred, self.gt)
        doc = json.loads(json.dumps(report.to_dict()))
        self.assertEqual(doc['frames'], 3)
        self.assertEqual(doc['units']['mpvpe'], 'mm')
        for name in metrics.EXTERNAL:
            self.assertIsNone(doc['mean'][name])

    def test_vertices(self):
        """Test vertex streams fill the vertex metrics."""
        points = np.random.default_rng(2).normal(size=(50, 3))
        verts = [points, points + 0.001, points * 1.1]
        report = metrics.evaluate_sequence(self.pred, self.gt, verts,
                                           [points] * 3)
        self.assertAlmostEqual(report.per_frame[0].mpvpe, 0.0)
        self.assertAlmostEqual(report.per_frame[1].pa_mpvpe, 0.0, places=6)
        self.assertIn('MPVPE', str(report))

    def test_errors(self):
        """Test mismatched inputs are rejected."""
        with self.assertRaises(ValidationError):
            metrics.evaluate_sequence(self.pred[:2], self.gt)
        points = np.zeros((5, 3))
        with self.assertRaises(ValidationError):
            metrics.evaluate_sequence(self.pred, self.gt, [points] * 3)
        with self.assertRaises(ValidationError):
            metrics.evaluate_sequence(self.pred, self.gt, [points] * 2,
                                      [points] * 2)

    def test_table(self):
        """Test the table has a row per frame and the mean."""
        report = metrics.evaluate_sequence(self.pred, self.gt)
        lines = report.table().splitlines()
        self.assertEqual(len(lines), 5)
        self.assertIn('PSNR', lines[0])
        self.assertIn('FVD', lines[0])
        self.assertTrue(lines[-1].startswith('mean'))

    def test_str(self):
        """Test the summary text."""
        report = metrics.evaluate_sequence(self.pred, self.gt)
        text = str(report)
        self.assertIn('Frames: 3', text)
        self.assertIn('1 identical frames', text)
        self.assertEqual(str(metrics.MetricsReport([])), 'No frames')
