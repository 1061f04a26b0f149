# Copyright (C) 2026 The imitator developers
#
# This file is free software; you can redistribute it and/or modify it
# under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.

"""
Image similarity and pose accuracy metrics.

Images are compared on the 0..255 scale.  Vertex errors are computed
in metres and reported in millimetres.  Metrics that need pretrained
networks (FID, LPIPS, FID-VID, FVD) are not computed; the report keeps
empty slots for them so external values can be merged in.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
import pint
from scipy.signal import convolve2d

from imitator.types import ValidationError

ureg = pint.UnitRegistry()
ureg.default_format = '.2f~P'

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03
PEAK = 255.0

# Table column order; None marks metrics this package does not compute.
COLUMNS = ('PSNR', 'SSIM', 'FID', 'LPIPS', 'L1', 'FID-VID', 'FVD',
           'MPVPE', 'PA-MPVPE')
EXTERNAL = ('fid', 'lpips', 'fid_vid', 'fvd')


def _image(array):
    return np.asarray(getattr(array, 'color', array), dtype=float)


def _pair(first, second):
    first, second = _image(first), _image(second)
    if first.shape != second.shape:
        raise ValidationError(f'image shapes differ: {first.shape} vs '
                              f'{second.shape}')
    return first, second


def psnr(first, second, peak=PEAK):
    """Return the peak signal-to-noise ratio in dB (inf if identical).

    >>> psnr(np.zeros((4, 4, 3)), np.full((4, 4, 3), 255.0))
    0.0
    """
    first, second = _pair(first, second)
    mse = np.mean((first - second) ** 2)
    if mse == 0:
        return math.inf
    return float(10 * np.log10(peak ** 2 / mse))


def _gaussian_window(size=SSIM_WINDOW, sigma=SSIM_SIGMA):
    """Return a normalised 2D Gaussian window."""
    offsets = np.arange(size) - (size - 1) / 2
    kernel = np.exp(-(offsets[:, None] ** 2 + offsets[None, :] ** 2) /
                    (2 * sigma ** 2))
    return kernel / kernel.sum()


def _ssim_channel(first, second, window):
    const1 = (SSIM_K1 * PEAK) ** 2
    const2 = (SSIM_K2 * PEAK) ** 2

    def filt(image):
        return convolve2d(image, window, mode='valid')

    mu1, mu2 = filt(first), filt(second)
    var1 = filt(first * first) - mu1 * mu1
    var2 = filt(second * second) - mu2 * mu2
    cov = filt(first * second) - mu1 * mu2
    ssim_map = ((2 * mu1 * mu2 + const1) * (2 * cov + const2)) / \
        ((mu1 * mu1 + mu2 * mu2 + const1) * (var1 + var2 + const2))
    return float(ssim_map.mean())


def ssim(first, second):
    """Return the structural similarity, averaged over colour channels."""
    first, second = _pair(first, second)
    if first.ndim not in (2, 3):
        raise ValidationError('expected a greyscale or RGB image')
    if first.shape[0] < SSIM_WINDOW or first.shape[1] < SSIM_WINDOW:
        raise ValidationError(f'image smaller than the {SSIM_WINDOW}x'
                              f'{SSIM_WINDOW} window')
    window = _gaussian_window()
    if first.ndim == 2:
        return _ssim_channel(first, second, window)
    return math.fsum(_ssim_channel(first[:, :, c], second[:, :, c], window)
                     for c in range(first.shape[2])) / first.shape[2]


def l1(first, second):  # pylint: disable=invalid-name
    """Return the mean absolute per-channel difference scaled to [0, 1]."""
    first, second = _pair(first, second)
    return float(np.mean(np.abs(first - second)) / PEAK)


def _vertices(pred, gt):
    pred = np.asarray(pred, dtype=float)
    gt = np.asarray(gt, dtype=float)
    if pred.ndim != 2 or pred.shape[1] != 3 or pred.shape != gt.shape:
        raise ValidationError(f'vertex sets differ: {pred.shape} vs '
                              f'{gt.shape}')
    return pred, gt


def mpvpe(pred, gt):
    """Return the mean per-vertex position error in millimetres."""
    pred, gt = _vertices(pred, gt)
    return float(np.linalg.norm(pred - gt, axis=1).mean() * 1000)


def _check_spread(points, name):
    centred = points - points.mean(axis=0)
    sv = np.linalg.svd(centred, compute_uv=False)
    if len(points) < 3 or sv[0] == 0 or sv[1] <= 1e-12 * sv[0]:
        raise ValidationError(f'{name} vertices are collinear')


def procrustes(pred, gt):
    """Return the similarity (scale, rotation, translation) taking pred to gt.

    Least squares over all vertices, with the reflection removed so the
    rotation is proper.
    """
    pred, gt = _vertices(pred, gt)
    _check_spread(pred, 'predicted')
    _check_spread(gt, 'ground-truth')
    mean_p, mean_g = pred.mean(axis=0), gt.mean(axis=0)
    centred_p, centred_g = pred - mean_p, gt - mean_g
    var_p = np.mean(np.sum(centred_p ** 2, axis=1))
    cov = centred_g.T @ centred_p / len(pred)
    left, sing, right_t = np.linalg.svd(cov)
    sign = np.eye(3)
    if np.linalg.det(left) * np.linalg.det(right_t) < 0:
        sign[2, 2] = -1
    rotation = left @ sign @ right_t
    scale = np.trace(np.diag(sing) @ sign) / var_p
    translation = mean_g - scale * rotation @ mean_p
    return float(scale), rotation, translation


def pa_mpvpe(pred, gt):
    """Return the error after similarity (Procrustes) alignment, in mm."""
    scale, rotation, translation = procrustes(pred, gt)
    aligned = scale * np.asarray(pred, dtype=float) @ rotation.T + \
        translation
    return mpvpe(aligned, gt)


@dataclass
class FrameMetrics:
    """Metrics of one frame."""

    psnr: float
    ssim: float
    l1: float
    mpvpe: float = None
    pa_mpvpe: float = None

    def to_dict(self):
        """Return a JSON-ready dict (infinite PSNR as the string 'inf')."""
        return {'psnr': 'inf' if math.isinf(self.psnr) else self.psnr,
                'ssim': self.ssim, 'l1': self.l1,
                'mpvpe': self.mpvpe, 'pa_mpvpe': self.pa_mpvpe}


def _mean(values):
    values = [v for v in values if v is not None]
    return math.fsum(values) / len(values) if values else None


@dataclass
class MetricsReport:
    """Per-frame metrics and their means."""

    per_frame: list
    external: dict = field(default_factory=lambda: dict.fromkeys(EXTERNAL))

    @property
    def infinite_psnr_frames(self):
        """Return the number of frames with identical images."""
        return sum(math.isinf(f.psnr) for f in self.per_frame)

    def aggregates(self):
        """Return means over frames; infinite PSNR frames are left out."""
        finite = [f.psnr for f in self.per_frame if not math.isinf(f.psnr)]
        mean_psnr = _mean(finite)
        if mean_psnr is None and self.per_frame:
            mean_psnr = math.inf
        return {'psnr': mean_psnr,
                'ssim': _mean(f.ssim for f in self.per_frame),
                'l1': _mean(f.l1 for f in self.per_frame),
                'mpvpe': _mean(f.mpvpe for f in self.per_frame),
                'pa_mpvpe': _mean(f.pa_mpvpe for f in self.per_frame),
                'infinite_psnr_frames': self.infinite_psnr_frames}

    def to_dict(self):
        """Return the JSON form, with units."""
        means = self.aggregates()
        if means['psnr'] is not None and math.isinf(means['psnr']):
            means['psnr'] = 'inf'
        means.update(self.external)
        return {'units': {'psnr': 'dB', 'ssim': '1', 'l1': '1',
                          'mpvpe': 'mm', 'pa_mpvpe': 'mm'},
                'frames': len(self.per_frame),
                'per_frame': [f.to_dict() for f in self.per_frame],
                'mean': means}

    def table(self):
        """Return a fixed-width table, one row per frame plus the mean."""
        rows = []
        for frame in self.per_frame:
            rows.append(self._row(frame.psnr, frame.ssim, frame.l1,
                                  frame.mpvpe, frame.pa_mpvpe))
        means = self.aggregates()
        rows.append(self._row(means['psnr'], means['ssim'], means['l1'],
                              means['mpvpe'], means['pa_mpvpe']))
        index = [f'{n:06d}' for n in range(len(self.per_frame))] + ['mean']
        frame = pd.DataFrame(rows, index=index, columns=COLUMNS,
                             dtype=float)
        return frame.to_string(na_rep='-', float_format=lambda x: f'{x:.4f}')

    def _row(self, *values):
        psnr_v, ssim_v, l1_v, mpvpe_v, pa_v = values
        ext = self.external
        return [psnr_v, ssim_v, ext['fid'], ext['lpips'], l1_v,
                ext['fid_vid'], ext['fvd'], mpvpe_v, pa_v]

    def __str__(self):
        """Summarise the means."""
        means = self.aggregates()
        if not self.per_frame:
            return 'No frames'
        string = f'Frames: {len(self.per_frame)}\n'
        string += f"PSNR: {means['psnr']:.2f} dB"
        if self.infinite_psnr_frames:
            string += f' ({self.infinite_psnr_frames} identical frames)'
        string += f"\nSSIM: {means['ssim']:.4f}\nL1: {means['l1']:.4f}"
        for name in ('mpvpe', 'pa_mpvpe'):
            if means[name] is not None:
                string += f'\n{name.upper()}: {means[name] * ureg.mm}'
        return string


def evaluate_sequence(pred_frames, gt_frames, pred_vertices=None,
                      gt_vertices=None):
    """Score predicted frames and optional vertex streams against truth."""
    if len(pred_frames) != len(gt_frames):
        raise ValidationError(f'{len(pred_frames)} predicted frames but '
                              f'{len(gt_frames)} ground-truth frames')
    if (pred_vertices is None) != (gt_vertices is None):
        raise ValidationError('both vertex streams are needed')
    if pred_vertices is not None and \
       not len(pred_vertices) == len(gt_vertices) == len(gt_frames):
        raise ValidationError('vertex streams must match the frame count')
    per_frame = []
    for num, (pred, gt) in enumerate(zip(pred_frames, gt_frames)):
        metrics = FrameMetrics(psnr(pred, gt), ssim(pred, gt), l1(pred, gt))
        if pred_vertices is not None:
            metrics.mpvpe = mpvpe(pred_vertices[num], gt_vertices[num])
            metrics.pa_mpvpe = pa_mpvpe(pred_vertices[num], gt_vertices[num])
        per_frame.append(metrics)
    return MetricsReport(per_frame)
