# Copyright (C) 2017 Ben Elliston
# Copyright (C) 2026 The imitator developers
#
# This file is free software; you can redistribute it and/or modify it
# under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.

"""Utility functions (eg, image files, checksums, contact sheets)."""

import contextlib
import hashlib
import json
import math
import os
import tempfile

import matplotlib.pyplot as plt
import numpy as np
from PIL import Image

FRAME_DIGITS = 6


def frame_name(index, prefix='frame'):
    """Return the file name of a numbered frame.

    >>> frame_name(1)
    'frame_000001.png'
    >>> frame_name(12, prefix='inter')
    'inter_000012.png'
    """
    return f'{prefix}_{index:0{FRAME_DIGITS}d}.png'


@contextlib.contextmanager
def atomic_write(path, mode='wb'):
    """Write to a temporary file, then rename it to path on success."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmpname = tempfile.mkstemp(dir=directory, prefix='.tmp-')
    try:
        encoding = None if 'b' in mode else 'utf-8'
        with os.fdopen(fd, mode, encoding=encoding) as fileobj:
            yield fileobj
        os.chmod(tmpname, 0o644)
        os.replace(tmpname, path)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmpname)
        raise


def write_png(path, array):
    """Write a uint8 RGB (H, W, 3) or greyscale (H, W) array as PNG."""
    array = np.asarray(array)
    if array.dtype != np.uint8:
        raise ValueError(f'{path}: PNG data must be uint8')
    image = Image.fromarray(array)
    with atomic_write(path) as fileobj:
        image.save(fileobj, format='PNG')


def read_png(path, mode='RGB'):
    """Read a PNG (converted to mode) into a uint8 array."""
    with Image.open(path) as image:
        return np.array(image.convert(mode), dtype=np.uint8)


def write_json(path, obj):
    """Write obj as indented, key-sorted JSON."""
    text = json.dumps(obj, indent=2, sort_keys=True) + '\n'
    with atomic_write(path, 'w') as fileobj:
        fileobj.write(text)


def read_json(path):
    """Read a JSON document."""
    with open(path, encoding='utf-8') as fileobj:
        return json.load(fileobj)


def sha256sum(path):
    """Return the hex SHA-256 digest of a file."""
    digest = hashlib.sha256()
    with open(path, 'rb') as fileobj:
        for chunk in iter(lambda: fileobj.read(1 << 16), b''):
            digest.update(chunk)
    return digest.hexdigest()


def contact_sheet(images, filename, columns=None, titles=None):
    """Tile a list of RGB images into one figure and save it."""
    if not images:
        raise ValueError('no images for contact sheet')
    if columns is None:
        columns = math.ceil(math.sqrt(len(images)))
    rows = math.ceil(len(images) / columns)
    fig, axes = plt.subplots(rows, columns, squeeze=False,
                             figsize=(2 * columns, 2 * rows))
    for num, axis in enumerate(axes.flat):
        axis.set_axis_off()
        if num < len(images):
            axis.imshow(images[num])
            if titles is not None:
                axis.set_title(titles[num], fontsize='small')
    fig.tight_layout()
    fmt = os.path.splitext(filename)[1][1:] or 'png'
    try:
        with atomic_write(filename) as fileobj:
            fig.savefig(fileobj, format=fmt)
    finally:
        plt.close(fig)
