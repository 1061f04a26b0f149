# Copyright (C) 2022 Ben Elliston
# Copyright (C) 2026 The imitator developers
#
# This file is free software; you can redistribute it and/or modify it
# under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.

"""Useful internal types."""

import numbers


class ValidationError(ValueError):
    """An input violates a documented precondition."""


class ParseError(ValidationError):
    """A pose file (or similar) could not be parsed.

    >>> str(ParseError('non-finite joint_rotations', frame=5))
    'frame 5: non-finite joint_rotations'
    """

    def __init__(self, message, frame=None):
        """Construct a parse error, optionally citing a frame index."""
        self.frame = frame
        if frame is not None:
            message = f'frame {frame}: {message}'
        ValidationError.__init__(self, message)


class BehindCameraError(ValueError):
    """A point lies at or behind the camera near plane."""


def check_number(name, value):
    """Raise ValidationError unless value is a real number (not a bool)."""
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ValidationError(f'{name} must be a number, got {value!r}')


def check_integer(name, value, minimum=None):
    """Raise ValidationError unless value is an integer >= minimum."""
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ValidationError(f'{name} must be an integer, got {value!r}')
    if minimum is not None and value < minimum:
        raise ValidationError(f'{name} must be >= {minimum}, got {value}')
