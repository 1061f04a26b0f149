# Copyright (C) 2014 The University of New South Wales
# Copyright (C) 2026 The imitator developers
#
# This file is free software; you can redistribute it and/or modify it
# under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.

"""Configuration file processing (eg, default resolutions)."""

import configparser
import os

# Built-in defaults. imitator.cfg (or $IMITATORRC) overrides these.
DEFAULTS = {
    'camera': {'width': '256', 'height': '256', 'focal': '300'},
    'texture': {'resolution': '256', 'depth-tolerance': '0.001',
                'grazing-angle-deg': '85'},
    'inpaint': {'mirror': 'true', 'max-iterations': '500',
                'epsilon': '0.05'},
    'orbit': {'start-deg': '0', 'step-deg': '12', 'count': '30',
              'margin': '1.3'},
    'motion': {'fps': '30', 'clip-length': '16'},
    'render': {'background': '0,0,0'},
}


def load(filename):
    """Load a configuration file (or files)."""
    result = config.read(filename)
    if not result:
        raise FileNotFoundError(f"config file {filename} not found")
    # Verify
    config.getint('camera', 'width')
    config.getint('texture', 'resolution')
    config.getfloat('texture', 'depth-tolerance')
    config.getint('motion', 'clip-length')


def get(section, option):
    """
    Get an option value for the named section.

    This works the same as ConfigParser.get.
    """
    return config.get(section, option)


def getint(section, option):
    """Get an integer option value."""
    return config.getint(section, option)


def getfloat(section, option):
    """Get a floating point option value."""
    return config.getfloat(section, option)


def getboolean(section, option):
    """Get a boolean option value (true/false, yes/no, on/off)."""
    return config.getboolean(section, option)


def getcolor(section, option):
    """Get an RGB triple written as r,g,b.

    >>> getcolor('render', 'background')
    (0, 0, 0)
    """
    return tuple(int(c) for c in config.get(section, option).split(','))


def has_option_p(section, option):
    """
    Check if this section has a given option.

    This works the same as ConfigParser.has_option.
    """
    return config.has_option(section, option)


def reset():
    """Discard loaded files and return to the built-in defaults."""
    config.clear()
    config.read_dict(DEFAULTS)


config = configparser.ConfigParser()
config.read_dict(DEFAULTS)

# If $IMITATORRC is set, use that as the config filename.
if os.getenv('IMITATORRC') is not None:
    load(os.getenv('IMITATORRC'))
elif os.path.exists('imitator.cfg'):
    load('imitator.cfg')
