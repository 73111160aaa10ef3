# -*- coding: utf-8 -*-
# tops - Trees of predictors: ensemble learning over recursive partitions.
# Copyright (C) 2024  The tops developers
#
# This program is free software: you can redistribute it and/or modify it
# under the terms of the GNU General Public License as published by the Free
# Software Foundation, either version 3 of the License, or (at your option)
# any later version.
#
# This program is distributed in the hope that it will be useful, but WITHOUT
# ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or
# FITNESS FOR A PARTICULAR PURPOSE.  See the GNU General Public License for
# more details.
#
# You should have received a copy of the GNU General Public License along with
# this program.  If not, see <http://www.gnu.org/licenses/>.


from __future__ import unicode_literals, print_function, division
import re
import json
import hashlib
import logging
from os.path import dirname, abspath, join
from sys import modules

import numpy as np


logger = logging.getLogger(__name__)
base_path = abspath(dirname(modules[__name__].__file__))

# Largest seed accepted by numpy.random.RandomState, plus one.
SEED_SPACE = 2 ** 32


def data_path(*parts):
    """Return the path of a file bundled in tops/data."""
    return join(base_path, 'data', *parts)


def is_valid_id(string):
    """Check whether a string is a valid identifier.

    :string: The string to be checked
    :returns: True if the string represents a valid id; false otherwise.
    """
    return re.match("^[_A-Za-z][_a-zA-Z0-9]*$", string) is not None


def derive_seed(*parts):
    """Derive a seed for numpy.random.RandomState from arbitrary parts.

    The same parts always give the same seed, whatever the order in which
    callers ask for them, so concurrent workers stay reproducible.

    :parts: values whose str() identifies the random stream.
    :returns: an integer in [0, 2**32).
    """
    key = '\x1f'.join(str(p) for p in parts)
    digest = hashlib.sha256(key.encode('utf-8')).hexdigest()
    return int(digest[:8], 16) % SEED_SPACE


def to_builtin(value):
    """Recursively convert numpy scalars/arrays and tuples into plain
    Python objects, so they can be dumped as YAML or JSON."""
    if isinstance(value, dict):
        return dict((to_builtin(k), to_builtin(v)) for k, v in value.items())
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_builtin(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def canonical_json(value):
    """Serialize a value as canonical JSON (sorted keys, no whitespace)."""
    return json.dumps(to_builtin(value), sort_keys=True,
                      separators=(',', ':'), allow_nan=True)


def sha256_of(value):
    return hashlib.sha256(canonical_json(value).encode('utf-8')).hexdigest()


def format_float(value, digits=6):
    """Compact float formatting for labels and tables."""
    if value is None:
        return 'n/a'
    return '%.*g' % (digits, value)
