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


from __future__ import print_function, unicode_literals, division
from importlib import import_module
import logging

import yaml

from tops.exceptions import ConfigError


logger = logging.getLogger(__name__)

DEFAULTS = {
    # Tree growth.
    'MAX_DEPTH': 20,
    'MIN_LEAF_V1': 5,
    'MIN_TRAIN_SAMPLES': 10,
    'IMPROVEMENT_TOL': 1e-9,

    # Path weights.
    'WEIGHT_FIT': 'squared_error',
    'WEIGHT_MAX_ITER': 1000,
    'WEIGHT_TOL': 1e-8,
    'WEIGHT_GRID_STEP': 0.01,
    'WEIGHT_GRID_MAX_POINTS': 20000,

    # Learners.
    'LINEAR_RIDGE': 1e-8,
    'LOGISTIC_MAX_ITER': 100,
    'LOGISTIC_TOL': 1e-8,
    'LOGISTIC_L2': 1e-4,

    # Experiments.
    'RATIOS': (0.75, 0.15, 0.10),
    'N_RUNS': 10,
    'CV_FOLDS': 0,
    'TEST_FRACTION': 0.2,
    'SEED': 0,
    'JOBS': 1,

    # Bounds.
    'BOUND_DELTA': 0.05,
    'RADEMACHER_DRAWS': 20,
}

WEIGHT_FITS = ('squared_error', 'configured_loss_gridsearch')


def load_yaml(path):
    """Load a YAML mapping and the line of each of its top-level keys.

    :path: path of the document.
    :returns: a pair (mapping, lines), where lines maps every top-level key
        to its 1-based line number.
    """
    try:
        with open(path, 'r') as infile:
            text = infile.read()
    except (IOError, OSError) as e:
        raise ConfigError('cannot read %s: %s' % (path, e))

    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, 'problem_mark', None)
        problem = getattr(e, 'problem', None) or str(e)
        raise ConfigError('%s: invalid YAML: %s' % (path, problem),
                          line=mark.line + 1 if mark is not None else None)

    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError('%s: expected a mapping at the top level' % path,
                          line=1)

    lines = {}
    if isinstance(node, yaml.MappingNode):
        for key_node, _ in node.value:
            lines[key_node.value] = key_node.start_mark.line + 1

    return data, lines


class Config(dict):

    """A class for storing configuration parameters. """

    def __init__(self, auto_load=True, **overrides):
        """Form a config object from DEFAULTS. If a module named tops_config
        is importable, it is loaded on top of the defaults when auto_load is
        True.
        """
        super(Config, self).__init__(DEFAULTS)
        if auto_load:
            try:
                self.from_object('tops_config')
            except ImportError:
                pass
        if overrides:
            self.from_mapping(overrides)

    def from_object(self, module_name):
        """Load a configuration from a module name.

        :module_name: The name of the module where the parameters are defined.
        """
        m = import_module(module_name)

        for var in dir(m):
            if var.isupper():
                self[var] = getattr(m, var)

    def from_mapping(self, mapping, lines=None):
        """Load parameters from a plain mapping. Keys are case-insensitive
        and must name a known parameter.

        :mapping: a dict of parameters.
        :lines: optional {key: line} map used to position errors.
        """
        lines = lines or {}
        for key, value in mapping.items():
            name = str(key).upper()
            if name not in DEFAULTS:
                raise ConfigError('unknown parameter %r' % key,
                                  line=lines.get(key))
            self[name] = value
        self.validate(lines)
        return self

    def from_yaml(self, path):
        data, lines = load_yaml(path)
        return self.from_mapping(data, lines)

    def validate(self, lines=None):
        """Check ranges of the known parameters."""
        lines = lines or {}

        def fail(name, message):
            raise ConfigError('%s: %s' % (name.lower(), message),
                              line=lines.get(name.lower(), lines.get(name)))

        for name in ('MAX_DEPTH', 'MIN_LEAF_V1', 'MIN_TRAIN_SAMPLES',
                     'WEIGHT_MAX_ITER', 'N_RUNS', 'CV_FOLDS', 'JOBS',
                     'RADEMACHER_DRAWS', 'LOGISTIC_MAX_ITER',
                     'WEIGHT_GRID_MAX_POINTS'):
            value = self[name]
            if isinstance(value, bool) or not isinstance(value, int) \
                    or value < 0:
                fail(name, 'expected a non-negative integer, got %r' % value)
        for name in ('N_RUNS', 'JOBS', 'RADEMACHER_DRAWS'):
            if self[name] < 1:
                fail(name, 'must be at least 1')
        if self['CV_FOLDS'] == 1:
            fail('CV_FOLDS', 'use 0 (off) or at least 2 folds')
        if self['WEIGHT_FIT'] not in WEIGHT_FITS:
            fail('WEIGHT_FIT', 'expected one of %s' % ', '.join(WEIGHT_FITS))
        if not 0 < float(self['BOUND_DELTA']) < 1:
            fail('BOUND_DELTA', 'must lie in (0, 1)')
        if not 0 < float(self['TEST_FRACTION']) < 1:
            fail('TEST_FRACTION', 'must lie in (0, 1)')
        ratios = self['RATIOS']
        if not isinstance(ratios, (list, tuple)) or len(ratios) != 3:
            fail('RATIOS', 'expected three proportions')

    def limits(self):
        """Return the tree growth limits as keyword arguments."""
        return {'max_depth': self['MAX_DEPTH'],
                'min_leaf_v1': self['MIN_LEAF_V1'],
                'min_train_samples': self['MIN_TRAIN_SAMPLES'],
                'improvement_tol': self['IMPROVEMENT_TOL']}


config = Config()
