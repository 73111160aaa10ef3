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
import copy
import numbers
import logging

import numpy as np

from tops.exceptions import DataError, ConfigError


logger = logging.getLogger(__name__)

KINDS = ('linear_regression', 'logistic_regression', 'stump', 'tree',
         'adaboost', 'random_forest')


def _format_value(value):
    if isinstance(value, float):
        return '%r' % value
    return '%s' % (value,)


class AlgorithmSpec(object):
    """A learning algorithm together with its hyperparameters.

    Two specs whose hyperparameters differ are distinct algorithms, and get
    distinct default ids:

    > AlgorithmSpec('tree').id
        'tree'
    > AlgorithmSpec('tree', {'max_depth': 3}).id
        'tree(max_depth=3)'
    """

    def __init__(self, kind, hyperparameters=None, id=None):
        if kind not in KINDS:
            raise ConfigError('unknown learner kind %r (expected one of %s)'
                              % (kind, ', '.join(KINDS)))
        self.kind = kind
        self.hyperparameters = dict(hyperparameters or {})
        for name, value in self.hyperparameters.items():
            if not isinstance(value, (numbers.Number, str, type(None))):
                raise ConfigError('%s: hyperparameter %r must be a scalar'
                                  % (kind, name))

        if id is None:
            if self.hyperparameters:
                id = '%s(%s)' % (kind, ','.join(
                    '%s=%s' % (k, _format_value(v))
                    for k, v in sorted(self.hyperparameters.items())))
            else:
                id = kind
        self.id = str(id)

    def _key(self):
        return (self.id, self.kind,
                tuple(sorted(self.hyperparameters.items())))

    def __eq__(self, other):
        return isinstance(other, AlgorithmSpec) and self._key() == other._key()

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return '<AlgorithmSpec: %s>' % self.id

    def as_dict(self):
        return {'id': self.id, 'kind': self.kind,
                'hyperparameters': dict(sorted(self.hyperparameters.items()))}

    @classmethod
    def from_dict(cls, d):
        """Build a spec from a config entry: either a kind name or a mapping
        with 'kind', optional 'id' and either 'hyperparameters' or the
        hyperparameters inline."""
        if isinstance(d, str):
            return cls(d)
        if not isinstance(d, dict) or 'kind' not in d:
            raise ConfigError('learner entry needs a "kind": %r' % (d,))
        d = dict(d)
        kind = d.pop('kind')
        id = d.pop('id', None)
        hyperparameters = d.pop('hyperparameters', None) or {}
        hyperparameters = dict(hyperparameters, **d)
        return cls(kind, hyperparameters, id)


class Predictor(object):
    """A trained model scoring feature vectors of a fixed dimension.

    Subclasses implement _score and parameters; trained_on is the id of
    the tree node whose training rows produced the predictor (None until
    the predictor is attached to a node).
    """

    kind = None

    def __init__(self, algorithm, n_features, trained_on=None):
        self.algorithm = algorithm
        self.n_features = n_features
        self.trained_on = trained_on

    def attached(self, node_id):
        """Return a copy of this predictor attached to a training node."""
        other = copy.copy(self)
        other.trained_on = node_id
        return other

    def score_many(self, features):
        x = np.asarray(features, dtype=float)
        if x.ndim == 1:
            x = x.reshape(1, -1)
        if x.shape[1] != self.n_features:
            raise DataError('predictor expects %d features, got %d'
                            % (self.n_features, x.shape[1]))
        if x.shape[0] == 0:
            return np.zeros(0)
        return self._score(x)

    def score(self, x):
        """Score one feature vector."""
        x = np.asarray(x, dtype=float)
        if x.ndim != 1:
            raise DataError('score expects a single feature vector')
        return float(self.score_many(x)[0])

    def _score(self, x):
        raise NotImplementedError('Subclasses should implement this method!')

    def parameters(self):
        """Trained state as plain lists and numbers."""
        raise NotImplementedError('Subclasses should implement this method!')

    @classmethod
    def from_parameters(cls, algorithm, n_features, parameters):
        raise NotImplementedError('Subclasses should implement this method!')

    def is_finite(self):
        return _all_finite(self.parameters())

    def as_dict(self):
        return {'algorithm': self.algorithm, 'kind': self.kind,
                'trained_on': self.trained_on, 'n_features': self.n_features,
                'parameters': self.parameters()}

    def __repr__(self):
        return '<Predictor: %s on node %s>' % (self.algorithm, self.trained_on)


def _all_finite(value):
    if isinstance(value, dict):
        return all(_all_finite(v) for v in value.values())
    if isinstance(value, (list, tuple, np.ndarray)):
        return all(_all_finite(v) for v in value)
    if isinstance(value, numbers.Number):
        return bool(np.isfinite(value))
    return True


class Learner(object):
    """Represents an interface for training algorithms.

    A learner merges its defaults with the spec's hyperparameters and
    implements fit(features, labels, seed), returning a Predictor. Fitting
    must be deterministic given the spec, the sample and the seed.
    """

    kind = None
    defaults = {}

    def __init__(self, spec):
        unknown = set(spec.hyperparameters) - set(self.defaults)
        if unknown:
            raise ConfigError('%s: unknown hyperparameters %s'
                              % (spec.kind, ', '.join(sorted(unknown))))
        self.spec = spec
        self.params = dict(self.defaults)
        self.params.update(spec.hyperparameters)

    def fit(self, features, labels, seed=0):
        raise NotImplementedError('Subclasses should implement this method!')
