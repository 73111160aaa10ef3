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
import math
import logging

import numpy as np
from scipy.special import expit

from tops.exceptions import ConfigError
from tops.learners.api import Learner, Predictor
from tops.learners.trees import RegressionTree, grow_tree


logger = logging.getLogger(__name__)

# Bounds of the LogitBoost working response.
MAX_RESPONSE = 4.0


class BoostedPredictor(Predictor):
    """Stagewise sum of stumps.

    Discrete boosting maps the weighted vote F in [-sum(alpha), sum(alpha)]
    to (F / sum(alpha) + 1) / 2; the logistic variant returns
    expit(2 F). Without any round the score is the constant base value.
    """

    kind = 'adaboost'

    def __init__(self, algorithm, n_features, variant, stumps, alphas, base,
                 trained_on=None):
        super(BoostedPredictor, self).__init__(algorithm, n_features,
                                               trained_on)
        self.variant = variant
        self.stumps = list(stumps)
        self.alphas = [float(a) for a in alphas]
        self.base = float(base)

    def _score(self, x):
        if not self.stumps:
            return np.full(x.shape[0], self.base)
        f = np.zeros(x.shape[0])
        for stump, alpha in zip(self.stumps, self.alphas):
            f = f + alpha * stump.predict(x)
        if self.variant == 'logistic':
            return expit(2.0 * f)
        return (f / sum(self.alphas) + 1.0) / 2.0

    def parameters(self):
        return {'variant': self.variant, 'base': self.base,
                'alphas': list(self.alphas),
                'stumps': [s.as_dict() for s in self.stumps]}

    @classmethod
    def from_parameters(cls, algorithm, n_features, parameters):
        return cls(algorithm, n_features, parameters['variant'],
                   [RegressionTree.from_dict(s) for s in parameters['stumps']],
                   parameters['alphas'], parameters['base'])


class AdaBoost(Learner):
    """Boosting of regression stumps on thresholded labels.

    variant 'discrete' is AdaBoost on +/-1 labels; variant 'logistic'
    runs LogitBoost-style Newton steps on the logistic loss.
    """

    kind = 'adaboost'
    defaults = {'n_rounds': 50, 'variant': 'discrete'}

    def fit(self, features, labels, seed=0):
        variant = self.params['variant']
        if variant == 'discrete':
            return self._fit_discrete(features, labels)
        if variant == 'logistic':
            return self._fit_logistic(features, labels)
        raise ConfigError('adaboost: unknown variant %r' % variant)

    def _fit_discrete(self, x, labels):
        y = np.where(labels >= 0.5, 1.0, -1.0)
        w = np.full(y.size, 1.0 / y.size)
        stumps, alphas = [], []
        for _ in range(int(self.params['n_rounds'])):
            stump = grow_tree(x, y, weights=w, max_depth=1)
            stump = stump.with_values(np.where(stump.value >= 0, 1.0, -1.0))
            h = stump.predict(x)
            error = float(w[h != y].sum())
            if error >= 0.5 - 1e-12:
                break
            alpha = 0.5 * math.log((1.0 - max(error, 1e-10)) /
                                   max(error, 1e-10))
            stumps.append(stump)
            alphas.append(alpha)
            if error <= 1e-12:
                break
            w = w * np.exp(-alpha * y * h)
            w = w / w.sum()

        logger.debug('AdaBoost stopped after %d rounds.', len(stumps))
        return BoostedPredictor(self.spec.id, x.shape[1], 'discrete', stumps,
                                alphas, base=float(np.mean(labels)))

    def _fit_logistic(self, x, labels):
        y = np.clip(labels, 0.0, 1.0)
        f = np.zeros(y.size)
        stumps, alphas = [], []
        for _ in range(int(self.params['n_rounds'])):
            p = expit(2.0 * f)
            w = np.maximum(p * (1.0 - p), 1e-10)
            z = np.clip((y - p) / w, -MAX_RESPONSE, MAX_RESPONSE)
            stump = grow_tree(x, z, weights=w, max_depth=1)
            stumps.append(stump)
            alphas.append(0.5)
            f = f + 0.5 * stump.predict(x)

        return BoostedPredictor(self.spec.id, x.shape[1], 'logistic', stumps,
                                alphas, base=0.5)


class ForestPredictor(Predictor):
    kind = 'random_forest'

    def __init__(self, algorithm, n_features, trees, trained_on=None):
        super(ForestPredictor, self).__init__(algorithm, n_features,
                                              trained_on)
        self.trees = list(trees)

    def _score(self, x):
        total = np.zeros(x.shape[0])
        for tree in self.trees:
            total = total + tree.predict(x)
        return total / len(self.trees)

    def parameters(self):
        return {'trees': [t.as_dict() for t in self.trees]}

    @classmethod
    def from_parameters(cls, algorithm, n_features, parameters):
        return cls(algorithm, n_features,
                   [RegressionTree.from_dict(t) for t in parameters['trees']])


class RandomForest(Learner):
    """Bagged regression trees with random feature subsets at every node.

    A single-tree forest is fit on the sample itself (no bootstrap).
    """

    kind = 'random_forest'
    defaults = {'n_trees': 25, 'max_depth': 6, 'min_leaf': 1,
                'max_features': 'sqrt'}

    def _max_features(self, d):
        value = self.params['max_features']
        if value in (None, 'all'):
            return d
        if value == 'sqrt':
            return max(1, int(math.ceil(math.sqrt(d))))
        if isinstance(value, float) and 0 < value <= 1:
            return max(1, int(math.ceil(value * d)))
        if isinstance(value, int) and value >= 1:
            return min(d, value)
        raise ConfigError('random_forest: invalid max_features %r' % (value,))

    def fit(self, features, labels, seed=0):
        n_trees = int(self.params['n_trees'])
        if n_trees < 1:
            raise ConfigError('random_forest: n_trees must be at least 1')
        rng = np.random.RandomState(seed)
        n, d = features.shape
        max_features = self._max_features(d)
        trees = []
        for _ in range(n_trees):
            if n_trees > 1:
                rows = rng.randint(0, n, n)
            else:
                rows = np.arange(n)
            trees.append(grow_tree(features[rows], labels[rows],
                                   max_depth=int(self.params['max_depth']),
                                   min_leaf=int(self.params['min_leaf']),
                                   max_features=max_features, rng=rng))
        return ForestPredictor(self.spec.id, d, trees)
