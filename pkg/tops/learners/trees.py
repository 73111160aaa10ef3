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
import logging

import numpy as np

from tops.learners.api import Learner, Predictor


logger = logging.getLogger(__name__)

# Minimum decrease of the weighted squared error for a split to be kept.
MIN_GAIN = 1e-12


class RegressionTree(object):
    """A binary regression tree stored as parallel arrays, node 0 being the
    root. Leaves have feature -1."""

    def __init__(self, feature, threshold, left, right, value):
        self.feature = np.asarray(feature, dtype=int)
        self.threshold = np.asarray(threshold, dtype=float)
        self.left = np.asarray(left, dtype=int)
        self.right = np.asarray(right, dtype=int)
        self.value = np.asarray(value, dtype=float)

    @property
    def n_nodes(self):
        return self.feature.size

    def apply(self, x):
        """Leaf index of every row."""
        where = np.zeros(x.shape[0], dtype=int)
        while True:
            feature = self.feature[where]
            active = np.nonzero(feature >= 0)[0]
            if active.size == 0:
                return where
            nodes = where[active]
            go_left = x[active, feature[active]] < self.threshold[nodes]
            where[active] = np.where(go_left, self.left[nodes],
                                     self.right[nodes])

    def predict(self, x):
        return self.value[self.apply(x)]

    def with_values(self, value):
        return RegressionTree(self.feature, self.threshold, self.left,
                              self.right, value)

    def as_dict(self):
        return {'feature': self.feature.tolist(),
                'threshold': self.threshold.tolist(),
                'left': self.left.tolist(), 'right': self.right.tolist(),
                'value': self.value.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(d['feature'], d['threshold'], d['left'], d['right'],
                   d['value'])


def _best_split(x, y, w, features, min_leaf):
    """Greedy split minimizing the weighted squared error.

    :returns: (gain, feature, threshold) or None.
    """
    total_w = w.sum()
    total_wy = (w * y).sum()
    parent = (w * y * y).sum() - total_wy ** 2 / total_w
    n = y.size
    best = None
    for j in features:
        order = np.argsort(x[:, j], kind='mergesort')
        xs = x[order, j]
        ws = w[order]
        wys = ws * y[order]
        cw = np.cumsum(ws)[:-1]
        cwy = np.cumsum(wys)[:-1]
        cwyy = np.cumsum(wys * y[order])[:-1]

        k = np.arange(1, n)
        valid = (xs[:-1] < xs[1:]) & (k >= min_leaf) & (n - k >= min_leaf)
        valid &= (cw > 0) & (total_w - cw > 0)
        if not valid.any():
            continue
        with np.errstate(divide='ignore', invalid='ignore'):
            left = cwyy - cwy ** 2 / cw
            right = ((w * y * y).sum() - cwyy) - \
                (total_wy - cwy) ** 2 / (total_w - cw)
        sse = np.where(valid, left + right, np.inf)
        i = int(np.argmin(sse))
        gain = parent - sse[i]
        if gain > MIN_GAIN and (best is None or gain > best[0] + MIN_GAIN):
            best = (gain, j, (xs[i] + xs[i + 1]) / 2.0)
    return best


def grow_tree(x, y, weights=None, max_depth=3, min_leaf=1,
              max_features=None, rng=None):
    """Fit a regression tree by greedy weighted squared-error splits.

    Required arguments:
    :x: feature matrix.
    :y: targets.

    Optional arguments:
    :weights: per-row weights (default uniform).
    :max_depth: 0 gives a single leaf.
    :min_leaf: minimum rows on each side of a split.
    :max_features: number of features drawn (with rng) at every node;
        None means all.

    :returns: a RegressionTree.
    """
    w = np.ones(y.size) if weights is None else np.asarray(weights, float)
    d = x.shape[1]
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(rows):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        ws = w[rows].sum()
        value.append(float((w[rows] * y[rows]).sum() / ws) if ws > 0
                     else float(y[rows].mean()))
        return len(feature) - 1

    stack = [(new_node(np.arange(y.size)), np.arange(y.size), 0)]
    while stack:
        node, rows, depth = stack.pop()
        if depth >= max_depth or rows.size < 2 * min_leaf:
            continue
        if max_features is None or max_features >= d:
            candidates = range(d)
        else:
            candidates = sorted(rng.choice(d, max_features, replace=False))
        best = _best_split(x[rows], y[rows], w[rows], candidates, min_leaf)
        if best is None:
            continue
        _, j, t = best
        go_left = x[rows, j] < t
        feature[node], threshold[node] = j, t
        left[node] = new_node(rows[go_left])
        right[node] = new_node(rows[~go_left])
        stack.append((right[node], rows[~go_left], depth + 1))
        stack.append((left[node], rows[go_left], depth + 1))

    return RegressionTree(feature, threshold, left, right, value)


class TreePredictor(Predictor):
    kind = 'tree'

    def __init__(self, algorithm, n_features, tree, trained_on=None):
        super(TreePredictor, self).__init__(algorithm, n_features, trained_on)
        self.tree = tree

    def _score(self, x):
        return self.tree.predict(x)

    def parameters(self):
        return self.tree.as_dict()

    @classmethod
    def from_parameters(cls, algorithm, n_features, parameters):
        return cls(algorithm, n_features, RegressionTree.from_dict(parameters))


class StumpPredictor(TreePredictor):
    kind = 'stump'


class TreeLearner(Learner):
    """CART-style regression tree (piecewise-constant squared-error fit)."""

    kind = 'tree'
    defaults = {'max_depth': 3, 'min_leaf': 1}
    predictor_class = TreePredictor

    def fit(self, features, labels, seed=0):
        tree = grow_tree(features, labels,
                         max_depth=int(self.params['max_depth']),
                         min_leaf=int(self.params['min_leaf']))
        return self.predictor_class(self.spec.id, features.shape[1], tree)


class StumpLearner(TreeLearner):
    """A depth-one regression tree."""

    kind = 'stump'
    defaults = {'min_leaf': 1}
    predictor_class = StumpPredictor

    def __init__(self, spec):
        super(StumpLearner, self).__init__(spec)
        self.params['max_depth'] = 1
