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


"""Simplex-constrained aggregation weights along every root-to-terminal
path, fit on the second validation set."""

from __future__ import unicode_literals, print_function, division
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.special import comb

from tops.conf import config
from tops.dataset import restrict
from tops.exceptions import ConfigError
from tops.losses import ScoredSet, loss as compute_loss, effective_spec


logger = logging.getLogger(__name__)

SQUARED_ERROR = 'squared_error'
GRIDSEARCH = 'configured_loss_gridsearch'


class PathWeights(object):
    """Per terminal: the node ids of its path (root first) and their
    weights. A node may weigh differently on different paths."""

    def __init__(self, entries=()):
        self._entries = {}
        for terminal, path, weights in entries:
            self.set(terminal, path, weights)

    def set(self, terminal, path, weights):
        weights = np.asarray(weights, dtype=float)
        if len(path) != weights.size:
            raise ValueError('path of %d nodes with %d weights'
                             % (len(path), weights.size))
        self._entries[terminal] = (list(path), weights)

    def path(self, terminal):
        return self._entries[terminal][0]

    def weights(self, terminal):
        return self._entries[terminal][1]

    def __getitem__(self, terminal):
        return self._entries[terminal]

    def __contains__(self, terminal):
        return terminal in self._entries

    def __len__(self):
        return len(self._entries)

    @property
    def terminals(self):
        return sorted(self._entries)

    def items(self):
        for terminal in self.terminals:
            path, weights = self._entries[terminal]
            yield terminal, path, weights


def project_simplex(v):
    """Euclidean projection of v onto the probability simplex (sort-based).
    """
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    cumulative = np.cumsum(u) - 1.0
    index = np.arange(1, v.size + 1)
    rho = np.nonzero(u - cumulative / index > 0)[0][-1]
    theta = cumulative[rho] / (rho + 1.0)
    w = np.maximum(v - theta, 0.0)
    return w / w.sum()


def squared_error(w, scores, labels):
    residual = scores.dot(w) - labels
    return float(np.mean(residual ** 2))


def fit_simplex_least_squares(scores, labels, max_iter=None, tol=None):
    """Minimize mean((scores . w - labels)^2) over the simplex.

    Accelerated projected gradient from the uniform point, with
    backtracking on the step and a restart whenever the objective rises.
    The result is never worse than the best vertex.

    :scores: n x k matrix, one column per path node.
    :labels: n labels.
    :returns: the weight vector.
    """
    max_iter = config['WEIGHT_MAX_ITER'] if max_iter is None else max_iter
    tol = config['WEIGHT_TOL'] if tol is None else tol
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=float)
    n, k = scores.shape
    if k == 1:
        return np.ones(1)
    if n == 0:
        return np.full(k, 1.0 / k)

    def objective(w):
        return squared_error(w, scores, labels)

    def gradient(w):
        return 2.0 * scores.T.dot(scores.dot(w) - labels) / n

    w = np.full(k, 1.0 / k)
    z, t, lipschitz = w.copy(), 1.0, 1.0
    f_w = objective(w)
    for _ in range(max_iter):
        g = gradient(z)
        f_z = objective(z)
        while True:
            candidate = project_simplex(z - g / lipschitz)
            step = candidate - z
            bound = f_z + g.dot(step) + 0.5 * lipschitz * step.dot(step)
            f_candidate = objective(candidate)
            if f_candidate <= bound + 1e-15 or lipschitz > 1e12:
                break
            lipschitz *= 2.0

        if f_candidate > f_w:
            if t == 1.0:
                # A plain projected step from w no longer descends.
                break
            # Restart the momentum from the last iterate.
            z, t = w.copy(), 1.0
            continue

        mapping = lipschitz * np.linalg.norm(step)
        t_next = (1.0 + np.sqrt(1.0 + 4.0 * t * t)) / 2.0
        z = candidate + ((t - 1.0) / t_next) * (candidate - w)
        w, f_w, t = candidate, f_candidate, t_next
        if mapping < tol:
            break

    for vertex in np.eye(k):
        if objective(vertex) < f_w:
            w, f_w = vertex, objective(vertex)
    return w


def simplex_grid(k, step, max_points):
    """Points of the simplex whose coordinates are multiples of step,
    coarsened until there are at most max_points of them.

    :returns: an iterator of weight vectors, in lexicographic order of
        their stars-and-bars encoding.
    """
    m = max(1, int(round(1.0 / step)))
    while m > 1 and comb(m + k - 1, k - 1, exact=True) > max_points:
        m -= 1
    for bars in itertools.combinations(range(m + k - 1), k - 1):
        counts = np.diff((-1,) + bars + (m + k - 1,)) - 1
        yield counts / float(m)


def fit_configured_loss(scores, labels, loss, step=None, max_points=None):
    """Grid search of the simplex for the configured loss. 1 - AUC falls
    back to the error rate when the rows hold a single class."""
    step = config['WEIGHT_GRID_STEP'] if step is None else step
    max_points = config['WEIGHT_GRID_MAX_POINTS'] if max_points is None \
        else max_points
    n, k = scores.shape
    if k == 1:
        return np.ones(1)
    if n == 0:
        return np.full(k, 1.0 / k)
    spec, _ = effective_spec(loss, labels)

    best, best_value = None, None
    for w in simplex_grid(k, step, max_points):
        value = compute_loss(spec, ScoredSet(scores.dot(w), labels))
        if best is None or value < best_value:
            best, best_value = w, value
    return best


def path_scores(tree, path, features):
    """n x k matrix of the path nodes' predictor scores."""
    if features.shape[0] == 0:
        return np.zeros((0, len(path)))
    return np.column_stack([tree.nodes[nid].predictor.score_many(features)
                            for nid in path])


def optimize_weights(tree, data, v2_idx, loss, weight_fit=None, jobs=1):
    """Fit the weights of every terminal's path on V2 restricted to the
    terminal.

    Required arguments:
    :tree: the TreeOfPredictors.
    :data: the normalized Dataset.
    :v2_idx: rows of the second validation set.
    :loss: the configured LossSpec (used by the grid-search fit only).

    Optional arguments:
    :weight_fit: 'squared_error' (default) or 'configured_loss_gridsearch'.
    :jobs: number of threads fitting terminals.

    :returns: a PathWeights.
    """
    weight_fit = weight_fit or config['WEIGHT_FIT']
    if weight_fit not in (SQUARED_ERROR, GRIDSEARCH):
        raise ConfigError('unknown weight fit %r' % weight_fit)

    def fit(terminal):
        path = tree.path(terminal)
        rows = restrict(v2_idx, data, tree.nodes[terminal].cell)
        if rows.size == 0:
            logger.warning('Terminal %d has no V2 rows; uniform weights.',
                           terminal)
            return np.full(len(path), 1.0 / len(path))
        scores = path_scores(tree, path, data.features[rows])
        labels = data.labels[rows]
        if weight_fit == SQUARED_ERROR:
            return fit_simplex_least_squares(scores, labels)
        return fit_configured_loss(scores, labels, loss)

    terminals = tree.terminals
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            fitted = list(executor.map(fit, terminals))
    else:
        fitted = [fit(t) for t in terminals]

    weights = PathWeights()
    for terminal, w in zip(terminals, fitted):
        weights.set(terminal, tree.path(terminal), w)
    return weights
