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


"""Generalization bounds of a trained model.

The bounds hold for losses that are sample means of pointwise losses; with
1 - AUC they are computed for the error rate instead and labelled as a
surrogate. Rademacher complexities are Monte-Carlo estimates with a
heuristic supremum, so a report is an estimate, not a certificate.
"""

from __future__ import unicode_literals, print_function, division
import math
import logging
import collections

import numpy as np

from tops.conf import config
from tops.dataset import restrict
from tops.learners import train
from tops.losses import ScoredSet, ERROR_RATE_SPEC, pointwise, \
    loss as compute_loss
from tops.utils import derive_seed


logger = logging.getLogger(__name__)

BANNER = 'estimate, not certificate'


def confidence_term(m, delta):
    return 4.0 * math.sqrt(2.0 * math.log(4.0 / delta) / m)


def terminal_bound(empirical_loss, max_path_rademacher, m, delta):
    """Per-terminal bound: L + 2R + 4 sqrt(2 ln(4/delta) / m).

    :empirical_loss: L(H, S(C)) of the terminal.
    :max_path_rademacher: largest Rademacher complexity along its path.
    :m: |S(C)|.
    :delta: confidence parameter in (0, 1).
    """
    if m < 1:
        raise ValueError('the sample size must be at least 1')
    if not 0 < delta < 1:
        raise ValueError('delta must lie in (0, 1)')
    return empirical_loss + 2.0 * max_path_rademacher + \
        confidence_term(m, delta)


def aggregate_bound(per_terminal, delta):
    """Aggregate bound over all terminals.

    :per_terminal: list of (|S(C)|, L(H, S(C)), max R) triples.
    :delta: confidence parameter in (0, 1).
    :returns: (1/n) sum |S(C)| (L + 2R + 4 sqrt(2 ln(4 T/delta) / |S(C)|)),
        n being the total size and T the number of terminals.
    """
    per_terminal = list(per_terminal)
    if not per_terminal:
        raise ValueError('no terminals')
    if not 0 < delta < 1:
        raise ValueError('delta must lie in (0, 1)')
    count = len(per_terminal)
    n = sum(size for size, _, _ in per_terminal)
    if n < 1:
        raise ValueError('terminals hold no samples')
    total = 0.0
    for size, empirical, rademacher in per_terminal:
        if size == 0:
            continue
        total += size * terminal_bound(empirical, rademacher, size,
                                       delta / count)
    return total / n


theorem1_bound = terminal_bound
corollary_bound = aggregate_bound


def rademacher_draws(spec, features, labels, loss, n_draws, seed=0):
    """Per-draw values of (1/n) sum sigma_i l(h_sigma, z_i).

    The supremum over the hypothesis class is approximated by training the
    learner on pseudo-targets: labels reflected about the middle of their
    range where sigma_i = +1, kept where sigma_i = -1.

    :returns: an array of n_draws values.
    """
    if n_draws < 1:
        raise ValueError('n_draws must be at least 1')
    features = np.asarray(features, dtype=float)
    labels = np.asarray(labels, dtype=float)
    spec_loss = loss if loss.additive else ERROR_RATE_SPEC
    reflected = labels.min() + labels.max() - labels

    values = np.empty(n_draws)
    for draw in range(n_draws):
        rng = np.random.RandomState(derive_seed(seed, 'rademacher', draw))
        sigma = rng.choice((-1.0, 1.0), size=labels.size)
        targets = np.where(sigma > 0, reflected, labels)
        predictor = train(spec, features, targets,
                          seed=derive_seed(seed, 'rademacher-fit', draw),
                          min_samples=1)
        losses = pointwise(spec_loss, ScoredSet(
            predictor.score_many(features), labels))
        values[draw] = float(np.mean(sigma * losses))
    return values


def rademacher_estimate(spec, features, labels, loss, n_draws=None, seed=0):
    """Monte-Carlo estimate of the empirical Rademacher complexity of an
    algorithm on a sample, clipped at 0."""
    n_draws = config['RADEMACHER_DRAWS'] if n_draws is None else n_draws
    return max(0.0, float(np.mean(rademacher_draws(spec, features, labels,
                                                   loss, n_draws, seed))))


TerminalBound = collections.namedtuple(
    'TerminalBound', 'terminal size empirical_loss rademacher confidence '
                     'bound')


class BoundReport(object):
    """Per-terminal bounds plus the aggregate bound."""

    def __init__(self, terminals, aggregate, delta, loss_kind, surrogate):
        self.terminals = list(terminals)
        self.aggregate = aggregate
        self.delta = delta
        self.loss_kind = loss_kind
        self.surrogate = surrogate

    def as_dict(self):
        return {'banner': BANNER,
                'loss': self.loss_kind + (' (surrogate)'
                                          if self.surrogate else ''),
                'delta': self.delta,
                'aggregate': self.aggregate,
                'terminals': [t._asdict() for t in self.terminals]}


def bound_report(model, data, s_idx, delta=None, n_draws=None, seed=0):
    """Evaluate the bounds of a model on its normalized training rows.

    :model: the OverallPredictor.
    :data: normalized Dataset the model was trained on.
    :s_idx: rows of S.
    """
    delta = config['BOUND_DELTA'] if delta is None else delta
    n_draws = config['RADEMACHER_DRAWS'] if n_draws is None else n_draws
    surrogate = not model.loss.additive
    spec_loss = ERROR_RATE_SPEC if surrogate else model.loss
    algorithms = dict((a.id, a) for a in model.algorithms)
    tree = model.tree

    rows_by_terminal = {}
    for terminal in tree.terminals:
        rows_by_terminal[terminal] = restrict(s_idx, data,
                                              tree.nodes[terminal].cell)
    count = len(rows_by_terminal)

    terminals = []
    for terminal, rows in sorted(rows_by_terminal.items()):
        if rows.size == 0:
            terminals.append(TerminalBound(terminal, 0, None, None, None,
                                           None))
            continue
        x, y = data.features[rows], data.labels[rows]
        empirical = compute_loss(spec_loss, ScoredSet(
            model.predict_normalized(x), y))
        complexities = []
        for nid in tree.path(terminal):
            spec = algorithms[tree.nodes[nid].algorithm]
            complexities.append(rademacher_estimate(
                spec, x, y, spec_loss, n_draws,
                seed=derive_seed(seed, 'bounds', terminal, nid)))
        rademacher = max(complexities)
        confidence = confidence_term(rows.size, delta / count)
        terminals.append(TerminalBound(
            terminal, int(rows.size), empirical, rademacher, confidence,
            terminal_bound(empirical, rademacher, rows.size, delta / count)))

    aggregate = aggregate_bound(
        [(t.size, t.empirical_loss or 0.0, t.rademacher or 0.0)
         for t in terminals], delta)
    logger.info('Aggregate bound %g (delta %g).', aggregate, delta)
    return BoundReport(terminals, aggregate, delta, spec_loss.kind, surrogate)
