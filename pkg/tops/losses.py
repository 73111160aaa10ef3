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
import collections
import logging

import numpy as np
from scipy.stats import rankdata

from tops.exceptions import LossUndefinedError, DataError


logger = logging.getLogger(__name__)

ERROR_RATE = 'error_rate'
ONE_MINUS_AUC = 'one_minus_auc'
MAE = 'mae'
MSE = 'mse'

KINDS = (ERROR_RATE, ONE_MINUS_AUC, MAE, MSE)

# Names used in configuration files and on the command line.
NAMES = collections.OrderedDict([('error', ERROR_RATE),
                                 ('auc', ONE_MINUS_AUC),
                                 ('mae', MAE),
                                 ('mse', MSE)])

# Classification threshold applied to scores.
THRESHOLD = 0.5


class LossSpec(collections.namedtuple('LossSpec', 'kind additive')):
    """A loss kind and whether it is the sample mean of pointwise losses."""

    __slots__ = ()

    def __new__(cls, kind, additive=None):
        kind = NAMES.get(kind, kind)
        if kind not in KINDS:
            raise ValueError('unknown loss %r (expected one of %s)'
                             % (kind, ', '.join(NAMES)))
        expected = kind != ONE_MINUS_AUC
        if additive is None:
            additive = expected
        elif bool(additive) != expected:
            raise ValueError('loss %s is %sadditive' %
                             (kind, '' if expected else 'not '))
        return super(LossSpec, cls).__new__(cls, kind, bool(additive))

    @property
    def name(self):
        for name, kind in NAMES.items():
            if kind == self.kind:
                return name

    @property
    def needs_binary_labels(self):
        return self.kind in (ERROR_RATE, ONE_MINUS_AUC)

    def as_dict(self):
        return {'kind': self.kind, 'additive': self.additive}

    @classmethod
    def from_dict(cls, d):
        return cls(d['kind'], d.get('additive'))


class ScoredSet(collections.namedtuple('ScoredSet', 'scores labels')):
    """Predictions h(x) next to the true labels of the same rows."""

    __slots__ = ()

    def __new__(cls, scores, labels):
        scores = np.asarray(scores, dtype=float).ravel()
        labels = np.asarray(labels, dtype=float).ravel()
        if scores.shape != labels.shape:
            raise ValueError('%d scores for %d labels'
                             % (scores.size, labels.size))
        return super(ScoredSet, cls).__new__(cls, scores, labels)

    def __len__(self):
        return self.scores.size

    @classmethod
    def concat(cls, parts):
        parts = list(parts)
        if not parts:
            return cls([], [])
        return cls(np.concatenate([p.scores for p in parts]),
                   np.concatenate([p.labels for p in parts]))


ERROR_RATE_SPEC = LossSpec(ERROR_RATE)


def auc(scored):
    """Area under the ROC curve as the Mann-Whitney statistic: the fraction
    of (negative, positive) pairs ranked correctly, ties counting 1/2.

    :raises LossUndefinedError: when the labels hold a single class.
    """
    labels = scored.labels
    positive = labels == 1.0
    if not np.all(positive | (labels == 0.0)):
        raise DataError('AUC needs labels in {0, 1}')
    n_pos = int(positive.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise LossUndefinedError('AUC undefined: labels hold a single class')

    ranks = rankdata(scored.scores)
    u = ranks[positive].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def pointwise(spec, scored):
    """Per-row losses of an additive loss."""
    if spec.kind == ERROR_RATE:
        predicted = scored.scores >= THRESHOLD
        return (predicted != (scored.labels >= THRESHOLD)).astype(float)
    if spec.kind == MAE:
        return np.abs(scored.scores - scored.labels)
    if spec.kind == MSE:
        return (scored.scores - scored.labels) ** 2
    raise ValueError('loss %s has no pointwise form' % spec.kind)


def loss(spec, scored):
    """Compute L(h, Z) for scored rows.

    For a joint loss over disjoint parts, pass ScoredSet.concat(parts): the
    loss is always computed on the concatenation, never as a sum of
    per-part losses.
    """
    if len(scored) == 0:
        raise ValueError('loss of an empty sample')
    if spec.kind == ONE_MINUS_AUC:
        return 1.0 - auc(scored)
    return float(np.mean(pointwise(spec, scored)))


def joint_loss(spec, parts):
    return loss(spec, ScoredSet.concat(parts))


def single_class(labels):
    labels = np.asarray(labels)
    return labels.size == 0 or np.all(labels == labels[0])


def effective_spec(spec, labels):
    """Loss actually used on a sample: 1 - AUC falls back to the error rate
    when the labels hold a single class.

    :returns: (LossSpec, substituted flag).
    """
    if spec.kind == ONE_MINUS_AUC and single_class(labels):
        return ERROR_RATE_SPEC, True
    return spec, False
