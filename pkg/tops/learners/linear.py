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
from scipy.special import expit

from tops.conf import config
from tops.exceptions import FitFailedError
from tops.learners.api import Learner, Predictor


logger = logging.getLogger(__name__)


def _design(features):
    """Prepend the intercept column."""
    return np.hstack([np.ones((features.shape[0], 1)), features])


def _linear_scores(x, coef, intercept):
    # Row-wise sums keep every score independent of the batch it is in.
    return (x * coef).sum(axis=1) + intercept


class LinearPredictor(Predictor):
    kind = 'linear_regression'

    def __init__(self, algorithm, n_features, intercept, coef,
                 trained_on=None):
        super(LinearPredictor, self).__init__(algorithm, n_features,
                                              trained_on)
        self.intercept = float(intercept)
        self.coef = np.asarray(coef, dtype=float)

    def _score(self, x):
        return _linear_scores(x, self.coef, self.intercept)

    def parameters(self):
        return {'intercept': self.intercept, 'coef': self.coef.tolist()}

    @classmethod
    def from_parameters(cls, algorithm, n_features, parameters):
        return cls(algorithm, n_features, parameters['intercept'],
                   parameters['coef'])


class LogisticPredictor(LinearPredictor):
    kind = 'logistic_regression'

    def _score(self, x):
        return expit(_linear_scores(x, self.coef, self.intercept))


class LinearRegression(Learner):
    """Ordinary least squares with an intercept. Rank-deficient designs are
    solved with a small ridge term instead."""

    kind = 'linear_regression'
    defaults = {'ridge': None}

    def fit(self, features, labels, seed=0):
        a = _design(features)
        ridge = self.params['ridge']
        if ridge is None:
            ridge = config['LINEAR_RIDGE']

        try:
            if np.linalg.matrix_rank(a) == a.shape[1]:
                beta = np.linalg.lstsq(a, labels, rcond=None)[0]
            else:
                logger.debug('Rank-deficient design; ridge %g.', ridge)
                gram = a.T.dot(a) + ridge * np.eye(a.shape[1])
                beta = np.linalg.solve(gram, a.T.dot(labels))
        except np.linalg.LinAlgError as e:
            raise FitFailedError('linear regression: %s' % e)

        return LinearPredictor(self.spec.id, features.shape[1], beta[0],
                               beta[1:])


class LogisticRegression(Learner):
    """Logistic regression by iteratively reweighted least squares with a
    fixed iteration budget. Labels are read as probabilities in [0, 1]."""

    kind = 'logistic_regression'
    defaults = {'max_iter': None, 'tol': None, 'l2': None}

    def fit(self, features, labels, seed=0):
        max_iter = self.params['max_iter'] or config['LOGISTIC_MAX_ITER']
        tol = self.params['tol'] or config['LOGISTIC_TOL']
        l2 = self.params['l2']
        if l2 is None:
            l2 = config['LOGISTIC_L2']

        a = _design(features)
        y = np.clip(labels, 0.0, 1.0)
        penalty = max(l2, 1e-12) * np.eye(a.shape[1])
        penalty[0, 0] = 0.0

        beta = np.zeros(a.shape[1])
        for _ in range(max_iter):
            p = expit(a.dot(beta))
            w = np.maximum(p * (1.0 - p), 1e-10)
            gradient = a.T.dot(y - p) - penalty.dot(beta)
            hessian = a.T.dot(a * w[:, None]) + penalty
            try:
                step = np.linalg.solve(hessian, gradient)
            except np.linalg.LinAlgError as e:
                raise FitFailedError('logistic regression: %s' % e)
            beta = beta + step
            if np.max(np.abs(step)) < tol:
                break

        return LogisticPredictor(self.spec.id, features.shape[1], beta[0],
                                 beta[1:])
