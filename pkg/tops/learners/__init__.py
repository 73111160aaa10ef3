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


"""Base learners: the algorithm set a tree of predictors draws from."""

from __future__ import unicode_literals, print_function, division
import logging

import numpy as np

from tops.conf import config
from tops.exceptions import (ConfigError, InsufficientDataError,
                             FitFailedError, ModelFormatError)
from tops.learners.api import AlgorithmSpec, Predictor, Learner, KINDS
from tops.learners.linear import (LinearRegression, LogisticRegression,
                                  LinearPredictor, LogisticPredictor)
from tops.learners.trees import (TreeLearner, StumpLearner, TreePredictor,
                                 StumpPredictor, RegressionTree, grow_tree)
from tops.learners.ensembles import (AdaBoost, RandomForest, BoostedPredictor,
                                     ForestPredictor)


logger = logging.getLogger(__name__)

LEARNERS = dict((cls.kind, cls) for cls in
                (LinearRegression, LogisticRegression, StumpLearner,
                 TreeLearner, AdaBoost, RandomForest))

PREDICTORS = dict((cls.kind, cls) for cls in
                  (LinearPredictor, LogisticPredictor, StumpPredictor,
                   TreePredictor, BoostedPredictor, ForestPredictor))

INSTANTIATIONS = ('tops_lr', 'tops_b')


def get_learner(spec):
    return LEARNERS[spec.kind](spec)


def train(spec, features, labels, seed=0, min_samples=None):
    """Train an algorithm on a sample.

    Required arguments:
    :spec: the AlgorithmSpec.
    :features: the sample's feature matrix (already normalized).
    :labels: the sample's labels.

    Optional arguments:
    :seed: seed of randomized learners.
    :min_samples: smallest sample accepted (default MIN_TRAIN_SAMPLES).

    :returns: a Predictor, not yet attached to a tree node.
    """
    if min_samples is None:
        min_samples = config['MIN_TRAIN_SAMPLES']
    features = np.asarray(features, dtype=float)
    labels = np.asarray(labels, dtype=float)
    if features.ndim != 2 or features.shape[0] != labels.size:
        raise ValueError('features and labels do not match')
    if labels.size < max(1, min_samples):
        raise InsufficientDataError('%s: %d samples, need at least %d'
                                    % (spec.id, labels.size,
                                       max(1, min_samples)))

    predictor = get_learner(spec).fit(features, labels, seed=seed)
    if not predictor.is_finite():
        raise FitFailedError('%s: non-finite parameters after fit' % spec.id)
    return predictor


def score(predictor, x):
    """Score one feature vector."""
    return predictor.score(x)


def predictor_from_dict(d):
    try:
        cls = PREDICTORS[d['kind']]
        predictor = cls.from_parameters(d['algorithm'], int(d['n_features']),
                                        d['parameters'])
    except (KeyError, TypeError, ValueError) as e:
        raise ModelFormatError('invalid predictor entry: %s' % e)
    predictor.trained_on = d.get('trained_on')
    return predictor


def instantiation_set(name):
    """Return the algorithm list of an instantiation.

    :name: 'tops_lr' (linear regression alone), 'tops_b' (AdaBoost, linear
        regression, logistic regression, LogitBoost and random forest), a
        comma-separated string of kinds, or a list of kinds / spec mappings.
    :returns: a list of AlgorithmSpec, in the order given.
    """
    if isinstance(name, str):
        if name == 'tops_lr':
            return [AlgorithmSpec('linear_regression')]
        if name == 'tops_b':
            return [AlgorithmSpec('adaboost'),
                    AlgorithmSpec('linear_regression'),
                    AlgorithmSpec('logistic_regression'),
                    AlgorithmSpec('adaboost', {'variant': 'logistic'},
                                  id='logitboost'),
                    AlgorithmSpec('random_forest')]
        entries = [part.strip() for part in name.split(',') if part.strip()]
        if not entries or any(e not in KINDS for e in entries):
            raise ConfigError('unknown instantiation %r (expected %s or a '
                              'list of %s)' % (
                                  name, ' or '.join(INSTANTIATIONS),
                                  ', '.join(KINDS)))
    else:
        entries = list(name)
        if not entries:
            raise ConfigError('empty learner list')

    specs = [e if isinstance(e, AlgorithmSpec) else AlgorithmSpec.from_dict(e)
             for e in entries]
    ids = [s.id for s in specs]
    if len(set(ids)) != len(ids):
        raise ConfigError('duplicate learner ids in %s' % ', '.join(ids))
    return specs


__all__ = ['AlgorithmSpec', 'Predictor', 'Learner', 'RegressionTree',
           'grow_tree', 'train', 'score', 'instantiation_set',
           'predictor_from_dict', 'get_learner', 'LEARNERS', 'KINDS']
