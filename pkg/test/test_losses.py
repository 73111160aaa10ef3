from __future__ import unicode_literals, print_function, division

import numpy as np
import pytest
from numpy.testing import assert_allclose

from tops.exceptions import LossUndefinedError, DataError
from tops.losses import (LossSpec, ScoredSet, auc, loss, joint_loss,
                         effective_spec, ERROR_RATE, ONE_MINUS_AUC, MAE)


def test_names_map_to_kinds():
    assert LossSpec('error').kind == ERROR_RATE
    assert LossSpec('auc').kind == ONE_MINUS_AUC
    assert LossSpec('mae').kind == MAE
    assert LossSpec('auc').name == 'auc'


def test_additivity():
    assert LossSpec('error').additive
    assert LossSpec('mse').additive
    assert not LossSpec('auc').additive
    with pytest.raises(ValueError):
        LossSpec('auc', additive=True)
    with pytest.raises(ValueError):
        LossSpec('hinge')


def test_auc_counts_ordered_pairs():
    scored = ScoredSet([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1])
    assert auc(scored) == pytest.approx(0.75)
    assert loss(LossSpec('auc'), scored) == pytest.approx(0.25)


def test_auc_ties_count_half():
    assert auc(ScoredSet([0.5, 0.5], [0, 1])) == pytest.approx(0.5)


def brute_force_auc(scores, labels):
    pos, neg = scores[labels == 1], scores[labels == 0]
    total = 0.0
    for p in pos:
        total += np.sum(p > neg) + 0.5 * np.sum(p == neg)
    return total / (pos.size * neg.size)


def test_auc_matches_pair_counting():
    rng = np.random.RandomState(2)
    labels = rng.randint(0, 2, size=1000).astype(float)
    scores = np.round(rng.normal(size=1000) + labels, 1)
    assert auc(ScoredSet(scores, labels)) == \
        pytest.approx(brute_force_auc(scores, labels), abs=1e-12)


def test_auc_of_reversed_and_transformed_scores():
    rng = np.random.RandomState(5)
    for _ in range(20):
        labels = np.array([0.0, 1.0] + list(rng.randint(0, 2, size=48)))
        scores = np.round(rng.uniform(size=50), 2)
        forward = auc(ScoredSet(scores, labels))
        assert forward + auc(ScoredSet(-scores, labels)) == \
            pytest.approx(1.0, abs=1e-12)
        assert auc(ScoredSet(np.exp(3 * scores) - 7, labels)) == \
            pytest.approx(forward, abs=1e-12)


def test_auc_single_class():
    with pytest.raises(LossUndefinedError):
        auc(ScoredSet([0.1, 0.9], [1, 1]))


def test_auc_rejects_real_labels():
    with pytest.raises(DataError):
        auc(ScoredSet([0.1, 0.9], [0.3, 1]))


def test_error_rate_threshold():
    # A score of exactly 0.5 is a positive prediction.
    scored = ScoredSet([0.5, 0.49, 0.9, 0.1], [1, 1, 0, 0])
    assert loss(LossSpec('error'), scored) == pytest.approx(0.5)


def test_regression_losses():
    scored = ScoredSet([1.0, 2.0, 4.0], [1.0, 3.0, 2.0])
    assert loss(LossSpec('mae'), scored) == pytest.approx(1.0)
    assert loss(LossSpec('mse'), scored) == pytest.approx(5.0 / 3.0)


def test_joint_auc_is_not_mean_of_parts():
    first = ScoredSet([0.8, 0.3], [1, 0])
    second = ScoredSet([0.6, 0.7], [1, 0])
    spec = LossSpec('auc')

    assert loss(spec, first) == pytest.approx(0.0)
    assert loss(spec, second) == pytest.approx(1.0)
    assert joint_loss(spec, [first, second]) == pytest.approx(0.25)


def test_joint_additive_loss_is_weighted_mean():
    first = ScoredSet([1.0, 1.0, 1.0], [0.0, 0.0, 0.0])
    second = ScoredSet([0.0], [0.0])
    assert_allclose(joint_loss(LossSpec('mae'), [first, second]), 0.75)


def test_empty_sample():
    with pytest.raises(ValueError):
        loss(LossSpec('mse'), ScoredSet([], []))


def test_effective_spec_substitutes_error_rate():
    spec, substituted = effective_spec(LossSpec('auc'), [1, 1, 1])
    assert substituted and spec.kind == ERROR_RATE

    spec, substituted = effective_spec(LossSpec('auc'), [0, 1])
    assert not substituted and spec.kind == ONE_MINUS_AUC

    spec, substituted = effective_spec(LossSpec('mae'), [1, 1])
    assert not substituted and spec.kind == MAE
