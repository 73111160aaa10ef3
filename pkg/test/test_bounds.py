from __future__ import unicode_literals, print_function, division

import math

import numpy as np
import pytest

from tops import synthetic
import tops
from tops.bounds import (terminal_bound, aggregate_bound, confidence_term,
                         theorem1_bound, corollary_bound,
                         rademacher_draws, rademacher_estimate, bound_report,
                         BANNER)
from tops.dataset import split_partition
from tops.harness import train_model
from tops.learners import AlgorithmSpec, instantiation_set
from tops.losses import LossSpec


def test_per_terminal_bound_value():
    assert terminal_bound(0.2, 0.1, 128, 0.05) == \
        pytest.approx(1.446664, abs=1e-6)


def test_bound_decomposition():
    value = terminal_bound(0.1, 0.05, 400, 0.1)
    assert value == pytest.approx(0.1 + 0.1 + confidence_term(400, 0.1))
    assert confidence_term(400, 0.1) == \
        pytest.approx(4 * math.sqrt(2 * math.log(40) / 400))


def test_bound_arguments():
    with pytest.raises(ValueError):
        terminal_bound(0.1, 0.1, 0, 0.05)
    with pytest.raises(ValueError):
        terminal_bound(0.1, 0.1, 10, 1.5)
    with pytest.raises(ValueError):
        aggregate_bound([], 0.05)


def test_aggregate_of_one_terminal():
    assert aggregate_bound([(128, 0.2, 0.1)], 0.05) == \
        pytest.approx(terminal_bound(0.2, 0.1, 128, 0.05))


def test_aggregate_is_size_weighted():
    triples = [(100, 0.1, 0.02), (300, 0.3, 0.04)]
    expected = (100 * terminal_bound(0.1, 0.02, 100, 0.025) +
                300 * terminal_bound(0.3, 0.04, 300, 0.025)) / 400.0
    assert aggregate_bound(triples, 0.05) == pytest.approx(expected)


def test_bound_names():
    assert theorem1_bound is terminal_bound
    assert corollary_bound is aggregate_bound
    assert tops.theorem1_bound(0.2, 0.1, 128, 0.05) == \
        terminal_bound(0.2, 0.1, 128, 0.05)
    assert tops.corollary_bound is aggregate_bound


def test_bounds_on_random_inputs():
    rng = np.random.RandomState(11)
    for _ in range(100):
        count = rng.randint(1, 6)
        delta = rng.uniform(0.001, 0.999)
        triples = [(int(rng.randint(1, 5000)), rng.uniform(), rng.uniform())
                   for _ in range(count)]
        n = sum(size for size, _, _ in triples)
        expected = sum(
            size * (empirical + 2 * r +
                    4 * math.sqrt(2 * math.log(4 * count / delta) / size))
            for size, empirical, r in triples) / n
        assert aggregate_bound(triples, delta) == \
            pytest.approx(expected, rel=1e-12)

        size, empirical, r = triples[0]
        single = empirical + 2 * r + \
            4 * math.sqrt(2 * math.log(4 / delta) / size)
        assert terminal_bound(empirical, r, size, delta) == \
            pytest.approx(single, rel=1e-12)


def test_rademacher_of_constant_labels():
    # With every label equal, the reflected targets equal the labels and
    # the estimate only measures the mean of the random signs.
    n, draws = 60, 30
    x = np.random.RandomState(0).uniform(size=(n, 2))
    y = np.ones(n)
    values = rademacher_draws(AlgorithmSpec('linear_regression'), x, y,
                              LossSpec('mae'), draws, seed=1)
    assert abs(values.mean()) <= 3.0 / math.sqrt(draws * n)


def test_rademacher_more_draws_agree():
    data = synthetic.random_binary_dataset(n=80, seed=6)
    spec = AlgorithmSpec('linear_regression')
    few = rademacher_draws(spec, data.features, data.labels,
                           LossSpec('mae'), 10, seed=2)
    many = rademacher_draws(spec, data.features, data.labels,
                            LossSpec('mae'), 20, seed=2)
    # The first draws are shared.
    assert few.tolist() == many[:10].tolist()
    stderr = many.std(ddof=1) / math.sqrt(many.size)
    assert abs(few.mean() - many.mean()) < 3 * stderr + 1e-12


def test_rademacher_estimate_is_clipped():
    data = synthetic.random_binary_dataset(n=60, seed=7)
    value = rademacher_estimate(AlgorithmSpec('stump'), data.features,
                                data.labels, LossSpec('error'), 5, seed=0)
    assert value >= 0.0


def test_report_of_a_model():
    data = synthetic.tent_dataset(n=300)
    partition = split_partition(data, (0.6, 0.2, 0.2), seed=0)
    model, _, normalized = train_model(data, partition,
                                       instantiation_set('tops_lr'),
                                       LossSpec('mae'))
    report = bound_report(model, normalized, partition.s_idx, delta=0.05,
                          n_draws=3, seed=0)

    assert len(report.terminals) == len(model.tree.terminals)
    assert sum(t.size for t in report.terminals) == partition.s_idx.size
    for t in report.terminals:
        if t.size:
            assert t.bound >= t.empirical_loss
            assert t.rademacher >= 0
    doc = report.as_dict()
    assert doc['banner'] == BANNER
    assert doc['loss'] == 'mae'
    assert doc['aggregate'] == pytest.approx(report.aggregate)


def test_auc_report_is_a_surrogate():
    data = synthetic.random_binary_dataset(n=200, seed=8)
    partition = split_partition(data, (0.6, 0.2, 0.2), seed=0)
    model, _, normalized = train_model(data, partition,
                                       instantiation_set('tops_lr'),
                                       LossSpec('auc'))
    report = bound_report(model, normalized, partition.s_idx, n_draws=2)
    assert report.surrogate
    assert report.as_dict()['loss'] == 'error_rate (surrogate)'
