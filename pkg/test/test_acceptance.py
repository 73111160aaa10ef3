from __future__ import unicode_literals, print_function, division

import os
import time

import numpy as np
import pytest

from tops import learners, synthetic
from tops.dataset import load_csv, split_partition
from tops.growth import Limits, grow
from tops.harness import safe_loss, train_model
from tops.learners import instantiation_set
from tops.losses import LossSpec
from tops.utils import derive_seed


def test_interaction_is_found():
    data = synthetic.interaction_dataset(n=500, d=4, seed=1)
    partition = split_partition(data, (0.6, 0.2, 0.2), seed=0)
    model, tree, normalized = train_model(
        data, partition, instantiation_set('tops_lr'), LossSpec('mse'))
    root = tree.nodes[tree.root]
    assert root.split is not None and root.split[0] == 0

    test_x = data.features[partition.v2_idx]
    test_y = data.labels[partition.v2_idx]
    tops_mse = np.mean((model.predict_many(test_x) - test_y) ** 2)
    global_lr = learners.train(
        learners.AlgorithmSpec('linear_regression'),
        normalized.features[partition.s_idx],
        normalized.labels[partition.s_idx])
    lr_mse = np.mean((global_lr.score_many(
        model.normalization.apply(test_x)) - test_y) ** 2)
    assert tops_mse < lr_mse / 2


def test_depth_zero_is_global_linear_regression():
    data = synthetic.tent_dataset()
    partition = split_partition(data, (0.6, 0.2, 0.2), seed=2)
    model, tree, normalized = train_model(
        data, partition, instantiation_set('tops_lr'), LossSpec('mse'),
        limits=Limits.from_config(max_depth=0))
    assert tree.terminals == [tree.root]
    global_lr = learners.train(
        learners.AlgorithmSpec('linear_regression'),
        normalized.features[partition.s_idx],
        normalized.labels[partition.s_idx])
    expected = global_lr.score_many(
        model.normalization.apply(data.features))
    np.testing.assert_allclose(model.predict_many(data.features), expected,
                               rtol=0, atol=1e-10)


@pytest.mark.slow
def test_runtime_scaling():
    sizes = (250, 500, 1000)
    times = []
    for n in sizes:
        data = synthetic.interaction_dataset(n=n, d=5, seed=n)
        partition = split_partition(data, (0.6, 0.2, 0.2), seed=0)
        start = time.perf_counter()
        tree = grow(data, partition.s_idx, partition.v1_idx,
                    instantiation_set('tops_lr'), LossSpec('mse'))
        times.append(time.perf_counter() - start)
        for node in tree.nodes.values():
            assert node.candidates <= partition.s_idx.size * data.n_features
    exponent = np.polyfit(np.log(sizes), np.log(times), 1)[0]
    assert exponent <= 3.3


@pytest.mark.slow
@pytest.mark.skipif('TOPS_BANK_CSV' not in os.environ,
                    reason='TOPS_BANK_CSV is not set')
def test_bank_marketing_direction():
    # Expects a numerically encoded copy with a binary label column.
    path = os.environ['TOPS_BANK_CSV']
    label = os.environ.get('TOPS_BANK_LABEL', 'y')
    data = load_csv(path, label, label_kind='binary')
    loss = LossSpec('auc')
    algorithms = instantiation_set('tops_b')

    wins = 0
    for run in range(10):
        seed = derive_seed(0, run, 'bank')
        rows = np.random.RandomState(seed).permutation(data.n_samples)
        test = rows[:data.n_samples // 5]
        train = data.subset(rows[data.n_samples // 5:])
        partition = split_partition(train, (0.6, 0.2, 0.2), seed)
        model, _, normalized = train_model(train, partition, algorithms,
                                           loss, seed=seed)
        test_x = data.features[test]
        test_y = data.labels[test]
        tops_loss, _ = safe_loss(loss, model.predict_many(test_x), test_y)

        s_x = normalized.features[partition.s_idx]
        s_y = normalized.labels[partition.s_idx]
        baseline = min(
            safe_loss(loss, learners.train(spec, s_x, s_y, seed=seed)
                      .score_many(model.normalization.apply(test_x)),
                      test_y)[0]
            for spec in algorithms)
        wins += tops_loss < baseline
    assert wins >= 8
