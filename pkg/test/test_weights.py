from __future__ import unicode_literals, print_function, division

import numpy as np
import pytest
from numpy.testing import assert_allclose

from tops.dataset import Dataset, split_partition
from tops.growth import grow
from tops.losses import LossSpec, ScoredSet, loss as compute_loss
from tops.weights import (PathWeights, project_simplex,
                          fit_simplex_least_squares, fit_configured_loss,
                          simplex_grid, optimize_weights, squared_error)


def on_simplex(w):
    return np.all(w >= 0) and abs(w.sum() - 1.0) < 1e-9


def test_projection():
    assert_allclose(project_simplex([0.2, 0.8]), [0.2, 0.8])
    assert_allclose(project_simplex([2.0, 0.0]), [1.0, 0.0])
    assert_allclose(project_simplex([1.0, 1.0, 1.0]), [1 / 3.0] * 3)
    assert on_simplex(project_simplex([-3.0, 0.4, 5.0, 0.1]))


def test_least_squares_finds_the_mixture():
    rng = np.random.RandomState(0)
    scores = rng.uniform(size=(200, 3))
    labels = scores.dot([0.6, 0.4, 0.0])
    w = fit_simplex_least_squares(scores, labels)
    assert on_simplex(w)
    assert_allclose(w, [0.6, 0.4, 0.0], atol=1e-4)


def test_least_squares_prefers_best_vertex():
    rng = np.random.RandomState(1)
    scores = rng.uniform(size=(100, 2))
    labels = scores[:, 1].copy()
    w = fit_simplex_least_squares(scores, labels)
    assert_allclose(w, [0.0, 1.0], atol=1e-6)


def test_least_squares_never_loses_to_a_vertex():
    rng = np.random.RandomState(2)
    scores = rng.normal(size=(50, 4))
    labels = rng.normal(size=50)
    w = fit_simplex_least_squares(scores, labels)
    assert on_simplex(w)
    best_vertex = min(squared_error(v, scores, labels) for v in np.eye(4))
    assert squared_error(w, scores, labels) <= best_vertex + 1e-12


def test_single_node_path():
    assert_allclose(fit_simplex_least_squares(np.ones((5, 1)), np.zeros(5)),
                    [1.0])


def test_simplex_grid():
    points = list(simplex_grid(3, 0.5, 100))
    assert len(points) == 6
    for point in points:
        assert on_simplex(point)

    coarse = list(simplex_grid(3, 0.01, 20))
    assert 0 < len(coarse) <= 20


def test_gridsearch_on_error_rate():
    scores = np.array([[0.9, 0.1], [0.8, 0.2], [0.1, 0.9], [0.3, 0.7]])
    labels = np.array([0.0, 0.0, 1.0, 1.0])
    w = fit_configured_loss(scores, labels, LossSpec('error'), step=0.1)
    assert on_simplex(w)
    assert (scores.dot(w) >= 0.5).astype(float).tolist() == labels.tolist()


def grid_oracle(scores, labels, loss):
    k = scores.shape[1]
    if k == 1:
        points = [(100,)]
    elif k == 2:
        points = [(i, 100 - i) for i in range(101)]
    else:
        points = [(i, j, 100 - i - j) for i in range(101)
                  for j in range(101 - i)]
    return min(compute_loss(loss, ScoredSet(
        scores.dot(np.array(p) / 100.0), labels)) for p in points)


def test_gridsearch_matches_exhaustive_grid():
    rng = np.random.RandomState(8)
    losses = [LossSpec('error'), LossSpec('mae'), LossSpec('auc')]
    for i in range(20):
        k = rng.randint(1, 4)
        scores = rng.uniform(size=(30, k))
        labels = (rng.uniform(size=30) < scores.mean(axis=1)).astype(float)
        labels[:2] = [0.0, 1.0]
        spec = losses[i % 3]
        w = fit_configured_loss(scores, labels, spec, step=0.01)
        assert on_simplex(w)
        assert compute_loss(spec, ScoredSet(scores.dot(w), labels)) == \
            pytest.approx(grid_oracle(scores, labels, spec), abs=1e-12)


def test_path_weights_container():
    weights = PathWeights([(3, [0, 1, 3], [0.2, 0.3, 0.5])])
    assert 3 in weights and len(weights) == 1
    path, w = weights[3]
    assert path == [0, 1, 3]
    assert_allclose(w, [0.2, 0.3, 0.5])
    with pytest.raises(ValueError):
        weights.set(4, [0, 2, 4], [1.0])


def test_weights_of_a_grown_tree(tent, lr, mae_loss):
    partition = split_partition(tent, (0.6, 0.2, 0.2), seed=0)
    tree = grow(tent, partition.s_idx, partition.v1_idx, lr, mae_loss)
    weights = optimize_weights(tree, tent, partition.v2_idx, mae_loss)

    assert weights.terminals == sorted(tree.terminals)
    for terminal, path, w in weights.items():
        assert path == tree.path(terminal)
        assert on_simplex(w)


def test_empty_second_validation_set(tent, lr, mae_loss):
    partition = split_partition(tent, (0.6, 0.2, 0.2), seed=0)
    tree = grow(tent, partition.s_idx, partition.v1_idx, lr, mae_loss)
    weights = optimize_weights(tree, tent, np.array([], dtype=int), mae_loss)
    for terminal, path, w in weights.items():
        assert_allclose(w, np.full(len(path), 1.0 / len(path)))


def test_weights_ignore_thread_count(tent, lr, mae_loss):
    partition = split_partition(tent, (0.6, 0.2, 0.2), seed=0)
    tree = grow(tent, partition.s_idx, partition.v1_idx, lr, mae_loss)
    serial = optimize_weights(tree, tent, partition.v2_idx, mae_loss, jobs=1)
    threaded = optimize_weights(tree, tent, partition.v2_idx, mae_loss,
                                jobs=3)
    for (t1, p1, w1), (t2, p2, w2) in zip(serial.items(), threaded.items()):
        assert t1 == t2 and p1 == p2
        assert w1.tolist() == w2.tolist()


def test_terminal_weight_below_root(toy, toy_rows, lr, error_loss):
    tree = grow(toy, toy_rows, toy_rows, lr, error_loss)
    assert tree.n_splits >= 1
    terminal_of = tree.route(toy.features)
    root_scores = tree.nodes[tree.root].predictor.score_many(toy.features)
    own_scores = np.array([
        tree.nodes[t].predictor.score_many(x.reshape(1, -1))[0]
        for t, x in zip(terminal_of, toy.features)])
    # Labels that mostly follow the root fit.
    mixed = Dataset(toy.features, 0.8 * root_scores + 0.2 * own_scores,
                    toy.specs, label_kind='real')
    weights = optimize_weights(tree, mixed, toy_rows, LossSpec('mse'))
    for terminal, path, w in weights.items():
        assert len(path) == 2
        assert_allclose(w, [0.8, 0.2], atol=1e-3)
        assert w[-1] < w.max()
