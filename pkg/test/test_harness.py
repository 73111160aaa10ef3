from __future__ import unicode_literals, print_function, division

import math

import numpy as np
import pytest
from scipy import integrate

from tops import synthetic
from tops.dataset import split_partition, Partition
from tops.exceptions import ConfigError, DataError, UnknownNodeError
from tops.growth import Limits
from tops.harness import (gain, t_test, train_model, training_report,
                          export_dot, model_to_dot, ExperimentConfig,
                          run_experiment)
from tops.learners import instantiation_set
from tops.losses import LossSpec
from tops.utils import data_path


def test_gain():
    assert gain(0.9102, 1.0) == pytest.approx(0.0898)
    assert gain(0.877, 1.0) == pytest.approx(0.123)
    assert gain(0.0152, 0.0167) == pytest.approx(0.0898, abs=1e-3)
    assert gain(0.0428, 0.0488) == pytest.approx(0.123, abs=1e-3)
    assert gain(0.2, 0.25) == pytest.approx(0.2)
    with pytest.raises(ValueError):
        gain(0.1, 0.0)


def student_t_p_value(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    df = a.size + b.size - 2
    pooled = ((a.size - 1) * a.var(ddof=1) +
              (b.size - 1) * b.var(ddof=1)) / df
    spread = math.sqrt(pooled * (1.0 / a.size + 1.0 / b.size))
    t = (a.mean() - b.mean()) / spread
    scale = math.gamma((df + 1) / 2.0) / (
        math.sqrt(df * math.pi) * math.gamma(df / 2.0))

    def density(u):
        return scale * (1 + u * u / df) ** (-(df + 1) / 2.0)

    tail, _ = integrate.quad(density, abs(t), np.inf, epsabs=1e-13)
    return 2 * tail


def test_t_test_matches_integrated_density():
    rng = np.random.RandomState(6)
    for _ in range(10):
        a = rng.normal(0.10, 0.02, size=rng.randint(3, 15))
        b = rng.normal(0.11, 0.02, size=rng.randint(3, 15))
        assert t_test(a, b) == pytest.approx(student_t_p_value(a, b),
                                             rel=1e-6, abs=1e-10)


def test_t_test():
    a = [0.10, 0.11, 0.09, 0.10, 0.12]
    b = [0.20, 0.21, 0.19, 0.22, 0.20]
    assert t_test(a, b) < 0.001
    assert t_test(a, a) == pytest.approx(1.0)
    assert t_test([0.1, 0.1], [0.1, 0.1]) == 1.0
    assert t_test([0.1, 0.1], [0.2, 0.2]) == 0.0
    with pytest.raises(ValueError):
        t_test([0.1], [0.2, 0.3])


@pytest.fixture
def trained():
    data = synthetic.tent_dataset()
    partition = split_partition(data, (0.6, 0.2, 0.2), seed=0)
    return train_model(data, partition, instantiation_set('tops_lr'),
                       LossSpec('mae'), seed=0)


def test_training_report_sections(trained):
    model, tree, _ = trained
    report = training_report(model, tree)
    assert list(report) == ['model', 'tree', 'trajectory', 'weights']
    assert report['model']['splits'] == tree.n_splits >= 1
    assert report['model']['final_v1_loss'] < report['model']['root_v1_loss']
    assert len(report['tree']) == len(tree.nodes)
    assert len(report['trajectory']) == tree.n_splits + 1
    assert [row['terminal'] for row in report['weights']] == \
        sorted(tree.terminals)
    assert 'TREE' in report.as_table()
    assert report.as_yaml().startswith('model:')


def test_dot_of_a_root_only_tree():
    data = synthetic.toy_dataset()
    rows = np.arange(data.n_samples)
    model, _, _ = train_model(data, Partition(rows, rows, rows),
                              instantiation_set('tops_lr'), LossSpec('error'),
                              limits=Limits.from_config(max_depth=0))
    dot = model_to_dot(model)
    assert dot.startswith('digraph tops {')
    assert dot.count('->') == 0
    assert 'n0 [' in dot


def test_dot_labels(trained):
    model, tree, _ = trained
    dot = export_dot(tree, model.weights, model.delta_t,
                     names=model.normalization.names)
    assert dot.count('->') == 2 * tree.n_splits
    assert 'x1 < ' in dot
    assert 'Δv = ' in dot and 'Δt = ' in dot
    assert 'penwidth' not in dot


def test_dot_highlights_one_path(trained):
    model, tree, _ = trained
    terminal = tree.terminals[-1]
    dot = model_to_dot(model, highlighted_path=terminal)
    path = tree.path(terminal)
    highlighted_edges = [line for line in dot.splitlines()
                         if '->' in line and 'color="red"' in line]
    assert len(highlighted_edges) == len(path) - 1
    assert dot.count('w = ') >= len(path)


def test_dot_rejects_inner_nodes(trained):
    model, tree, _ = trained
    with pytest.raises(UnknownNodeError):
        model_to_dot(model, highlighted_path=tree.root)
    with pytest.raises(UnknownNodeError):
        model_to_dot(model, highlighted_path=999)


def tent_config(**overrides):
    mapping = {'data': 'tent.csv', 'schema': 'tent_schema.yaml',
               'instantiation': 'tops_lr', 'loss': 'mae',
               'baselines': ['linear_regression'], 'n_runs': 2,
               'ratios': [0.6, 0.2, 0.2], 'test_fraction': 0.25,
               'limits': {'max_depth': 3}}
    mapping.update(overrides)
    return ExperimentConfig.from_mapping(mapping, base_dir=data_path())


def test_experiment_beats_global_regression():
    report, timing = run_experiment(tent_config())
    comparison = report['comparisons'][0]
    assert comparison['baseline'] == 'linear_regression'
    assert comparison['gain'] > 0
    assert comparison['p_value'] is not None
    assert [m['method'] for m in report['methods']] == \
        ['tops:tops_lr', 'linear_regression']
    assert len(report['evaluations']) == 2
    assert len(timing['timing']) == 2


def test_one_run_has_no_p_value():
    report, _ = run_experiment(tent_config(n_runs=1))
    comparison = report['comparisons'][0]
    assert comparison['p_value'] is None
    assert 'fewer than 2' in comparison['note']


def test_experiment_report_is_reproducible():
    first, _ = run_experiment(tent_config(n_runs=1), jobs=1)
    second, _ = run_experiment(tent_config(n_runs=1), jobs=2)
    assert first.as_yaml() == second.as_yaml()


def test_candidates_are_bounded():
    report, _ = run_experiment(tent_config(n_runs=1))
    for row in report['candidates']:
        assert row['max_candidates_per_node'] <= row['candidate_bound']


def test_cross_validation_folds():
    report, _ = run_experiment(tent_config(n_runs=1, cv_folds=3))
    assert [(e['run'], e['fold']) for e in report['evaluations']] == \
        [(0, 0), (0, 1), (0, 2)]


def test_alternative_instantiations():
    report, _ = run_experiment(tent_config(
        n_runs=1, alternatives=['stump,linear_regression']))
    methods = [m['method'] for m in report['methods']]
    assert methods == ['tops:tops_lr', 'tops:stump,linear_regression',
                       'linear_regression']


def test_temporal_split(tmp_path, write_csv):
    rows = [(i / 100.0, (i * 7 % 100) / 100.0, i, i / 100.0 * 2)
            for i in range(100)]
    path = write_csv('t.csv', ['a', 'b', 'year', 'y'], rows)
    cfg = ExperimentConfig.from_mapping({
        'data': path, 'schema': {'label': 'y'}, 'n_runs': 1,
        'baselines': ['linear_regression'],
        'temporal_split': {'column': 'year', 'test_from': 80}})
    report, _ = run_experiment(cfg)
    assert report['experiment']['features'] == 2
    assert report['experiment']['loss'] == 'mse'


def test_config_errors_carry_lines(tmp_path):
    path = tmp_path / 'bench.yaml'
    path.write_text('data: tent.csv\nschema: {label: y}\nn_runs: 0\n')
    with pytest.raises(ConfigError) as e:
        ExperimentConfig.from_yaml(str(path))
    assert e.value.line == 3

    path.write_text('data: tent.csv\nschema: {label: y}\ncolour: red\n')
    with pytest.raises(ConfigError) as e:
        ExperimentConfig.from_yaml(str(path))
    assert e.value.line == 3


def test_auc_on_real_labels():
    with pytest.raises(DataError) as e:
        run_experiment(tent_config(loss='auc'))
    assert 'loss incompatible with label kind' in str(e.value)
