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


"""Training pipeline, experiment protocol (repeated runs, optional k-fold
cross-validation, gains and t-tests) and DOT export of trained trees."""

from __future__ import unicode_literals, print_function, division
import os
import math
import time
import logging
import collections
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy import stats

from tops import learners
from tops.base import Report
from tops.conf import Config, load_yaml
from tops.dataset import (load_csv, load_schema, parse_schema, normalize,
                          split_partition, restrict, BINARY)
from tops.exceptions import ConfigError, DataError, UnknownNodeError
from tops.growth import Limits, grow
from tops.inference import OverallPredictor, default_metadata
from tops.losses import LossSpec, ScoredSet, loss as compute_loss, \
    effective_spec
from tops.utils import derive_seed, format_float
from tops.weights import optimize_weights


logger = logging.getLogger(__name__)


def gain(loss_tops, loss_baseline):
    """Relative loss reduction of ToPs over a baseline."""
    if not loss_baseline > 0:
        raise ValueError('gain needs a positive baseline loss, got %r'
                         % loss_baseline)
    return (loss_baseline - loss_tops) / loss_baseline


def t_test(sample_a, sample_b):
    """Two-sided two-sample Student t-test with pooled variance.

    :returns: the p-value. With zero pooled variance it is 1 for equal
        means and 0 otherwise.
    """
    a = np.asarray(sample_a, dtype=float)
    b = np.asarray(sample_b, dtype=float)
    if a.size < 2 or b.size < 2:
        raise ValueError('t-test needs at least two values per sample')
    pooled = ((a.size - 1) * a.var(ddof=1) + (b.size - 1) * b.var(ddof=1))
    if pooled <= 0:
        return 1.0 if a.mean() == b.mean() else 0.0
    p_value = stats.ttest_ind(a, b, equal_var=True).pvalue
    return float(min(1.0, max(0.0, p_value)))


def check_label_kind(loss, data):
    if loss.needs_binary_labels and data.label_kind != BINARY:
        raise DataError('loss incompatible with label kind: %s needs binary '
                        'labels, the data has %s labels'
                        % (loss.name, data.label_kind))


def default_loss(data):
    """Error rate for binary labels, mean squared error otherwise."""
    return LossSpec('error' if data.label_kind == BINARY else 'mse')


def safe_loss(loss, scores, labels):
    """Loss of scored rows; 1 - AUC falls back to the error rate on a
    single class. Returns (value, substituted) or (None, False) with no
    rows."""
    if len(labels) == 0:
        return None, False
    spec, substituted = effective_spec(loss, labels)
    return compute_loss(spec, ScoredSet(scores, labels)), substituted


def terminal_delta_t(model, data, v2_idx):
    """Per terminal: loss of the root predictor minus loss of H, both on the
    terminal's V2 rows (None when it has none)."""
    tree = model.tree
    root = tree.nodes[tree.root].predictor
    delta_t = {}
    for terminal in tree.terminals:
        rows = restrict(v2_idx, data, tree.nodes[terminal].cell)
        if rows.size == 0:
            delta_t[terminal] = None
            continue
        x, y = data.features[rows], data.labels[rows]
        before, _ = safe_loss(model.loss, root.score_many(x), y)
        after, _ = safe_loss(model.loss, model.predict_normalized(x), y)
        delta_t[terminal] = before - after
    return delta_t


def train_model(data, partition, algorithms, loss, limits=None, seed=0,
                jobs=1, weight_fit=None):
    """Normalize on S, grow the tree on S/V1, fit path weights on V2.

    :data: the raw Dataset.
    :returns: (OverallPredictor, tree, normalized Dataset).
    """
    check_label_kind(loss, data)
    normalized, params = normalize(data, partition.s_idx)
    tree = grow(normalized, partition.s_idx, partition.v1_idx, algorithms,
                loss, limits=limits, seed=seed, jobs=jobs)
    weights = optimize_weights(tree, normalized, partition.v2_idx, loss,
                               weight_fit=weight_fit, jobs=jobs)
    metadata = default_metadata(seed)
    metadata['weight_fit'] = weight_fit or Config()['WEIGHT_FIT']
    model = OverallPredictor(tree, weights, params, loss, algorithms,
                             metadata=metadata)
    model.delta_t = terminal_delta_t(model, normalized, partition.v2_idx)
    return model, tree, normalized


def hop_marker(hops):
    return '↑' * hops


def training_report(model, tree=None, bounds=None):
    """Report of a trained model: summary, nodes, V1 trajectory and path
    weights (plus bounds when given)."""
    tree = tree or model.tree
    names = model.normalization.names
    report = Report()
    history = tree.history
    stats_ = tree.match_statistics()
    report['model'] = collections.OrderedDict([
        ('loss', model.loss.kind),
        ('algorithms', [a.id for a in model.algorithms]),
        ('seed', model.metadata.get('seed')),
        ('nodes', len(tree.nodes)),
        ('terminals', len(tree.terminals)),
        ('splits', tree.n_splits),
        ('depth', tree.depth),
        ('root_v1_loss', history[0]['v1_loss'] if history else None),
        ('final_v1_loss', history[-1]['v1_loss'] if history else None),
        ('loss_substitutions', sum(1 for n in tree.nodes.values()
                                   if n.loss_substituted)),
        ('training_hops', ', '.join('%s: %d' % (hop_marker(h) or 'self', c)
                                    for h, c in stats_['hops'].items())),
        ('learners_used', ', '.join('%s: %d' % item for item in
                                    stats_['algorithms'].items())),
    ])
    report['tree'] = [collections.OrderedDict([
        ('node', node.id),
        ('parent', node.parent),
        ('depth', node.depth),
        ('split', None if node.split is None else
         '%s < %s' % (names[node.split[0]], format_float(node.split[1]))),
        ('algorithm', node.algorithm),
        ('trained_on', node.trained_on),
        ('marker', hop_marker(node.hops)),
        ('delta_v', node.delta_v),
        ('v1_loss', node.v1_loss),
        ('substituted', node.loss_substituted),
        ('candidates', node.candidates),
    ]) for node in tree.nodes.values()]
    report['trajectory'] = [collections.OrderedDict([
        ('step', h['step']),
        ('node', h['node']),
        ('split', None if h['feature'] is None else
         '%s < %s' % (names[h['feature']], format_float(h['threshold']))),
        ('v1_loss', h['v1_loss']),
    ]) for h in history]
    report['weights'] = [collections.OrderedDict([
        ('terminal', terminal),
        ('path', list(path)),
        ('weights', w.tolist()),
        ('delta_t', model.delta_t.get(terminal)),
    ]) for terminal, path, w in model.weights.items()]
    if bounds is not None:
        d = bounds.as_dict()
        report['bounds'] = collections.OrderedDict(
            (k, d[k]) for k in ('banner', 'loss', 'delta', 'aggregate'))
        report['terminal_bounds'] = [collections.OrderedDict(t)
                                     for t in d['terminals']]
    return report


def _dot_escape(text):
    return text.replace('\\', '\\\\').replace('"', '\\"')


def export_dot(tree, weights, delta_t=None, highlighted_path=None,
               names=None):
    """Render a tree of predictors as a DOT digraph.

    Non-terminals show their split, learner, training-node marker (one up
    arrow per ancestor hop) and delta_v; terminals show delta_t. With
    highlighted_path, the edges from the root to that terminal are drawn
    bold and labelled with the path weights.

    :raises UnknownNodeError: when highlighted_path is not a terminal.
    """
    delta_t = delta_t or {}
    names = names or ['x%d' % i for i in
                      range(tree.nodes[tree.root].cell.n_features)]
    highlighted = {}
    if highlighted_path is not None:
        if highlighted_path not in tree.nodes or \
                not tree.nodes[highlighted_path].is_terminal:
            raise UnknownNodeError('%r is not a terminal node id (terminals: '
                                   '%s)' % (highlighted_path, ', '.join(
                                       str(t) for t in tree.terminals)))
        path, w = weights[highlighted_path]
        highlighted = dict(zip(path, w.tolist()))

    lines = ['digraph tops {',
             '  node [shape=box, fontname="Helvetica"];',
             '  edge [fontname="Helvetica"];']
    for node in tree.nodes.values():
        label = ['node %d' % node.id]
        if node.split is not None:
            label.append('%s < %s' % (names[node.split[0]],
                                      format_float(node.split[1])))
        label.append(node.algorithm + hop_marker(node.hops))
        if node.is_terminal:
            label.append('Δt = %s' % format_float(delta_t.get(node.id)))
        else:
            label.append('Δv = %s' % format_float(node.delta_v))
        if node.id in highlighted:
            label.append('w = %s' % format_float(highlighted[node.id], 4))
        attrs = ['label="%s"' % '\\n'.join(_dot_escape(l) for l in label)]
        if node.id in highlighted:
            attrs.append('penwidth=2')
        lines.append('  n%d [%s];' % (node.id, ', '.join(attrs)))

    for node in tree.nodes.values():
        if node.split is None:
            continue
        threshold = format_float(node.split[1])
        for child, text in zip(node.children, ('< ' + threshold,
                                               '≥ ' + threshold)):
            attrs = ['label="%s"' % _dot_escape(text)]
            if node.id in highlighted and child in highlighted:
                attrs = ['label="%s"' % _dot_escape(
                    '%s  w = %s' % (text,
                                    format_float(highlighted[child], 4))),
                         'penwidth=2', 'color="red"']
            lines.append('  n%d -> n%d [%s];' % (node.id, child,
                                                  ', '.join(attrs)))
    lines.append('}')
    return '\n'.join(lines) + '\n'


def model_to_dot(model, highlighted_path=None):
    return export_dot(model.tree, model.weights, model.delta_t,
                      highlighted_path, model.normalization.names)


class ExperimentConfig(object):
    """An experiment: dataset, instantiation, loss and protocol.

    Keys of the YAML document:

        data            CSV path (relative to the config file)
        schema          {label, binary, label_kind} or a schema file path
        instantiation   tops_lr | tops_b | list of learner kinds/specs
        loss            error | auc | mae | mse
        ratios          S/V1/V2 proportions
        n_runs, cv_folds, seed, seeds, test_fraction
        limits          {max_depth, min_leaf_v1, min_train_samples,
                         improvement_tol}
        baselines       learners trained globally on S
        alternatives    further instantiations compared like baselines
        temporal_split  {column, test_from}
        weight_fit, jobs
    """

    KEYS = ('data', 'schema', 'instantiation', 'loss', 'ratios', 'n_runs',
            'cv_folds', 'seed', 'seeds', 'test_fraction', 'limits',
            'baselines', 'alternatives', 'temporal_split', 'weight_fit',
            'jobs')

    def __init__(self, data, schema, instantiation='tops_lr', loss=None,
                 ratios=None, n_runs=None, cv_folds=None, seed=None,
                 seeds=None, test_fraction=None, limits=None, baselines=(),
                 alternatives=(), temporal_split=None, weight_fit=None,
                 jobs=None, lines=None):
        lines = lines or {}
        defaults = Config()
        self.lines = lines

        def fail(key, message):
            raise ConfigError('%s: %s' % (key, message), line=lines.get(key))

        self.data = data
        if not data:
            fail('data', 'a dataset path is required')
        if isinstance(schema, str):
            schema = load_schema(schema)
        try:
            self.schema = parse_schema(schema or {})
        except ConfigError as e:
            fail('schema', str(e))

        self.instantiation = instantiation
        try:
            self.algorithms = learners.instantiation_set(instantiation)
            self.alternatives = collections.OrderedDict(
                (self._name(a), learners.instantiation_set(a))
                for a in alternatives or ())
        except ConfigError as e:
            fail('alternatives' if alternatives else 'instantiation', str(e))
        try:
            self.baselines = [learners.AlgorithmSpec.from_dict(b)
                              for b in baselines or ()]
        except ConfigError as e:
            fail('baselines', str(e))

        self.loss = None
        if loss is not None:
            try:
                self.loss = LossSpec(loss)
            except ValueError as e:
                fail('loss', str(e))

        overrides = {}
        for key, value in (('ratios', ratios), ('n_runs', n_runs),
                           ('cv_folds', cv_folds), ('seed', seed),
                           ('test_fraction', test_fraction),
                           ('weight_fit', weight_fit), ('jobs', jobs)):
            if value is not None:
                overrides[key] = value
        if limits:
            if not isinstance(limits, dict):
                fail('limits', 'expected a mapping')
            overrides.update(limits)
        try:
            params = defaults.from_mapping(overrides, lines)
        except ConfigError as e:
            if e.line is not None:
                raise
            fail('limits', str(e))

        self.ratios = tuple(float(r) for r in params['RATIOS'])
        self.n_runs = params['N_RUNS']
        self.cv_folds = params['CV_FOLDS']
        self.seed = params['SEED']
        self.test_fraction = float(params['TEST_FRACTION'])
        self.weight_fit = params['WEIGHT_FIT']
        self.jobs = params['JOBS']
        self.limits = Limits.from_config(params)

        if seeds is None:
            seeds = [self.seed + i for i in range(self.n_runs)]
        if not isinstance(seeds, list) or len(seeds) != self.n_runs or \
                not all(isinstance(s, int) for s in seeds):
            fail('seeds', 'expected %d integer seeds' % self.n_runs)
        self.seeds = seeds

        if temporal_split is not None:
            if not isinstance(temporal_split, dict) or \
                    set(temporal_split) != set(['column', 'test_from']):
                fail('temporal_split', 'expected {column, test_from}')
            if self.cv_folds:
                fail('temporal_split', 'cannot be combined with cv_folds')
        self.temporal_split = temporal_split

    @staticmethod
    def _name(instantiation):
        if isinstance(instantiation, str):
            return 'tops:' + instantiation
        return 'tops:' + '+'.join(learners.AlgorithmSpec.from_dict(e).id
                                  for e in instantiation)

    @property
    def method(self):
        return self._name(self.instantiation)

    @classmethod
    def from_mapping(cls, mapping, lines=None, base_dir=None):
        lines = lines or {}
        for key in mapping:
            if key not in cls.KEYS:
                raise ConfigError('unknown key %r' % key, line=lines.get(key))
        kwargs = dict(mapping)
        if base_dir is not None:
            for key in ('data', 'schema'):
                value = kwargs.get(key)
                if isinstance(value, str) and not os.path.isabs(value):
                    kwargs[key] = os.path.join(base_dir, value)
        return cls(lines=lines, **kwargs)

    @classmethod
    def from_yaml(cls, path):
        data, lines = load_yaml(path)
        return cls.from_mapping(data, lines, os.path.dirname(path))


def _splits(cfg, data, seed, temporal_rows):
    """(fold, train rows, test rows) of one run."""
    n = data.n_samples
    if temporal_rows is not None:
        return [(0, temporal_rows[0], temporal_rows[1])]
    order = np.random.RandomState(derive_seed(seed, 'folds')).permutation(n)
    if cfg.cv_folds:
        if cfg.cv_folds > n:
            raise DataError('%d folds for %d rows' % (cfg.cv_folds, n))
        chunks = np.array_split(order, cfg.cv_folds)
        return [(f, np.concatenate(chunks[:f] + chunks[f + 1:]), chunk)
                for f, chunk in enumerate(chunks)]
    n_test = max(1, int(math.floor(cfg.test_fraction * n)))
    return [(0, order[n_test:], order[:n_test])]


def _evaluate(cfg, data, job):
    run, fold, seed, train_rows, test_rows = job
    started = time.perf_counter()
    logger.info('Run %d, fold %d: %d training rows, %d test rows.', run, fold,
                train_rows.size, test_rows.size)
    train_data = data.subset(train_rows)
    partition = split_partition(train_data, cfg.ratios,
                                derive_seed(seed, fold, 'partition'))
    test_x = data.features[test_rows]
    test_y = data.labels[test_rows]

    losses = collections.OrderedDict()
    substituted = []
    instantiations = [(cfg.method, cfg.algorithms)]
    instantiations.extend(cfg.alternatives.items())
    info = None
    for name, algorithms in instantiations:
        model, tree, normalized = train_model(
            train_data, partition, algorithms, cfg.loss, cfg.limits,
            seed=derive_seed(seed, fold, 'tops'), weight_fit=cfg.weight_fit)
        value, sub = safe_loss(cfg.loss, model.predict_many(test_x), test_y)
        losses[name] = value
        if sub:
            substituted.append(name)
        if info is None:
            info = {'nodes': len(tree.nodes), 'splits': tree.n_splits,
                    'depth': tree.depth,
                    'max_candidates_per_node': max(
                        n.candidates for n in tree.nodes.values()),
                    'candidate_bound': partition.s_idx.size *
                    data.n_features,
                    'total_candidates': sum(
                        n.candidates for n in tree.nodes.values())}
            params, s_x = model.normalization, \
                normalized.features[partition.s_idx]
            s_y = normalized.labels[partition.s_idx]

    for spec in cfg.baselines:
        predictor = learners.train(spec, s_x, s_y,
                                   seed=derive_seed(seed, fold, spec.id),
                                   min_samples=1)
        value, sub = safe_loss(cfg.loss,
                               predictor.score_many(params.apply(test_x)),
                               test_y)
        losses[spec.id] = value
        if sub:
            substituted.append(spec.id)

    return {'run': run, 'fold': fold, 'seed': seed, 'losses': losses,
            'substituted': substituted, 'info': info,
            'seconds': time.perf_counter() - started}


def run_experiment(cfg, jobs=None):
    """Run the protocol of an ExperimentConfig.

    Every run draws its own test rows (or k folds), splits the remaining
    rows into S/V1/V2, trains ToPs and the baselines on them and records
    their test losses.

    :returns: (report, timing report). Only the timing report depends on
        wall-clock time.
    """
    jobs = jobs or cfg.jobs
    data = load_csv(cfg.data, cfg.schema['label'], cfg.schema['binary'],
                    cfg.schema['label_kind'])
    if cfg.loss is None:
        cfg.loss = default_loss(data)
    check_label_kind(cfg.loss, data)

    temporal_rows = None
    if cfg.temporal_split is not None:
        data, column = data.pop_feature(cfg.temporal_split['column'])
        test_mask = column >= float(cfg.temporal_split['test_from'])
        if test_mask.all() or not test_mask.any():
            raise DataError('temporal split on %r leaves an empty training '
                            'or test set' % cfg.temporal_split['column'])
        temporal_rows = (np.nonzero(~test_mask)[0], np.nonzero(test_mask)[0])

    jobs_list = []
    for run, seed in enumerate(cfg.seeds):
        for fold, train_rows, test_rows in _splits(cfg, data, seed,
                                                   temporal_rows):
            jobs_list.append((run, fold, seed, train_rows, test_rows))

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            results = list(executor.map(
                lambda job: _evaluate(cfg, data, job), jobs_list))
    else:
        results = [_evaluate(cfg, data, job) for job in jobs_list]

    return _experiment_report(cfg, data, results), _timing_report(results)


def _experiment_report(cfg, data, results):
    methods = list(results[0]['losses'])
    samples = collections.OrderedDict(
        (m, np.array([r['losses'][m] for r in results])) for m in methods)

    report = Report()
    report['experiment'] = collections.OrderedDict([
        ('data', os.path.basename(cfg.data)),
        ('rows', data.n_samples),
        ('features', data.n_features),
        ('loss', cfg.loss.kind),
        ('instantiation', cfg.method),
        ('n_runs', cfg.n_runs),
        ('cv_folds', cfg.cv_folds),
        ('seeds', list(cfg.seeds)),
        ('ratios', list(cfg.ratios)),
        ('evaluations', len(results)),
    ])
    report['methods'] = [collections.OrderedDict([
        ('method', m),
        ('n', int(values.size)),
        ('mean', float(values.mean())),
        ('std', float(values.std())),
        ('min', float(values.min())),
        ('max', float(values.max())),
    ]) for m, values in samples.items()]

    tops_losses = samples[cfg.method]
    comparisons = []
    for m in methods:
        if m == cfg.method:
            continue
        baseline_mean = float(samples[m].mean())
        row = collections.OrderedDict([
            ('baseline', m),
            ('baseline_mean', baseline_mean),
            ('tops_mean', float(tops_losses.mean())),
            ('gain', gain(tops_losses.mean(), baseline_mean)
             if baseline_mean > 0 else None),
        ])
        if len(results) >= 2:
            row['p_value'] = t_test(tops_losses, samples[m])
        else:
            logger.warning('One evaluation only: no p-value for %s.', m)
            row['p_value'] = None
            row['note'] = 'p-value absent: fewer than 2 evaluations'
        comparisons.append(row)
    report['comparisons'] = comparisons

    report['evaluations'] = [collections.OrderedDict(
        [('run', r['run']), ('fold', r['fold']), ('seed', r['seed'])] +
        list(r['losses'].items()) +
        [('substituted', ', '.join(r['substituted']) or None)])
        for r in results]
    report['candidates'] = [collections.OrderedDict(
        [('run', r['run']), ('fold', r['fold'])] +
        sorted(r['info'].items())) for r in results]
    return report


def _timing_report(results):
    report = Report()
    report['timing'] = [collections.OrderedDict([
        ('run', r['run']), ('fold', r['fold']), ('seconds', r['seconds'])])
        for r in results]
    report['total'] = {'seconds': sum(r['seconds'] for r in results)}
    return report

