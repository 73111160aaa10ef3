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


"""Command-line interface: train, predict, evaluate, inspect and bench."""

from __future__ import unicode_literals, print_function, division
import io
import os
import sys
import logging
import argparse
import traceback
import collections

import pandas as pd

import tops
from tops import harness, learners
from tops.base import Report
from tops.bounds import bound_report
from tops.conf import Config, load_yaml
from tops.dataset import (load_csv, load_schema, load_features, parse_schema,
                          split_partition, BINARY)
from tops.exceptions import (ToPsError, ConfigError, DataError,
                             LossUndefinedError, TrainingError,
                             UnknownNodeError)
from tops.growth import Limits
from tops.inference import dump_model, load_model
from tops.losses import LossSpec, NAMES, MAE, MSE, ERROR_RATE


logger = logging.getLogger(__name__)

FORMAT = '%(asctime)-15s %(levelname)s %(message)s'

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_TRAINING = 4
EXIT_OTHER = 1

EXIT_CODES = ((ConfigError, EXIT_USAGE),
              (UnknownNodeError, EXIT_USAGE),
              (DataError, EXIT_DATA),
              (LossUndefinedError, EXIT_DATA),
              (TrainingError, EXIT_TRAINING))

# Config keys a flag may override, by argparse destination.
FLAG_KEYS = ('max_depth', 'min_leaf_v1', 'min_train_samples',
             'improvement_tol', 'ratios', 'weight_fit', 'seed', 'jobs',
             'bound_delta', 'rademacher_draws')


def configure_logging():
    """Log to stderr at the level named by TOPS_LOG (default WARNING)."""
    level = os.environ.get('TOPS_LOG', 'WARNING').strip()
    if level.isdigit():
        level = int(level)
    else:
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.WARNING
    logging.basicConfig(format=FORMAT, level=level, stream=sys.stderr)


def error_context(error):
    """Name of the innermost tops module the error went through."""
    root = os.path.dirname(os.path.abspath(tops.__file__))
    context = None
    for frame in traceback.extract_tb(error.__traceback__):
        filename = os.path.abspath(frame.filename)
        if not filename.startswith(root + os.sep):
            continue
        parts = os.path.splitext(os.path.relpath(filename, root))[0] \
            .split(os.sep)
        if parts[-1] == '__init__':
            parts = parts[:-1]
        context = '.'.join(parts) or 'tops'
    return context


def exit_code(error):
    for cls, code in EXIT_CODES:
        if isinstance(error, cls):
            return code
    return EXIT_OTHER


def write_text(path, text):
    with io.open(path, 'w', encoding='utf-8') as outfile:
        outfile.write(text)


def settings(args):
    """Config defaults, then --config, then the flags."""
    cfg = Config()
    if getattr(args, 'config', None):
        cfg.from_yaml(args.config)
    overrides = dict((key, getattr(args, key)) for key in FLAG_KEYS
                     if getattr(args, key, None) is not None)
    if overrides:
        cfg.from_mapping(overrides)
    return cfg


def read_schema(args):
    if args.schema:
        return load_schema(args.schema)
    if not args.label:
        raise ConfigError('either --schema or --label is required')
    return parse_schema({'label': args.label, 'binary': args.binary or []})


def train(args):
    cfg = settings(args)
    schema = read_schema(args)
    data = load_csv(args.data, schema['label'], schema['binary'],
                    schema['label_kind'])
    loss = LossSpec(args.loss) if args.loss else harness.default_loss(data)
    algorithms = learners.instantiation_set(args.learners)
    seed = cfg['SEED']
    partition = split_partition(data, cfg['RATIOS'], seed)

    model, tree, normalized = harness.train_model(
        data, partition, algorithms, loss, Limits.from_config(cfg),
        seed=seed, jobs=cfg['JOBS'], weight_fit=cfg['WEIGHT_FIT'])
    bounds = None
    if args.bounds:
        bounds = bound_report(model, normalized, partition.s_idx,
                              cfg['BOUND_DELTA'], cfg['RADEMACHER_DRAWS'],
                              seed)
    report = harness.training_report(model, tree, bounds)

    write_text(args.out, dump_model(model))
    report.save(args.report or args.out + '.report.yaml')
    print(Report([('model', report['model'])]).as_table())
    return EXIT_OK


def _model_features(model, path):
    return load_features(path, model.normalization.names,
                         model.normalization.label_name)


def predict(args):
    model = load_model(args.model)
    features, _ = _model_features(model, args.data)
    columns = collections.OrderedDict(
        [('score', model.predict_many(features))])
    if model.normalization.label_kind == BINARY:
        columns['class'] = model.classify_many(features)
    frame = pd.DataFrame(columns)
    if args.out:
        frame.to_csv(args.out, index=False, float_format='%.17g')
    else:
        sys.stdout.write(frame.to_csv(index=False, float_format='%.17g'))
    return EXIT_OK


def evaluate(args):
    model = load_model(args.model)
    features, labels = _model_features(model, args.data)
    if labels is None:
        raise DataError('%s: no label column %r' % (
            args.data, model.normalization.label_name))
    scores = model.predict_many(features)

    kinds = [model.loss.kind]
    if model.normalization.label_kind == BINARY:
        kinds.append(ERROR_RATE)
    kinds.extend((MAE, MSE))
    rows = []
    for kind in kinds:
        if any(r['loss'] == kind for r in rows):
            continue
        value, substituted = harness.safe_loss(LossSpec(kind), scores, labels)
        rows.append(collections.OrderedDict([
            ('loss', kind),
            ('value', value),
            ('configured', kind == model.loss.kind),
            ('substituted', substituted)]))
    report = Report([('evaluation', collections.OrderedDict([
        ('data', os.path.basename(args.data)),
        ('rows', int(labels.size)),
        ('terminals', len(model.tree.terminals))])),
        ('losses', rows)])
    if args.out:
        report.save(args.out)
    print(report.as_table())
    return EXIT_OK


def inspect(args):
    model = load_model(args.model)
    dot = harness.model_to_dot(model, args.path)
    write_text(args.dot, dot)

    tree = model.tree
    rows = [collections.OrderedDict([
        ('node', node.id),
        ('learner', node.algorithm),
        ('trained_on', node.trained_on),
        ('marker', harness.hop_marker(node.hops)),
        ('terminal', node.is_terminal),
        ('delta_v', None if node.is_terminal else node.delta_v),
        ('delta_t', model.delta_t.get(node.id) if node.is_terminal
         else None),
    ]) for node in tree.nodes.values()]
    summary = Report([('summary', collections.OrderedDict([
        ('nodes', len(tree.nodes)),
        ('terminals', len(tree.terminals)),
        ('depth', tree.depth),
        ('loss', model.loss.kind)])), ('nodes', rows)])
    print(summary.as_table())
    return EXIT_OK


def bench(args):
    data, lines = load_yaml(args.config)
    if args.seed is not None:
        data['seed'] = args.seed
        data.pop('seeds', None)
    cfg = harness.ExperimentConfig.from_mapping(
        data, lines, os.path.dirname(args.config))
    report, timing = harness.run_experiment(cfg, jobs=args.jobs)

    # Rendered before anything touches the output directory.
    outputs = [('report.yaml', report.as_yaml()),
               ('report.txt', report.as_table()),
               ('timing.yaml', timing.as_yaml())]
    if not os.path.isdir(args.out):
        os.makedirs(args.out)
    for name, text in outputs:
        write_text(os.path.join(args.out, name), text)
    print(Report([('comparisons', report['comparisons'])]).as_table())
    return EXIT_OK


def _add_limits(parser):
    group = parser.add_argument_group('tree growth')
    group.add_argument('--max-depth', type=int)
    group.add_argument('--min-leaf-v1', type=int)
    group.add_argument('--min-train-samples', type=int)
    group.add_argument('--improvement-tol', type=float)


def build_parser():
    parser = argparse.ArgumentParser(
        prog='tops', description='Trees of predictors: grow, weight, apply '
                                 'and benchmark ToPs models.')
    parser.add_argument('--version', action='version',
                        version='%(prog)s ' + tops.__version__)
    sub = parser.add_subparsers(dest='command', metavar='command')
    sub.required = True

    p = sub.add_parser('train', help='grow a tree and fit its path weights')
    p.add_argument('--data', required=True, help='training CSV')
    p.add_argument('--schema', help='schema YAML (label, binary)')
    p.add_argument('--label', help='label column, when no schema is given')
    p.add_argument('--binary', nargs='*', help='binary feature columns')
    p.add_argument('--learners', default='tops_lr',
                   help='tops_lr, tops_b or a comma-separated list of '
                        'learner kinds')
    p.add_argument('--loss', choices=list(NAMES))
    p.add_argument('--seed', type=int)
    p.add_argument('--out', required=True, help='model file to write')
    p.add_argument('--report', help='report file (default: <out>.report.yaml)')
    p.add_argument('--bounds', action='store_true',
                   help='add generalization bounds to the report')
    p.add_argument('--bound-delta', type=float)
    p.add_argument('--rademacher-draws', type=int)
    p.add_argument('--ratios', type=float, nargs=3, metavar=('S', 'V1', 'V2'))
    p.add_argument('--weight-fit', choices=('squared_error',
                                            'configured_loss_gridsearch'))
    p.add_argument('--config', help='YAML file of library parameters')
    p.add_argument('--jobs', type=int)
    _add_limits(p)
    p.set_defaults(func=train)

    p = sub.add_parser('predict', help='score the rows of a CSV')
    p.add_argument('--model', required=True)
    p.add_argument('--data', required=True)
    p.add_argument('--out', help='predictions CSV (default: stdout)')
    p.set_defaults(func=predict)

    p = sub.add_parser('evaluate', help='losses of a model on labelled rows')
    p.add_argument('--model', required=True)
    p.add_argument('--data', required=True)
    p.add_argument('--out', help='report file (.yaml, .json or text)')
    p.set_defaults(func=evaluate)

    p = sub.add_parser('inspect', help='DOT rendering and node summary')
    p.add_argument('--model', required=True)
    p.add_argument('--dot', required=True, help='DOT file to write')
    p.add_argument('--path', type=int, help='terminal node to highlight')
    p.set_defaults(func=inspect)

    p = sub.add_parser('bench', help='run an experiment configuration')
    p.add_argument('--config', required=True)
    p.add_argument('--out', default='.', help='directory of the reports')
    p.add_argument('--seed', type=int)
    p.add_argument('--jobs', type=int)
    p.set_defaults(func=bench)
    return parser


def main(argv=None):
    configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ToPsError as e:
        context = error_context(e)
        message = str(e)
        if context:
            message = '%s: %s' % (context.split('.')[-1], message)
        print('tops: error: %s' % message, file=sys.stderr)
        logger.debug('Traceback:', exc_info=True)
        return exit_code(e)
    except Exception as e:
        print('tops: error: %s: %s' % (type(e).__name__, e), file=sys.stderr)
        logger.debug('Traceback:', exc_info=True)
        return EXIT_OTHER


if __name__ == '__main__':
    sys.exit(main())
