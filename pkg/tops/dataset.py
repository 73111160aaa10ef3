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


"""Tabular data ingestion, normalization to [0, 1], the S/V1/V2 partition
and restriction of sample sets to cells of the feature space."""

from __future__ import unicode_literals, print_function, division
import collections
import logging
import math

import numpy as np
import pandas as pd

from tops.exceptions import DataError, ConfigError, SchemaMismatchError
from tops.conf import load_yaml
from tops.utils import derive_seed


logger = logging.getLogger(__name__)

BINARY = 'binary'
CONTINUOUS = 'continuous'
REAL = 'real'

# Upper bound of the root cell, so that a normalized value of 1.0 is a member.
ROOT_EPSILON = 1e-9


class FeatureSpec(collections.namedtuple('FeatureSpec', 'index name kind')):
    """Position, name and kind (binary or continuous) of one feature."""

    __slots__ = ()

    @property
    def is_binary(self):
        return self.kind == BINARY


class Dataset(object):
    """A feature matrix with labels and per-feature metadata.

    The arrays are read-only: every operation returns a new Dataset.
    """

    def __init__(self, features, labels, specs=None, label_kind=None,
                 label_name='y'):
        features = np.array(features, dtype=float)
        labels = np.array(labels, dtype=float)
        if features.ndim == 1:
            features = features.reshape(-1, 1)
        if features.ndim != 2:
            raise DataError('features must be a matrix')
        n, d = features.shape
        if n < 1 or d < 1:
            raise DataError('a dataset needs at least one row and one feature')
        if labels.shape != (n,):
            raise DataError('expected %d labels, got %d' % (n, labels.size))
        if not np.all(np.isfinite(features)) or \
                not np.all(np.isfinite(labels)):
            raise DataError('missing or non-finite values are not allowed')

        if specs is None:
            specs = [FeatureSpec(i, 'x%d' % i, CONTINUOUS) for i in range(d)]
        specs = [FeatureSpec(*s) for s in specs]
        if [s.index for s in specs] != list(range(d)):
            raise DataError('feature indices must be 0..%d without gaps'
                            % (d - 1))
        for s in specs:
            if s.kind not in (BINARY, CONTINUOUS):
                raise DataError('unknown feature kind %r' % s.kind)
            if s.is_binary:
                bad = ~np.isin(features[:, s.index], (0.0, 1.0))
                if bad.any():
                    row = int(np.nonzero(bad)[0][0])
                    raise DataError('row %d, column %r: binary feature has '
                                    'value %r' % (row + 1, s.name,
                                                  features[row, s.index]))

        if label_kind is None:
            label_kind = BINARY if np.all(np.isin(labels, (0.0, 1.0))) \
                else REAL
        elif label_kind not in (BINARY, REAL):
            raise DataError('unknown label kind %r' % label_kind)
        elif label_kind == BINARY and not np.all(np.isin(labels, (0.0, 1.0))):
            raise DataError('binary labels must be 0 or 1')

        features.flags.writeable = False
        labels.flags.writeable = False
        self.features = features
        self.labels = labels
        self.specs = tuple(specs)
        self.label_kind = label_kind
        self.label_name = label_name

    @property
    def n_samples(self):
        return self.features.shape[0]

    @property
    def n_features(self):
        return self.features.shape[1]

    @property
    def names(self):
        return [s.name for s in self.specs]

    def subset(self, rows):
        """Return a Dataset holding only the given rows, in that order."""
        rows = np.asarray(rows, dtype=int)
        return Dataset(self.features[rows], self.labels[rows], self.specs,
                       self.label_kind, self.label_name)

    def with_features(self, features):
        return Dataset(features, self.labels, self.specs, self.label_kind,
                       self.label_name)

    def pop_feature(self, name):
        """Remove a feature, returning (dataset without it, its values)."""
        if name not in self.names:
            raise DataError('no such column %r' % name)
        j = self.names.index(name)
        keep = [i for i in range(self.n_features) if i != j]
        if not keep:
            raise DataError('cannot remove the only feature %r' % name)
        specs = [FeatureSpec(k, self.specs[i].name, self.specs[i].kind)
                 for k, i in enumerate(keep)]
        return (Dataset(self.features[:, keep], self.labels, specs,
                        self.label_kind, self.label_name),
                self.features[:, j].copy())

    def __repr__(self):
        return '<Dataset: N=%d, d=%d, label %s>' % (
            self.n_samples, self.n_features, self.label_kind)


class NormalizationParams(object):
    """Min/max of every feature observed on the fitting rows. Binary
    features keep min 0 and max 1, which maps them onto themselves."""

    def __init__(self, specs, mins, maxs, label_name='y', label_kind=None):
        self.specs = tuple(FeatureSpec(*s) for s in specs)
        self.mins = np.asarray(mins, dtype=float)
        self.maxs = np.asarray(maxs, dtype=float)
        if np.any(self.mins > self.maxs):
            raise DataError('normalization min must not exceed max')
        self.label_name = label_name
        self.label_kind = label_kind

    @property
    def n_features(self):
        return len(self.specs)

    @property
    def names(self):
        return [s.name for s in self.specs]

    def apply(self, features):
        """Map raw features into [0, 1]; constant features become 0 and
        out-of-range values are clamped."""
        x = np.array(features, dtype=float)
        if x.ndim == 1:
            x = x.reshape(1, -1)
        if x.shape[1] != self.n_features:
            raise DataError('expected %d features, got %d'
                            % (self.n_features, x.shape[1]))
        span = self.maxs - self.mins
        constant = span <= 0
        safe = np.where(constant, 1.0, span)
        out = (x - self.mins) / safe
        out[:, constant] = 0.0
        return np.clip(out, 0.0, 1.0)

    def as_dict(self):
        return {'features': [{'index': s.index, 'name': s.name,
                              'kind': s.kind, 'min': float(lo),
                              'max': float(hi)}
                             for s, lo, hi in zip(self.specs,
                                                  self.mins.tolist(),
                                                  self.maxs.tolist())],
                'label': self.label_name,
                'label_kind': self.label_kind}

    @classmethod
    def from_dict(cls, d):
        features = d['features']
        specs = [(f['index'], f['name'], f['kind']) for f in features]
        return cls(specs, [f['min'] for f in features],
                   [f['max'] for f in features], d.get('label', 'y'),
                   d.get('label_kind'))


class Partition(collections.namedtuple('Partition', 's_idx v1_idx v2_idx')):
    """Disjoint row index sets: training set S, first validation set V1
    (split and learner selection) and second validation set V2 (path
    weights)."""

    __slots__ = ()


class Cell(object):
    """An axis-aligned box: lower <= x_i < upper for every feature i."""

    def __init__(self, lower, upper):
        self.lower = tuple(float(v) for v in lower)
        self.upper = tuple(float(v) for v in upper)
        if len(self.lower) != len(self.upper):
            raise ValueError('cell bounds have different dimensions')
        for lo, hi in zip(self.lower, self.upper):
            if not lo < hi:
                raise ValueError('empty cell interval [%r, %r)' % (lo, hi))

    @classmethod
    def root(cls, n_features):
        return cls([0.0] * n_features, [1.0 + ROOT_EPSILON] * n_features)

    @property
    def n_features(self):
        return len(self.lower)

    def split(self, feature, threshold):
        """Split into (x_feature < threshold, x_feature >= threshold)."""
        if not self.lower[feature] < threshold < self.upper[feature]:
            raise ValueError('threshold %r does not split feature %d'
                             % (threshold, feature))
        upper = list(self.upper)
        upper[feature] = threshold
        lower = list(self.lower)
        lower[feature] = threshold
        return Cell(self.lower, upper), Cell(lower, self.upper)

    def contains(self, features):
        """Boolean membership mask of the rows of a feature matrix."""
        x = np.asarray(features, dtype=float)
        if x.ndim == 1:
            x = x.reshape(1, -1)
        return np.all((x >= np.asarray(self.lower)) &
                      (x < np.asarray(self.upper)), axis=1)

    def issubset(self, other):
        return all(a >= c and b <= d for a, b, c, d in
                   zip(self.lower, self.upper, other.lower, other.upper))

    @property
    def key(self):
        return repr((self.lower, self.upper))

    def as_dict(self):
        return {'lower': list(self.lower), 'upper': list(self.upper)}

    @classmethod
    def from_dict(cls, d):
        return cls(d['lower'], d['upper'])

    def __eq__(self, other):
        return isinstance(other, Cell) and self.lower == other.lower \
            and self.upper == other.upper

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.lower, self.upper))

    def __repr__(self):
        return '<Cell %s>' % ', '.join('[%g, %g)' % b for b in
                                       zip(self.lower, self.upper))


def load_schema(path):
    """Read a schema document: label column, binary columns and,
    optionally, the label kind.

    :returns: a dict with keys label, binary and label_kind.
    """
    data, lines = load_yaml(path)
    return parse_schema(data, lines)


def parse_schema(data, lines=None):
    lines = lines or {}
    if not isinstance(data, dict):
        raise ConfigError('schema must be a mapping')
    unknown = set(data) - set(['label', 'binary', 'label_kind'])
    for key in sorted(unknown):
        raise ConfigError('schema: unknown key %r' % key, line=lines.get(key))
    if 'label' not in data:
        raise ConfigError('schema: missing "label"')
    binary = data.get('binary') or []
    if not isinstance(binary, list):
        raise ConfigError('schema: "binary" must be a list of column names',
                          line=lines.get('binary'))
    label_kind = data.get('label_kind')
    if label_kind not in (None, BINARY, REAL):
        raise ConfigError('schema: label_kind must be binary or real',
                          line=lines.get('label_kind'))
    return {'label': str(data['label']),
            'binary': [str(b) for b in binary],
            'label_kind': label_kind}


def _numeric_frame(frame):
    """Convert every cell of a string frame to float, rejecting missing
    and non-numeric values with their location."""
    values = np.empty(frame.shape, dtype=float)
    for j, column in enumerate(frame.columns):
        raw = frame[column]
        stripped = raw.str.strip()
        missing = stripped == ''
        if missing.any():
            row = int(np.nonzero(missing.values)[0][0])
            raise DataError('row %d, column %r: missing value (impute before '
                            'loading)' % (row + 1, column))
        numeric = pd.to_numeric(stripped, errors='coerce')
        bad = numeric.isna() | ~np.isfinite(numeric.astype(float))
        if bad.any():
            row = int(np.nonzero(bad.values)[0][0])
            raise DataError('row %d, column %r: non-numeric value %r'
                            % (row + 1, column, raw.iloc[row]))
        values[:, j] = stripped.astype(float).values
    return values


def _read_frame(path):
    try:
        return pd.read_csv(path, dtype=str, keep_default_na=False,
                           skipinitialspace=True, encoding='utf-8')
    except (IOError, OSError) as e:
        raise DataError('cannot read %s: %s' % (path, e))
    except (pd.errors.ParserError, pd.errors.EmptyDataError,
            UnicodeDecodeError) as e:
        raise DataError('%s: malformed CSV: %s' % (path, e))


def load_features(path, names, label_column=None):
    """Load the named feature columns of a CSV file, in the given order.

    Required arguments:
    :path: the CSV file.
    :names: the feature names a model was trained on.

    Optional arguments:
    :label_column: when given and present, its values are returned too.

    :returns: (feature matrix, labels or None).
    :raises SchemaMismatchError: when a named column is absent.
    """
    frame = _read_frame(path)
    columns = [str(c) for c in frame.columns]
    missing = [name for name in names if name not in columns]
    if missing:
        raise SchemaMismatchError('%s: missing feature column(s) %s'
                                  % (path, ', '.join(repr(m)
                                                     for m in missing)))
    if len(frame) == 0:
        raise DataError('%s: no data rows' % path)
    wanted = list(names)
    has_label = label_column is not None and label_column in columns
    if has_label:
        wanted.append(label_column)
    values = _numeric_frame(frame[wanted])
    labels = values[:, -1] if has_label else None
    return values[:, :len(names)], labels


def load_csv(path, label_column, binary_columns=(), label_kind=None):
    """Load a CSV file with a header row into a Dataset.

    Required arguments:
    :path: the CSV file.
    :label_column: name of the label column.

    Optional arguments:
    :binary_columns: names of the columns holding 0/1 features; every other
        non-label column is continuous.
    :label_kind: 'binary' or 'real'; inferred from the labels when None.

    :returns: a Dataset. Rows are numbered from 1 (the first data row) in
        error messages.
    """
    frame = _read_frame(path)
    columns = [str(c) for c in frame.columns]
    if label_column not in columns:
        raise DataError('%s: no label column %r' % (path, label_column))
    binary_columns = set(binary_columns)
    for name in sorted(binary_columns - set(columns)):
        raise DataError('%s: declared binary column %r is absent'
                        % (path, name))
    if len(frame) == 0:
        raise DataError('%s: no data rows' % path)

    values = _numeric_frame(frame)
    label_j = columns.index(label_column)
    feature_js = [j for j in range(len(columns)) if j != label_j]
    if not feature_js:
        raise DataError('%s: no feature columns' % path)

    specs = []
    for index, j in enumerate(feature_js):
        kind = BINARY if columns[j] in binary_columns else CONTINUOUS
        specs.append(FeatureSpec(index, columns[j], kind))

    logger.info('Loaded %s: %d rows, %d features.', path, len(frame),
                len(feature_js))
    return Dataset(values[:, feature_js], values[:, label_j], specs,
                   label_kind, label_column)


def fit_normalization(data, fit_on):
    """Compute NormalizationParams over the fit_on rows."""
    fit_on = np.asarray(fit_on, dtype=int)
    if fit_on.size == 0:
        raise DataError('normalization needs at least one row')
    x = data.features[fit_on]
    mins = x.min(axis=0)
    maxs = x.max(axis=0)
    for s in data.specs:
        if s.is_binary:
            mins[s.index], maxs[s.index] = 0.0, 1.0
    return NormalizationParams(data.specs, mins, maxs, data.label_name,
                               data.label_kind)


def normalize(data, fit_on):
    """Min-max normalize continuous features using the fit_on rows.

    :returns: (normalized Dataset, NormalizationParams).
    """
    params = fit_normalization(data, fit_on)
    return data.with_features(params.apply(data.features)), params


def split_partition(data, ratios=(0.75, 0.15, 0.10), seed=0):
    """Shuffle the rows and cut them into S, V1 and V2.

    :data: a Dataset or a row count.
    :ratios: proportions of S, V1 and V2, summing to 1.
    :seed: seed of the shuffle.
    :returns: a Partition of index arrays.
    """
    n = data if isinstance(data, (int, np.integer)) else data.n_samples
    ratios = tuple(float(r) for r in ratios)
    if len(ratios) != 3 or any(r < 0 for r in ratios) \
            or abs(sum(ratios) - 1.0) > 1e-9:
        raise DataError('ratios must be three non-negative numbers summing '
                        'to 1, got %r' % (ratios,))

    order = np.random.RandomState(derive_seed(seed, 'partition')) \
        .permutation(n)
    first = int(math.floor(ratios[0] * n + 1e-9))
    second = int(math.floor((ratios[0] + ratios[1]) * n + 1e-9))
    parts = Partition(order[:first], order[first:second], order[second:])
    for name, part in zip(('S', 'V1', 'V2'), parts):
        if part.size == 0:
            raise DataError('partition of %d rows with ratios %r leaves %s '
                            'empty' % (n, ratios, name))
    return parts


def restrict(rows, data, cell):
    """Return the rows (kept in input order) whose features lie in cell."""
    rows = np.asarray(rows, dtype=int)
    if rows.size == 0:
        return rows
    features = data.features if isinstance(data, Dataset) else data
    return rows[cell.contains(features[rows])]
