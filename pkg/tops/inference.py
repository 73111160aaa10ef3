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


"""The overall predictor H(x): the weighted sum of the node predictions
along the path of x, and its model file."""

from __future__ import unicode_literals, print_function, division
import io
import os
import logging
import datetime

import numpy as np
import yaml

import tops
from tops.dataset import Cell, NormalizationParams
from tops.exceptions import (DataError, ModelFormatError, ChecksumError,
                             ModelVersionError)
from tops.growth import NodeRecord, TreeOfPredictors
from tops.learners import AlgorithmSpec, predictor_from_dict
from tops.losses import LossSpec, THRESHOLD
from tops.utils import sha256_of, to_builtin
from tops.weights import PathWeights


logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
TOP_LEVEL_KEYS = ('format_version', 'loss', 'normalization', 'algorithms',
                  'nodes', 'weights', 'metadata')


class OverallPredictor(object):
    """The deployable model: tree, path weights and normalization.

    Required arguments:
    :tree: a TreeOfPredictors.
    :weights: the PathWeights of its terminals.
    :normalization: the NormalizationParams applied to raw inputs.
    :loss: the LossSpec the tree was grown with.
    :algorithms: the AlgorithmSpec list.

    Optional arguments:
    :metadata: dict (seed, build_timestamp, ...).
    :delta_t: {terminal: loss improvement on V2} computed at training time.
    """

    def __init__(self, tree, weights, normalization, loss, algorithms,
                 metadata=None, delta_t=None):
        for terminal in tree.terminals:
            if terminal not in weights:
                raise ModelFormatError('terminal %d has no weights'
                                       % terminal)
            if list(weights.path(terminal)) != tree.path(terminal):
                raise ModelFormatError('weights of terminal %d do not follow '
                                       'its path' % terminal)
        ids = set(a.id for a in algorithms)
        for node in tree.nodes.values():
            if node.predictor is None or node.algorithm not in ids:
                raise ModelFormatError('node %d references an unknown '
                                       'predictor' % node.id)
            if node.trained_on not in tree.path(node.id):
                raise ModelFormatError('node %d is trained on %r, which is '
                                       'not an ancestor' % (node.id,
                                                            node.trained_on))
        self.tree = tree
        self.weights = weights
        self.normalization = normalization
        self.loss = loss
        self.algorithms = list(algorithms)
        self.metadata = dict(metadata or {})
        self.delta_t = dict(delta_t or {})

    @property
    def n_features(self):
        return self.normalization.n_features

    def predict_normalized(self, features):
        """H on already normalized rows."""
        terminals = self.tree.route(features)
        out = np.zeros(features.shape[0])
        for terminal in np.unique(terminals):
            rows = terminals == terminal
            x = features[rows]
            path, w = self.weights[int(terminal)]
            total = np.zeros(x.shape[0])
            for weight, nid in zip(w, path):
                total = total + weight * \
                    self.tree.nodes[nid].predictor.score_many(x)
            out[rows] = total
        return out

    def predict_many(self, features):
        """H(x) for every row of a raw feature matrix."""
        x = np.asarray(features, dtype=float)
        if x.ndim == 1:
            x = x.reshape(1, -1)
        if x.ndim != 2 or x.shape[1] != self.n_features:
            raise DataError('model expects %d features, got %s'
                            % (self.n_features, x.shape[-1]))
        return self.predict_normalized(self.normalization.apply(x))

    def predict(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim != 1:
            raise DataError('predict expects a single feature vector')
        return float(self.predict_many(x)[0])

    def classify_many(self, features):
        return (self.predict_many(features) >= THRESHOLD).astype(int)

    def classify(self, x):
        return int(self.predict(x) >= THRESHOLD)

    def as_dict(self):
        """The model document, checksum included."""
        nodes = []
        for node in self.tree.nodes.values():
            nodes.append({
                'id': node.id,
                'parent': node.parent,
                'depth': node.depth,
                'cell': node.cell.as_dict(),
                'split': None if node.split is None else
                {'feature': node.split[0], 'threshold': node.split[1]},
                'children': None if node.children is None
                else list(node.children),
                'algorithm': node.algorithm,
                'trained_on': node.trained_on,
                'hops': node.hops,
                'model': node.predictor.as_dict(),
                'delta_v': node.delta_v,
                'v1_loss': node.v1_loss,
                'loss_kind': node.loss_kind,
                'loss_substituted': node.loss_substituted,
                'candidates': node.candidates,
            })
        weights = [{'terminal': terminal, 'path': list(path),
                    'weights': w.tolist(),
                    'delta_t': self.delta_t.get(terminal)}
                   for terminal, path, w in self.weights.items()]
        metadata = dict(self.metadata)
        metadata.pop('checksum', None)
        doc = {'format_version': FORMAT_VERSION,
               'loss': self.loss.as_dict(),
               'normalization': self.normalization.as_dict(),
               'algorithms': [a.as_dict() for a in self.algorithms],
               'nodes': nodes,
               'weights': weights,
               'metadata': metadata}
        doc = to_builtin(doc)
        doc['metadata']['checksum'] = sha256_of(doc)
        return doc

    @classmethod
    def from_dict(cls, doc):
        """Rebuild a model from its document, verifying version, schema and
        checksum."""
        if not isinstance(doc, dict):
            raise ModelFormatError('model document must be a mapping')
        if 'format_version' not in doc:
            raise ModelFormatError('model document has no format_version')
        if doc['format_version'] != FORMAT_VERSION:
            raise ModelVersionError(doc['format_version'], FORMAT_VERSION)
        missing = [k for k in TOP_LEVEL_KEYS if k not in doc]
        if missing:
            raise ModelFormatError('model document lacks %s'
                                   % ', '.join(missing))

        try:
            metadata = dict(doc['metadata'])
            checksum = metadata.get('checksum')
            unsigned = dict(doc, metadata=dict(
                (k, v) for k, v in metadata.items() if k != 'checksum'))
            if checksum != sha256_of(unsigned):
                raise ChecksumError('model checksum mismatch')

            tree = TreeOfPredictors()
            for entry in doc['nodes']:
                node = NodeRecord(entry['id'], Cell.from_dict(entry['cell']),
                                  entry['parent'], entry['depth'],
                                  predictor_from_dict(entry['model']),
                                  hops=entry.get('hops', 0),
                                  v1_loss=entry.get('v1_loss'),
                                  loss_kind=entry.get('loss_kind'),
                                  loss_substituted=entry.get(
                                      'loss_substituted', False))
                if entry['split'] is not None:
                    node.split = (int(entry['split']['feature']),
                                  float(entry['split']['threshold']))
                    node.children = tuple(entry['children'])
                node.delta_v = entry.get('delta_v', 0.0)
                node.candidates = entry.get('candidates', 0)
                tree.add(node)

            weights = PathWeights((w['terminal'], w['path'], w['weights'])
                                  for w in doc['weights'])
            delta_t = dict((w['terminal'], w.get('delta_t'))
                           for w in doc['weights'])
            return cls(tree, weights,
                       NormalizationParams.from_dict(doc['normalization']),
                       LossSpec.from_dict(doc['loss']),
                       [AlgorithmSpec.from_dict(a)
                        for a in doc['algorithms']],
                       metadata=metadata, delta_t=delta_t)
        except ModelFormatError:
            raise
        except (KeyError, TypeError, ValueError, AttributeError) as e:
            raise ModelFormatError('invalid model document: %s: %s'
                                   % (type(e).__name__, e))


def predict(model, x):
    return model.predict(x)


def classify(model, x):
    return model.classify(x)


def build_timestamp():
    """UTC time taken from SOURCE_DATE_EPOCH, or None when unset."""
    epoch = os.environ.get('SOURCE_DATE_EPOCH')
    if not epoch:
        return None
    moment = datetime.datetime.fromtimestamp(int(epoch),
                                             tz=datetime.timezone.utc)
    return moment.strftime('%Y-%m-%dT%H:%M:%SZ')


def default_metadata(seed):
    return {'seed': seed, 'build_timestamp': build_timestamp(),
            'library_version': tops.__version__}


def dump_model(model):
    return yaml.safe_dump(model.as_dict(), sort_keys=False,
                          default_flow_style=None, allow_unicode=True,
                          width=100)


def save_model(model, path):
    with io.open(path, 'w', encoding='utf-8') as outfile:
        outfile.write(dump_model(model))
    logger.info('Saved model to %s.', path)


def load_model(path):
    """Read a model file.

    :raises ModelFormatError: on schema or checksum violations.
    :raises ModelVersionError: on an unsupported format version.
    """
    try:
        with io.open(path, 'r', encoding='utf-8') as infile:
            doc = yaml.safe_load(infile)
    except (IOError, OSError) as e:
        raise DataError('cannot read model %s: %s' % (path, e))
    except yaml.YAMLError as e:
        raise ModelFormatError('%s: not a model document: %s' % (path, e))
    return OverallPredictor.from_dict(doc)
