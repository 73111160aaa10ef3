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


"""Growing the locally optimal tree of predictors.

Every terminal node is split on the (feature, threshold) whose children,
each carrying the best (algorithm, training node) pair drawn from the
child itself and its ancestors, minimize the joint loss on V1. A node is
split only when that joint loss is strictly below the node's own loss.
"""

from __future__ import unicode_literals, print_function, division
import collections
import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from tops.conf import config
from tops.dataset import Cell, restrict
from tops.exceptions import TrainingError
from tops.losses import ScoredSet, loss as compute_loss, joint_loss, \
    effective_spec
from tops.resource_pool import TrainingPool


logger = logging.getLogger(__name__)

PERCENTILES = np.arange(10, 100, 10)


class Limits(collections.namedtuple(
        'Limits', 'max_depth min_leaf_v1 min_train_samples improvement_tol')):
    __slots__ = ()

    @classmethod
    def from_config(cls, cfg=None, **overrides):
        cfg = config if cfg is None else cfg
        values = {'max_depth': cfg['MAX_DEPTH'],
                  'min_leaf_v1': cfg['MIN_LEAF_V1'],
                  'min_train_samples': cfg['MIN_TRAIN_SAMPLES'],
                  'improvement_tol': cfg['IMPROVEMENT_TOL']}
        values.update((k, v) for k, v in overrides.items() if v is not None)
        return cls(**values)


class NodeRecord(object):
    """A node of the tree: its cell, its predictor h_C and, once split, the
    split and children.

    :hops: distance from this node up to the node its predictor was trained
        on (0 when trained on the node itself).
    :delta_v: V1 loss improvement achieved by this node's split (0 at
        terminals).
    :v1_loss: L(h_C, V1(C)), with loss_kind naming the loss actually used.
    """

    def __init__(self, id, cell, parent, depth, predictor, hops=0,
                 v1_loss=None, loss_kind=None, loss_substituted=False):
        self.id = id
        self.cell = cell
        self.parent = parent
        self.depth = depth
        self.predictor = predictor
        self.hops = hops
        self.v1_loss = v1_loss
        self.loss_kind = loss_kind
        self.loss_substituted = loss_substituted
        self.split = None
        self.children = None
        self.delta_v = 0.0
        self.candidates = 0

    @property
    def is_terminal(self):
        return self.children is None

    @property
    def trained_on(self):
        return self.predictor.trained_on

    @property
    def algorithm(self):
        return self.predictor.algorithm

    def __repr__(self):
        return '<NodeRecord %d: %s%s>' % (
            self.id, self.algorithm,
            ' split x%d < %g' % self.split if self.split else '')


class TreeOfPredictors(object):
    """Nodes indexed by id; the root is node 0 and children always get
    larger ids than their parent."""

    root = 0

    def __init__(self, nodes=(), history=None):
        self.nodes = collections.OrderedDict()
        for node in nodes:
            self.add(node)
        self.history = list(history or [])

    def add(self, node):
        self.nodes[node.id] = node

    @property
    def next_id(self):
        return max(self.nodes) + 1 if self.nodes else 0

    @property
    def terminals(self):
        return [nid for nid, node in self.nodes.items() if node.is_terminal]

    @property
    def depth(self):
        return max(node.depth for node in self.nodes.values())

    @property
    def n_splits(self):
        return sum(1 for node in self.nodes.values() if not node.is_terminal)

    def path(self, node_id):
        """Node ids from the root down to node_id."""
        path = []
        while node_id is not None:
            path.append(node_id)
            node_id = self.nodes[node_id].parent
        return path[::-1]

    def route(self, features):
        """Terminal id of every row of a normalized feature matrix."""
        x = np.asarray(features, dtype=float)
        if x.ndim == 1:
            x = x.reshape(1, -1)
        where = np.full(x.shape[0], self.root, dtype=int)
        for node in self.nodes.values():
            if node.split is None:
                continue
            here = where == node.id
            if not here.any():
                continue
            feature, threshold = node.split
            left = x[:, feature] < threshold
            where[here & left] = node.children[0]
            where[here & ~left] = node.children[1]
        return where

    def terminal_of(self, x):
        return int(self.route(x)[0])

    def match_statistics(self):
        """Count nodes by training-set distance and by learner."""
        hops = collections.Counter(n.hops for n in self.nodes.values())
        algorithms = collections.Counter(n.algorithm
                                         for n in self.nodes.values())
        return {'hops': dict(sorted(hops.items())),
                'algorithms': dict(sorted(algorithms.items()))}


SideChoice = collections.namedtuple('SideChoice',
                                    'algorithm_index hops predictor scored')

SplitCandidate = collections.namedtuple(
    'SplitCandidate', 'feature threshold joint_loss left right')


def candidate_thresholds(feature, values=None):
    """Thresholds tried for one feature at a node.

    :feature: the FeatureSpec.
    :values: the node's training values of the feature.
    :returns: [0.5] for binary features; the deduplicated 10th..90th
        percentiles of the values otherwise. Thresholds that leave every
        value on one side are dropped.
    """
    values = None if values is None else np.asarray(values, dtype=float)
    if feature.is_binary:
        thresholds = np.array([0.5])
    elif values is None or values.size == 0:
        return []
    else:
        thresholds = np.unique(np.percentile(values, PERCENTILES))

    if values is not None and values.size:
        low, high = values.min(), values.max()
        thresholds = thresholds[(thresholds > low) & (thresholds <= high)]
    return [float(t) for t in thresholds]


class TreeGrower(object):
    """Grows a tree of predictors on fixed S and V1 row sets.

    Required arguments:
    :data: the normalized Dataset.
    :s_idx: rows of the training set S.
    :v1_idx: rows of the first validation set V1.
    :algorithms: list of AlgorithmSpec; its order breaks ties.
    :loss: the LossSpec.

    Optional arguments:
    :limits: a Limits (default from config).
    :seed: global seed; learner seeds derive from it.
    :jobs: number of threads evaluating candidate splits.
    :pool: a TrainingPool to share trained predictors.
    """

    def __init__(self, data, s_idx, v1_idx, algorithms, loss, limits=None,
                 seed=0, jobs=1, pool=None):
        if len(s_idx) == 0 or len(v1_idx) == 0:
            raise TrainingError('S and V1 must be non-empty')
        if not algorithms:
            raise TrainingError('no algorithms to grow the tree with')
        self.data = data
        self.s_idx = np.asarray(s_idx, dtype=int)
        self.v1_idx = np.asarray(v1_idx, dtype=int)
        self.algorithms = list(algorithms)
        self.loss = loss
        self.limits = limits or Limits.from_config()
        self.seed = seed
        self.jobs = max(1, int(jobs))
        self.pool = pool or TrainingPool(data, self.s_idx, seed,
                                         self.limits.min_train_samples)

    def _scored(self, predictor, rows):
        return ScoredSet(predictor.score_many(self.data.features[rows]),
                         self.data.labels[rows])

    def fit_root(self):
        """Select the root predictor: the algorithm trained on S with the
        lowest V1 loss (first listed wins ties)."""
        cell = Cell.root(self.data.n_features)
        spec, substituted = effective_spec(self.loss,
                                           self.data.labels[self.v1_idx])
        if substituted:
            logger.warning('V1 holds a single class; the root compares '
                           'learners by error rate.')

        best = None
        for algorithm in self.algorithms:
            predictor = self.pool.fit(algorithm, cell)
            if predictor is None:
                continue
            value = compute_loss(spec, self._scored(predictor, self.v1_idx))
            logger.debug('Root candidate %s: V1 loss %g.', algorithm.id,
                         value)
            if best is None or value < best[0]:
                best = (value, predictor)

        if best is None:
            raise TrainingError('no algorithm could be trained on S (%d rows)'
                                % self.s_idx.size)
        logger.info('Root predictor %s, V1 loss %g.', best[1].algorithm,
                    best[0])
        return NodeRecord(TreeOfPredictors.root, cell, None, 0,
                          best[1].attached(TreeOfPredictors.root),
                          v1_loss=best[0], loss_kind=spec.kind,
                          loss_substituted=substituted)

    def _side_choices(self, cell, chain, rows):
        training = [(0, cell)]
        training.extend((hops + 1, node.cell)
                        for hops, node in enumerate(chain))
        choices = []
        for index, algorithm in enumerate(self.algorithms):
            for hops, training_cell in training:
                predictor = self.pool.fit(algorithm, training_cell)
                if predictor is not None:
                    choices.append(SideChoice(index, hops, predictor,
                                              self._scored(predictor, rows)))
        return choices

    def evaluate_split(self, node, feature, threshold, tree):
        """Best (h-, h+) pair for one candidate split of node.

        :returns: a SplitCandidate, or None when a child has too few V1 rows
            or no predictor can be trained for it.
        """
        left_cell, right_cell = node.cell.split(feature, threshold)
        v1_rows = restrict(self.v1_idx, self.data, node.cell)
        go_left = self.data.features[v1_rows, feature] < threshold
        left_rows, right_rows = v1_rows[go_left], v1_rows[~go_left]
        min_leaf = max(1, self.limits.min_leaf_v1)
        if left_rows.size < min_leaf or right_rows.size < min_leaf:
            return None

        chain = [tree.nodes[nid] for nid in tree.path(node.id)[::-1]]
        left = self._side_choices(left_cell, chain, left_rows)
        right = self._side_choices(right_cell, chain, right_rows)
        if not left or not right:
            return None

        spec, _ = effective_spec(self.loss, self.data.labels[v1_rows])
        if spec.additive:
            # The joint loss is a weighted mean of the sides' losses, so
            # each side is minimized on its own.
            def side_best(choices):
                best, best_value = None, None
                for choice in choices:
                    value = compute_loss(spec, choice.scored)
                    if best is None or value < best_value:
                        best, best_value = choice, value
                return best

            l, r = side_best(left), side_best(right)
            return SplitCandidate(feature, threshold,
                                  joint_loss(spec, [l.scored, r.scored]),
                                  l, r)

        best = None
        for l in left:
            for r in right:
                value = joint_loss(spec, [l.scored, r.scored])
                if best is None or value < best.joint_loss:
                    best = SplitCandidate(feature, threshold, value, l, r)
        return best

    def candidates(self, node):
        """(feature, threshold) pairs tried at node, in tie-break order."""
        rows = self.pool.rows(node.cell)
        pairs = []
        for feature in self.data.specs:
            values = self.data.features[rows, feature.index]
            for threshold in candidate_thresholds(feature, values):
                pairs.append((feature.index, threshold))
        return pairs

    def best_split(self, node, tree, executor=None):
        """Evaluate every candidate of node and reduce them in (feature,
        threshold) order, keeping the first strictly smallest joint loss.

        :returns: (SplitCandidate or None, number of candidates).
        """
        pairs = self.candidates(node)

        def evaluate(pair):
            return self.evaluate_split(node, pair[0], pair[1], tree)

        if executor is not None:
            results = executor.map(evaluate, pairs)
        else:
            results = (evaluate(pair) for pair in pairs)

        best = None
        for candidate in results:
            if candidate is None:
                continue
            if best is None or candidate.joint_loss < best.joint_loss:
                best = candidate
        return best, len(pairs)

    def _required_margin(self, node, v1_count):
        tol = self.limits.improvement_tol
        if self.loss.additive and v1_count:
            # Scale so the global V1 loss also drops by more than tol.
            return tol * max(1.0, self.v1_idx.size / float(v1_count))
        return tol

    def grow(self):
        """Grow the tree breadth-first until no terminal improves.

        :returns: a TreeOfPredictors whose history records the V1 loss of
            the terminal predictors after every accepted split.
        """
        tree = TreeOfPredictors()
        tree.add(self.fit_root())

        features, labels = self.data.features, self.data.labels
        position = np.empty(self.data.n_samples, dtype=int)
        position[self.v1_idx] = np.arange(self.v1_idx.size)
        v1_scores = tree.nodes[tree.root].predictor.score_many(
            features[self.v1_idx])
        global_spec, _ = effective_spec(self.loss, labels[self.v1_idx])

        def global_loss():
            return compute_loss(global_spec,
                                ScoredSet(v1_scores, labels[self.v1_idx]))

        tree.history.append({'step': 0, 'node': None, 'feature': None,
                             'threshold': None, 'v1_loss': global_loss()})

        executor = ThreadPoolExecutor(max_workers=self.jobs) \
            if self.jobs > 1 else None
        try:
            queue = collections.deque([tree.root])
            while queue:
                node = tree.nodes[queue.popleft()]
                if node.depth >= self.limits.max_depth:
                    continue
                best, count = self.best_split(node, tree, executor)
                node.candidates = count
                if best is None:
                    continue
                v1_rows = restrict(self.v1_idx, self.data, node.cell)
                margin = self._required_margin(node, v1_rows.size)
                if not best.joint_loss < node.v1_loss - margin:
                    continue

                self._split(tree, node, best, v1_rows)
                for child_id in node.children:
                    child = tree.nodes[child_id]
                    rows = restrict(v1_rows, self.data, child.cell)
                    v1_scores[position[rows]] = \
                        child.predictor.score_many(features[rows])
                    queue.append(child_id)

                tree.history.append({'step': len(tree.history),
                                     'node': node.id,
                                     'feature': best.feature,
                                     'threshold': best.threshold,
                                     'v1_loss': global_loss()})
        finally:
            if executor is not None:
                executor.shutdown()

        logger.info('Grown tree: %d nodes, %d terminals, depth %d.',
                    len(tree.nodes), len(tree.terminals), tree.depth)
        return tree

    def _split(self, tree, node, best, v1_rows):
        chain = tree.path(node.id)[::-1]
        cells = node.cell.split(best.feature, best.threshold)
        first = tree.next_id
        for offset, (cell, choice) in enumerate(zip(cells,
                                                    (best.left, best.right))):
            child_id = first + offset
            trained_on = child_id if choice.hops == 0 \
                else chain[choice.hops - 1]
            rows = restrict(v1_rows, self.data, cell)
            spec, substituted = effective_spec(self.loss,
                                               self.data.labels[rows])
            tree.add(NodeRecord(child_id, cell, node.id, node.depth + 1,
                                choice.predictor.attached(trained_on),
                                hops=choice.hops,
                                v1_loss=compute_loss(spec, choice.scored),
                                loss_kind=spec.kind,
                                loss_substituted=substituted))

        node.split = (best.feature, best.threshold)
        node.children = (first, first + 1)
        node.delta_v = node.v1_loss - best.joint_loss
        logger.info('Split node %d on x%d < %g: V1 loss %g -> %g.', node.id,
                    best.feature, best.threshold, node.v1_loss,
                    best.joint_loss)


def fit_root(data, s_idx, v1_idx, algorithms, loss, seed=0, pool=None):
    return TreeGrower(data, s_idx, v1_idx, algorithms, loss, seed=seed,
                      pool=pool).fit_root()


def evaluate_split(node, feature, threshold, tree, data, s_idx, v1_idx,
                   algorithms, loss, limits=None, seed=0, pool=None):
    grower = TreeGrower(data, s_idx, v1_idx, algorithms, loss, limits=limits,
                        seed=seed, pool=pool)
    return grower.evaluate_split(node, feature, threshold, tree)


def grow(data, s_idx, v1_idx, algorithms, loss, limits=None, seed=0, jobs=1):
    """Grow the locally optimal tree of predictors.

    :returns: a TreeOfPredictors.
    """
    return TreeGrower(data, s_idx, v1_idx, algorithms, loss, limits=limits,
                      seed=seed, jobs=jobs).grow()
