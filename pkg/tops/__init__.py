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


from __future__ import unicode_literals, print_function, division

__version__ = '0.1.0'

from tops.conf import config, Config
from tops.exceptions import (ToPsError, ConfigError, DataError,
                             TrainingError, ModelFormatError)
from tops.base import Report
from tops.dataset import (Dataset, FeatureSpec, Cell, Partition,
                          NormalizationParams, load_csv, normalize,
                          split_partition, restrict)
from tops.losses import LossSpec, ScoredSet, auc, loss
from tops.learners import AlgorithmSpec, train, score, instantiation_set
from tops.growth import (TreeOfPredictors, NodeRecord, candidate_thresholds,
                         fit_root, evaluate_split, grow)
from tops.weights import PathWeights, optimize_weights
from tops.inference import (OverallPredictor, predict, classify, save_model,
                            load_model)
from tops.bounds import (terminal_bound, aggregate_bound, theorem1_bound,
                         corollary_bound, rademacher_estimate, bound_report)
from tops.harness import (ExperimentConfig, run_experiment, train_model,
                          gain, t_test, export_dot)
