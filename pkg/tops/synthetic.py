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


"""Synthetic datasets used by the tests, the bundled data and the benches.
"""

from __future__ import unicode_literals, print_function, division

import numpy as np

from tops.dataset import Dataset, FeatureSpec, BINARY, CONTINUOUS, REAL


# Positive patients among the five of every (diabetic, age range) cell.
TOY_POSITIVES = {0: (2, 2, 2, 3), 1: (0, 1, 4, 5)}
TOY_CELL_SIZE = 5


def toy_dataset():
    """40 patients: diabetic (0/1) by age range (coded 0..3), five per
    cell. Risk grows with age, much faster for diabetics.

    The best single purity split (age range < 2) makes 11 errors, as does
    the global thresholded linear fit. Linear fits per diabetic half make
    10: they put the non-diabetic threshold between age ranges 2 and 3
    and the diabetic one between 1 and 2.
    """
    rows, labels = [], []
    for diabetic in (0, 1):
        for age in range(4):
            positives = TOY_POSITIVES[diabetic][age]
            for patient in range(TOY_CELL_SIZE):
                rows.append((diabetic, age))
                labels.append(1.0 if patient < positives else 0.0)
    specs = [FeatureSpec(0, 'diabetic', BINARY),
             FeatureSpec(1, 'age_range', CONTINUOUS)]
    return Dataset(rows, labels, specs, BINARY, 'outcome')


def tent(x):
    """y = x below 0.5 and 1 - x from 0.5 on."""
    x = np.asarray(x, dtype=float)
    return np.where(x < 0.5, x, 1.0 - x)


def tent_dataset(n=600):
    """Tent-shaped labels over x1 plus an irrelevant x2 (a fixed
    permutation of the same grid)."""
    i = np.arange(n)
    x1 = i / float(n)
    x2 = ((i * 37) % n) / float(n)
    specs = [FeatureSpec(0, 'x1', CONTINUOUS), FeatureSpec(1, 'x2',
                                                            CONTINUOUS)]
    return Dataset(np.column_stack([x1, x2]), tent(x1), specs, REAL, 'y')


def interaction_dataset(n=500, d=10, noise=0.05, seed=0):
    """Uniform features; the effect of x1 flips sign across x0 = 0.5."""
    rng = np.random.RandomState(seed)
    x = rng.uniform(size=(n, d))
    y = np.where(x[:, 0] < 0.5, x[:, 1], 1.0 - x[:, 1])
    y = y + noise * rng.normal(size=n)
    specs = [FeatureSpec(i, 'x%d' % i, CONTINUOUS) for i in range(d)]
    return Dataset(x, y, specs, REAL, 'y')


def random_binary_dataset(n=200, d=3, seed=0):
    """Uniform features with labels that depend on x0 by quadrant."""
    rng = np.random.RandomState(seed)
    x = rng.uniform(size=(n, d))
    p = np.where(x[:, 0] < 0.5, 0.2 + 0.6 * x[:, 1], 0.8 - 0.6 * x[:, 1])
    y = (rng.uniform(size=n) < p).astype(float)
    specs = [FeatureSpec(i, 'x%d' % i, CONTINUOUS) for i in range(d)]
    return Dataset(x, y, specs, BINARY, 'y')
