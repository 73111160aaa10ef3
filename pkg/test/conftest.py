from __future__ import unicode_literals, print_function, division

import numpy as np
import pytest

from tops import synthetic
from tops.dataset import normalize, Partition
from tops.learners import instantiation_set
from tops.losses import LossSpec


@pytest.fixture
def toy():
    """The 40-patient diabetic/age-range data, normalized on every row."""
    data = synthetic.toy_dataset()
    normalized, _ = normalize(data, np.arange(data.n_samples))
    return normalized


@pytest.fixture
def toy_rows(toy):
    return np.arange(toy.n_samples)


@pytest.fixture
def toy_partition(toy_rows):
    """S = V1 = V2 = every row."""
    return Partition(toy_rows, toy_rows, toy_rows)


@pytest.fixture
def tent():
    data = synthetic.tent_dataset()
    normalized, _ = normalize(data, np.arange(data.n_samples))
    return normalized


@pytest.fixture
def lr():
    return instantiation_set('tops_lr')


@pytest.fixture
def error_loss():
    return LossSpec('error')


@pytest.fixture
def mae_loss():
    return LossSpec('mae')


@pytest.fixture
def write_csv(tmp_path):
    """Write rows under tmp_path and return the file path."""

    def write(name, header, rows):
        path = tmp_path / name
        lines = [','.join(header)]
        lines.extend(','.join(str(v) for v in row) for row in rows)
        path.write_text('\n'.join(lines) + '\n')
        return str(path)

    return write
