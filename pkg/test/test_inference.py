from __future__ import unicode_literals, print_function, division

import numpy as np
import pytest
import yaml
from numpy.testing import assert_allclose, assert_array_equal

from tops import synthetic
from tops.dataset import split_partition, Partition
from tops.exceptions import (ModelFormatError, ChecksumError,
                             ModelVersionError, DataError)
from tops.growth import Limits
from tops.harness import train_model
from tops.inference import (OverallPredictor, FORMAT_VERSION, dump_model,
                            save_model, load_model, build_timestamp, predict,
                            classify)
from tops.learners import instantiation_set
from tops.losses import LossSpec
from tops.weights import PathWeights


@pytest.fixture
def tent_model():
    data = synthetic.tent_dataset()
    partition = split_partition(data, (0.6, 0.2, 0.2), seed=0)
    model, _, _ = train_model(data, partition, instantiation_set('tops_lr'),
                              LossSpec('mae'), seed=0)
    return model, data


@pytest.fixture
def toy_model():
    data = synthetic.toy_dataset()
    rows = np.arange(data.n_samples)
    model, _, _ = train_model(data, Partition(rows, rows, rows),
                              instantiation_set('tops_lr'), LossSpec('error'))
    return model, data


def test_prediction_is_weighted_path_sum(tent_model):
    model, data = tent_model
    x = data.features[123]
    normalized = model.normalization.apply(x)
    terminal = model.tree.terminal_of(normalized)
    path, w = model.weights[terminal]
    expected = sum(weight * model.tree.nodes[nid].predictor.score(
        normalized[0]) for weight, nid in zip(w, path))
    assert predict(model, x) == pytest.approx(expected)


def test_batch_and_single_predictions_agree(tent_model):
    model, data = tent_model
    batch = model.predict_many(data.features)
    single = [model.predict(row) for row in data.features[:25]]
    assert_array_equal(batch[:25], single)


def test_tent_fit_is_close(tent_model):
    model, data = tent_model
    error = np.abs(model.predict_many(data.features) - data.labels).mean()
    assert error < 0.02


def test_root_only_model():
    data = synthetic.toy_dataset()
    rows = np.arange(data.n_samples)
    model, _, _ = train_model(data, Partition(rows, rows, rows),
                              instantiation_set('tops_lr'), LossSpec('error'),
                              limits=Limits.from_config(max_depth=0))
    assert model.tree.terminals == [0]
    path, w = model.weights[0]
    assert path == [0]
    assert_allclose(w, [1.0])
    root = model.tree.nodes[0].predictor
    normalized = model.normalization.apply(data.features)
    assert_allclose(model.predict_many(data.features),
                    root.score_many(normalized))
    classes = [classify(model, row) for row in data.features]
    assert set(classes) <= set([0, 1])
    assert sum(c != y for c, y in zip(classes, data.labels)) == 11


def test_toy_model_errors(toy_model):
    model, data = toy_model
    assert len(model.tree.terminals) == 2
    classes = model.classify_many(data.features)
    assert int((classes != data.labels).sum()) == 10


def test_one_terminal_predicts_both_classes(toy_model):
    # Young and old non-diabetics share a terminal but not a class.
    model, _ = toy_model
    young, old = np.array([0.0, 0.0]), np.array([0.0, 3.0])
    normalized = model.normalization.apply(np.vstack([young, old]))
    terminals = model.tree.route(normalized)
    assert terminals[0] == terminals[1]
    assert classify(model, young) == 0
    assert classify(model, old) == 1


def test_dimension_mismatch(toy_model):
    model, _ = toy_model
    with pytest.raises(DataError):
        model.predict_many(np.zeros((2, 3)))


def test_saved_model_predicts_the_same(tent_model, tmp_path):
    model, data = tent_model
    path = str(tmp_path / 'model.yaml')
    save_model(model, path)
    restored = load_model(path)

    assert_array_equal(restored.predict_many(data.features),
                       model.predict_many(data.features))
    assert dump_model(restored) == dump_model(model)
    assert restored.delta_t == model.delta_t


def test_training_is_reproducible(tent_model):
    model, _ = tent_model
    data = synthetic.tent_dataset()
    partition = split_partition(data, (0.6, 0.2, 0.2), seed=0)
    again, _, _ = train_model(data, partition, instantiation_set('tops_lr'),
                              LossSpec('mae'), seed=0, jobs=3)
    assert dump_model(again) == dump_model(model)


def test_document_fields(tent_model):
    model, _ = tent_model
    doc = model.as_dict()
    assert doc['format_version'] == FORMAT_VERSION
    assert set(doc) == set(['format_version', 'loss', 'normalization',
                            'algorithms', 'nodes', 'weights', 'metadata'])
    assert len(doc['metadata']['checksum']) == 64
    assert doc['metadata']['seed'] == 0
    assert doc['loss'] == {'kind': 'mae', 'additive': True}


def test_tampered_model(tent_model, tmp_path):
    model, _ = tent_model
    doc = model.as_dict()
    doc['weights'][0]['weights'][0] += 0.01
    path = tmp_path / 'model.yaml'
    path.write_text(yaml.safe_dump(doc))
    with pytest.raises(ChecksumError):
        load_model(str(path))


def test_unsupported_version(tent_model):
    model, _ = tent_model
    doc = model.as_dict()
    doc['format_version'] = FORMAT_VERSION + 1
    with pytest.raises(ModelVersionError) as e:
        OverallPredictor.from_dict(doc)
    assert str(FORMAT_VERSION + 1) in str(e.value)
    assert str(FORMAT_VERSION) in str(e.value)


def test_missing_section(tent_model):
    model, _ = tent_model
    doc = model.as_dict()
    del doc['normalization']
    with pytest.raises(ModelFormatError):
        OverallPredictor.from_dict(doc)


def test_not_a_model(tmp_path):
    path = tmp_path / 'model.yaml'
    path.write_text('- just\n- a list\n')
    with pytest.raises(ModelFormatError):
        load_model(str(path))


def test_weights_must_follow_paths(toy_model):
    model, _ = toy_model
    with pytest.raises(ModelFormatError):
        OverallPredictor(model.tree, PathWeights(), model.normalization,
                         model.loss, model.algorithms)


def test_build_timestamp(monkeypatch):
    monkeypatch.delenv('SOURCE_DATE_EPOCH', raising=False)
    assert build_timestamp() is None
    monkeypatch.setenv('SOURCE_DATE_EPOCH', '86400')
    assert build_timestamp() == '1970-01-02T00:00:00Z'
