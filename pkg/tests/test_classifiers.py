"""Classifier methods: KNN against brute force, trees, LDA, GNB, SVM, model IO."""

import numpy as np
import pytest

from luxharvest.classes import BASE_TAXONOMY, CANONICAL_ORDER, ORDINAL
from luxharvest.errors import DegenerateTraining, ParseError, ShapeMismatch
from luxharvest.features import LabeledDataset, feature_config
from luxharvest.classifiers import (
    METHOD_NAMES,
    ClassifierMethod,
    load_model,
    method_by_name,
    predict,
    predict_batch,
    save_model,
    train,
)

BASE_ORDINALS = [ORDINAL[c] for c in BASE_TAXONOMY]
RAW5 = feature_config("B", None)  # bb, ir, r, g, b


def _random_ds(rng, n, spread=10.0):
    values = rng.uniform(0.0, spread, size=(n, 6))
    labels = rng.choice(BASE_ORDINALS, size=n)
    return LabeledDataset(values, labels)


def _blob_ds(rng, per_class=40, centers=None):
    """Well-separated isotropic blobs, one per class, in raw channel space."""
    if centers is None:
        centers = [
            np.array([5.0, 5.0, 5.0, 5.0, 5.0]),
            np.array([30.0, 5.0, 20.0, 5.0, 9.0]),
            np.array([5.0, 40.0, 5.0, 25.0, 5.0]),
            np.array([28.0, 28.0, 28.0, 28.0, 28.0]),
        ]
    rows, labels = [], []
    for ordinal, center in zip(BASE_ORDINALS[1:], centers):
        pts = rng.normal(center, 1.0, size=(per_class, 5))
        rows.append(np.clip(pts, 0.0, None))
        labels.extend([ordinal] * per_class)
    values = np.concatenate(rows)
    values = np.concatenate([values, np.full((len(values), 1), 10.0)], axis=1)
    return LabeledDataset(values, np.array(labels))


# ---------------------------------------------------------------------------
# KNN vs brute force

def _brute_knn(train_x, train_y, queries, k, weights):
    """Independent all-pairs scan mirroring the documented tie rules."""
    out = np.empty(len(queries), dtype=int)
    k = max(1, min(k, len(train_y) - 1))
    for qi, q in enumerate(queries):
        d = np.sqrt(((train_x - q) ** 2).sum(axis=1))
        order = np.argsort(d, kind="stable")[:k]
        dk, yk = d[order], train_y[order]
        tally = np.zeros(len(CANONICAL_ORDER))
        if weights == "squared_inverse":
            if (dk == 0.0).any():
                for y in yk[dk == 0.0]:
                    tally[y] += 1.0
            else:
                for dist, y in zip(dk, yk):
                    tally[y] += 1.0 / (dist * dist)
        else:
            for y in yk:
                tally[y] += 1.0
        out[qi] = int(np.argmax(tally))
    return out


@pytest.mark.parametrize("k", [1, 10])
@pytest.mark.parametrize("weights", ["uniform", "squared_inverse"])
def test_knn_matches_brute_force(k, weights):
    rng = np.random.default_rng(100 + k)
    ds = _random_ds(rng, 100)
    queries = rng.uniform(0.0, 10.0, size=(200, 5))
    method = ClassifierMethod("probe", "knn", {"k": k, "metric": "euclidean", "weights": weights})
    clf = train(method, ds, RAW5)
    got = predict_batch(clf, queries)
    want = _brute_knn(ds.values[:, :5], ds.labels, queries, k, weights)
    assert np.array_equal(got, want)


def test_knn_exact_match_short_circuit():
    # duplicate stored points at distance zero decide by majority among them,
    # ignoring every other neighbor weight
    values = np.array(
        [
            [1.0, 1.0, 1.0, 1.0, 1.0, 0.0],
            [1.0, 1.0, 1.0, 1.0, 1.0, 0.0],
            [1.0, 1.0, 1.0, 1.0, 1.0, 0.0],
            [1.1, 1.0, 1.0, 1.0, 1.0, 0.0],
            [1.2, 1.0, 1.0, 1.0, 1.0, 0.0],
        ]
    )
    labels = np.array([BASE_ORDINALS[2], BASE_ORDINALS[2], BASE_ORDINALS[3],
                       BASE_ORDINALS[1], BASE_ORDINALS[1]])
    ds = LabeledDataset(values, labels)
    clf = train("weighted_knn", ds, RAW5)
    got = predict(clf, np.array([1.0, 1.0, 1.0, 1.0, 1.0]))
    assert ORDINAL[got] == BASE_ORDINALS[2]


def test_knn_k_is_clamped_to_training_size():
    rng = np.random.default_rng(3)
    ds = _random_ds(rng, 5)
    clf = train("coarse_knn", ds, RAW5)  # k=100 against 5 rows
    preds = predict_batch(clf, rng.uniform(0.0, 10.0, size=(20, 5)))
    assert set(preds.tolist()) <= set(ds.labels.tolist())


def test_cosine_knn_ignores_magnitude():
    values = np.array(
        [
            [1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
        ]
    )
    labels = np.array([BASE_ORDINALS[1], BASE_ORDINALS[2]])
    ds = LabeledDataset(values, labels)
    method = ClassifierMethod("probe", "knn", {"k": 1, "metric": "cosine", "weights": "uniform"})
    clf = train(method, ds, RAW5)
    assert predict_batch(clf, np.array([[500.0, 1.0, 0.0, 0.0, 0.0]]))[0] == BASE_ORDINALS[1]
    assert predict_batch(clf, np.array([[1.0, 500.0, 0.0, 0.0, 0.0]]))[0] == BASE_ORDINALS[2]


# ---------------------------------------------------------------------------
# other families

def test_tree_separates_blobs_and_respects_budget():
    rng = np.random.default_rng(7)
    ds = _blob_ds(rng)
    for name, budget in (("fine_tree", 100), ("medium_tree", 20), ("coarse_tree", 4)):
        clf = train(name, ds, RAW5)
        state = clf.state
        internal = int(np.sum(state.feature >= 0))
        assert internal <= budget
        acc = float(np.mean(predict_batch(clf, ds.values[:, :5]) == ds.labels))
        assert acc >= 0.97, name


def test_coarse_tree_underfits_many_classes():
    # 4 splits cannot carve 7 well-separated clusters
    rng = np.random.default_rng(11)
    centers = [np.full(5, 10.0 * i) for i in range(1, 7)]
    ds = _blob_ds(rng, per_class=20, centers=centers[:4])
    fine = train("fine_tree", ds, RAW5)
    coarse = train("coarse_tree", ds, RAW5)
    fine_internal = int(np.sum(fine.state.feature >= 0))
    coarse_internal = int(np.sum(coarse.state.feature >= 0))
    assert coarse_internal <= 4 <= fine_internal + 1


def test_gnb_on_blobs():
    rng = np.random.default_rng(21)
    ds = _blob_ds(rng)
    clf = train("gaussian_naive_bayes", ds, RAW5)
    acc = float(np.mean(predict_batch(clf, ds.values[:, :5]) == ds.labels))
    assert acc >= 0.97


def test_lda_on_blobs():
    rng = np.random.default_rng(22)
    ds = _blob_ds(rng)
    clf = train("linear_discriminant", ds, RAW5)
    acc = float(np.mean(predict_batch(clf, ds.values[:, :5]) == ds.labels))
    assert acc >= 0.97


def test_svm_machine_count_is_one_vs_one():
    rng = np.random.default_rng(23)
    ds = _blob_ds(rng)  # 4 classes
    clf = train("linear_svm", ds, RAW5)
    assert len(clf.state.machines) == 4 * 3 // 2


def test_svm_separates_blobs():
    rng = np.random.default_rng(24)
    ds = _blob_ds(rng)
    clf = train("linear_svm", ds, RAW5)
    acc = float(np.mean(predict_batch(clf, ds.values[:, :5]) == ds.labels))
    assert acc >= 0.97


# ---------------------------------------------------------------------------
# shared contracts

def test_training_requires_two_classes():
    values = np.ones((10, 6))
    labels = np.full(10, BASE_ORDINALS[1])
    with pytest.raises(DegenerateTraining):
        train("fine_knn", LabeledDataset(values, labels), RAW5)


def test_unknown_method_name():
    with pytest.raises(ParseError):
        method_by_name("sharpest_knn")


def test_predict_validates_dimension():
    rng = np.random.default_rng(2)
    clf = train("fine_knn", _random_ds(rng, 30), RAW5)
    with pytest.raises(ShapeMismatch):
        predict(clf, np.zeros(3))
    with pytest.raises(ShapeMismatch):
        predict_batch(clf, np.zeros((4, 3)))


@pytest.mark.parametrize("name", METHOD_NAMES)
def test_model_json_round_trip(name, base_ds, tmp_path):
    fc = feature_config("I", "b")
    clf = train(name, base_ds, fc)
    path = tmp_path / f"{name}.json"
    save_model(clf, path)
    back = load_model(path)
    assert back.method.name == name
    assert back.config.id == fc.id
    assert back.config.normalization == fc.normalization
    assert back.taxonomy == clf.taxonomy
    from luxharvest.features import extract_matrix

    X = extract_matrix(base_ds.values, fc)
    assert np.array_equal(predict_batch(clf, X), predict_batch(back, X))
