"""Feature extraction: normalized differences, config table, folds, dataset IO."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from luxharvest.classes import BASE_TAXONOMY, ORDINAL
from luxharvest.errors import (
    ConfigError,
    InvalidChannelValue,
    InvalidFold,
    ParseError,
    ShapeMismatch,
)
from luxharvest.features import (
    ALL_CONFIG_LETTERS,
    LabeledDataset,
    NORMALIZATIONS,
    available_configs,
    config_is_valid,
    extract_matrix,
    feature_config,
    kfold_split,
    make_training_dataset,
    normalized_difference,
)
from luxharvest.twin import default_twin

nonneg = st.floats(min_value=0.0, max_value=1e9, allow_nan=False)
positive = st.floats(min_value=1e-9, max_value=1e9, allow_nan=False)


# ---------------------------------------------------------------------------
# normalized difference

@given(nonneg, nonneg)
def test_nd_antisymmetric(x, n):
    assert normalized_difference(x, n) == -normalized_difference(n, x)


@given(nonneg, nonneg)
def test_nd_bounded(x, n):
    assert -1.0 <= normalized_difference(x, n) <= 1.0


@given(positive, positive, st.floats(min_value=1e-6, max_value=1e6))
def test_nd_scale_invariant(x, n, alpha):
    a = normalized_difference(x, n)
    b = normalized_difference(alpha * x, alpha * n)
    assert b == pytest.approx(a, abs=1e-9)


def test_nd_edge_conventions():
    assert normalized_difference(0.0, 0.0) == 0.0
    assert normalized_difference(5.0, 0.0) == 1.0
    assert normalized_difference(0.0, 5.0) == -1.0
    assert normalized_difference(3.0, 3.0) == 0.0


def test_nd_rejects_negative():
    with pytest.raises(InvalidChannelValue):
        normalized_difference(-1.0, 2.0)
    with pytest.raises(InvalidChannelValue):
        normalized_difference(1.0, -2.0)


# ---------------------------------------------------------------------------
# config table

def test_nineteen_config_letters():
    assert ALL_CONFIG_LETTERS == tuple("ABCDEFGHIJKLMNOPQRS")
    assert NORMALIZATIONS == (None, "b", "g", "r", "bb", "ir")


def test_raw_configs_available_without_normalization():
    assert available_configs(None) == tuple("ABCDEFGHIJK")


def test_derived_configs_drop_the_norm_channel():
    # R is G=(b, ir) minus the normalization channel
    assert feature_config("R", "b").channels == ("ir",)
    assert feature_config("I", "b").channels == ("r", "ir")
    # dropping a channel the base config lacks would duplicate the base config
    assert not config_is_valid("R", "g")
    assert not config_is_valid("O", "b")
    assert not config_is_valid("S", "b")


def test_derived_configs_require_normalization():
    assert not config_is_valid("L", None)
    with pytest.raises(ConfigError):
        feature_config("L", None)


def test_unknown_letter_rejected():
    with pytest.raises(ConfigError):
        feature_config("Z", None)


def test_every_advertised_config_builds():
    for norm in NORMALIZATIONS:
        for letter in available_configs(norm):
            fc = feature_config(letter, norm)
            assert len(fc.channels) >= 1


# ---------------------------------------------------------------------------
# extraction

def test_lux_passes_through_unnormalized():
    row = np.array([[10.0, 20.0, 30.0, 40.0, 50.0, 777.0]])
    fc = feature_config("A", "b")
    feats = extract_matrix(row, fc)
    assert feats[0, -1] == 777.0
    # every other component is a normalized difference against blue
    assert feats[0, 0] == pytest.approx(normalized_difference(10.0, 50.0))


def test_raw_extraction_selects_channels():
    row = np.array([[10.0, 20.0, 30.0, 40.0, 50.0, 777.0]])
    fc = feature_config("I", None)  # (r, ir)
    feats = extract_matrix(row, fc)
    assert feats.tolist() == [[30.0, 20.0]]


def test_extract_matrix_validates_shape():
    fc = feature_config("B", None)
    with pytest.raises(ShapeMismatch):
        extract_matrix(np.zeros((3, 5)), fc)


def test_extract_matrix_rejects_negative_counts():
    fc = feature_config("C", "b")
    bad = np.array([[1.0, 1.0, -2.0, 1.0, 1.0, 0.0]])
    with pytest.raises(InvalidChannelValue):
        extract_matrix(bad, fc)


# ---------------------------------------------------------------------------
# labeled dataset

def test_training_dataset_is_balanced():
    ds = make_training_dataset(default_twin(0.0), seed=1)
    assert len(ds) == 126
    counts = ds.class_counts()
    assert {cls.id for cls in counts} == {c.id for c in BASE_TAXONOMY}
    assert set(counts.values()) == {18}


def test_dataset_csv_round_trip(tmp_path):
    ds = make_training_dataset(default_twin(0.01), seed=5)
    path = tmp_path / "ds.csv"
    ds.to_csv(path)
    back = LabeledDataset.from_csv(path)
    assert back.taxonomy == ds.taxonomy
    assert np.array_equal(back.labels, ds.labels)
    assert np.allclose(back.values, ds.values, rtol=1e-9)


def test_dataset_csv_header_enforced(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ParseError):
        LabeledDataset.from_csv(path)


def test_dataset_rejects_wrong_taxonomy_labels():
    values = np.ones((2, 6))
    labels = np.array([ORDINAL[BASE_TAXONOMY[1]], 9])  # 9 is an extended-only class
    with pytest.raises(Exception):
        LabeledDataset(values, labels, taxonomy="base")


# ---------------------------------------------------------------------------
# k-fold splitting

def _random_dataset(rng):
    n = int(rng.integers(20, 120))
    values = rng.uniform(0.0, 100.0, size=(n, 6))
    labels = rng.choice([ORDINAL[c] for c in BASE_TAXONOMY], size=n)
    return LabeledDataset(values, labels)


def test_kfold_sizes_differ_by_at_most_one(base_ds):
    folds = kfold_split(base_ds, 5, seed=0)
    sizes = sorted(len(f) for f in folds)
    assert sum(sizes) == len(base_ds)
    assert sizes[-1] - sizes[0] <= 1
    assert sizes == [25, 25, 25, 25, 26]


def test_kfold_partitions_indices(base_ds):
    folds = kfold_split(base_ds, 4, seed=3)
    merged = np.sort(np.concatenate(folds))
    assert np.array_equal(merged, np.arange(len(base_ds)))


def test_kfold_deterministic_under_seed(base_ds):
    a = kfold_split(base_ds, 5, seed=11)
    b = kfold_split(base_ds, 5, seed=11)
    c = kfold_split(base_ds, 5, seed=12)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    assert any(not np.array_equal(x, y) for x, y in zip(a, c))


def test_kfold_stratifies_when_possible(base_ds):
    # 18 rows per class into 5 folds: every fold sees every class 3 or 4 times
    folds = kfold_split(base_ds, 5, seed=2)
    for fold in folds:
        _, counts = np.unique(base_ds.labels[fold], return_counts=True)
        assert counts.min() >= 3 and counts.max() <= 4


def test_kfold_rejects_bad_k(base_ds):
    with pytest.raises(InvalidFold):
        kfold_split(base_ds, 1)
    with pytest.raises(InvalidFold):
        kfold_split(base_ds, len(base_ds) + 1)


def test_kfold_laws_on_random_datasets():
    rng = np.random.default_rng(42)
    for trial in range(25):
        ds = _random_dataset(rng)
        k = int(rng.integers(2, 9))
        folds = kfold_split(ds, k, seed=trial)
        merged = np.sort(np.concatenate(folds))
        assert np.array_equal(merged, np.arange(len(ds)))
        sizes = [len(f) for f in folds]
        assert max(sizes) - min(sizes) <= 1
