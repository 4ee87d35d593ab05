"""Cross-validation, configuration sweeps, decision surfaces."""

import numpy as np
import pytest

from luxharvest.errors import InvalidGrid
from luxharvest.evaluation import (
    SWEEP_CSV_HEADER,
    cross_validate,
    decision_surface,
    read_sweep_csv,
    surface_to_csv,
    sweep,
    write_sweep_csv,
)
from luxharvest.features import feature_config
from luxharvest.classifiers import predict_batch, train


def test_cross_validate_reports_k_folds(base_ds):
    res = cross_validate("medium_knn", base_ds, feature_config("B", None), k=5, seed=0)
    assert len(res.fold_accuracies) == 5
    assert 0.0 <= res.accuracy <= 1.0
    assert res.accuracy == pytest.approx(float(np.mean(res.fold_accuracies)))


def test_cross_validate_deterministic(base_ds):
    fc = feature_config("I", "b")
    a = cross_validate("fine_knn", base_ds, fc, k=5, seed=7)
    b = cross_validate("fine_knn", base_ds, fc, k=5, seed=7)
    assert a.fold_accuracies == b.fold_accuracies


def test_fine_knn_blue_config_i_is_perfect(base_ds):
    res = cross_validate("fine_knn", base_ds, feature_config("I", "b"), k=5, seed=0)
    assert res.accuracy == 1.0


# ---------------------------------------------------------------------------
# sweep

def test_sweep_marks_invalid_cells_skipped(base_ds):
    rep = sweep(base_ds, methods=("fine_knn",), configs=("R",), normalizations=(None, "g", "b"))
    # R without normalization and R under g are not distinct configurations
    assert rep.cell("fine_knn", "R", None).status == "skipped"
    assert rep.cell("fine_knn", "R", "g").status == "skipped"
    assert rep.cell("fine_knn", "R", "b").status == "ok"


def test_sweep_perfect_counts(base_ds):
    rep = sweep(base_ds, methods=("fine_knn", "weighted_knn"), configs=("I", "G"),
                normalizations=(None, "b"))
    total = rep.perfect_cells()
    assert rep.perfect_cells("b") + rep.perfect_cells(None) == total
    assert rep.cell("fine_knn", "I", "b").cv_accuracy == 1.0


def test_sweep_csv_round_trip(base_ds, tmp_path):
    rep = sweep(base_ds, methods=("fine_knn",), configs=("I", "R"), normalizations=(None, "b"))
    path = tmp_path / "sweep.csv"
    write_sweep_csv(rep, path)
    header = path.read_text().splitlines()[0]
    assert header == ",".join(SWEEP_CSV_HEADER)
    back = read_sweep_csv(path)
    assert len(back.cells) == len(rep.cells)
    for a, b in zip(back.cells, rep.cells):
        assert (a.method, a.config, a.normalization, a.status) == (
            b.method, b.config, b.normalization, b.status)
        if b.cv_accuracy is None:
            assert a.cv_accuracy is None
        else:
            assert a.cv_accuracy == pytest.approx(b.cv_accuracy, rel=1e-9)


# ---------------------------------------------------------------------------
# decision surface

def test_surface_grid_matches_batch_predictions(base_ds):
    fc = feature_config("I", "b")  # 2-D
    clf = train("fine_knn", base_ds, fc)
    grid = decision_surface(clf, (-1.0, 1.0, -1.0, 1.0), 21)
    assert grid.labels.shape == (21, 21)
    # corner probes agree with direct prediction
    for x, y, row, col in ((-1.0, -1.0, 0, 0), (1.0, 1.0, 20, 20), (-1.0, 1.0, 20, 0)):
        direct = predict_batch(clf, np.array([[x, y]]))[0]
        assert grid.labels[row, col] == direct


def test_surface_pins_unswept_dims_at_medians(base_ds):
    fc = feature_config("B", None)  # 5-D raw
    clf = train("medium_knn", base_ds, fc)
    grid = decision_surface(clf, (0.0, 100.0, 0.0, 100.0), 5, dims=(0, 2))
    probe = clf.feature_medians.copy()
    probe[0] = grid.xs[3]
    probe[2] = grid.ys[1]
    direct = predict_batch(clf, probe[None, :])[0]
    assert grid.labels[1, 3] == direct


def test_surface_validates_bounds_and_dims(base_ds):
    fc = feature_config("I", "b")
    clf = train("fine_knn", base_ds, fc)
    with pytest.raises(InvalidGrid):
        decision_surface(clf, (1.0, -1.0, 0.0, 1.0), 11)
    with pytest.raises(InvalidGrid):
        decision_surface(clf, (0.0, 1.0, 0.0, 1.0), 1)
    with pytest.raises(InvalidGrid):
        decision_surface(clf, (0.0, 1.0, 0.0, 1.0), 11, dims=(0, 0))
    with pytest.raises(InvalidGrid):
        decision_surface(clf, (0.0, 1.0, 0.0, 1.0), 11, dims=(0, 5))


def test_surface_csv_shape(base_ds, tmp_path):
    fc = feature_config("I", "b")
    clf = train("fine_knn", base_ds, fc)
    grid = decision_surface(clf, (-1.0, 1.0, -1.0, 1.0), 7)
    path = tmp_path / "surface.csv"
    surface_to_csv(grid, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "x,y,class"
    assert len(lines) == 1 + 7 * 7
