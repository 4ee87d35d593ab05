"""Cross-validation, the method-by-configuration sweep, decision surfaces
and holdout evaluation."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .classes import CANONICAL_ORDER, LightClass, ORDINAL, taxonomy_classes
from .errors import (
    InvalidGrid,
    LuxHarvestError,
    ParseError,
    TaxonomyError,
)
from .features import (
    ALL_CONFIG_LETTERS,
    LabeledDataset,
    NORMALIZATIONS,
    config_is_valid,
    extract_matrix,
    feature_config,
    kfold_split,
)
from .classifiers import METHOD_NAMES, TrainedClassifier, predict_batch, train

__all__ = [
    "CVResult",
    "HoldoutResult",
    "SurfaceGrid",
    "SweepCell",
    "SweepReport",
    "cross_validate",
    "decision_surface",
    "evaluate_holdout",
    "read_sweep_csv",
    "surface_to_csv",
    "sweep",
    "write_sweep_csv",
]


@dataclass(frozen=True)
class CVResult:
    accuracy: float
    fold_accuracies: tuple[float, ...]


def cross_validate(
    method, ds: LabeledDataset, config, k: int = 5, seed: int = 0
) -> CVResult:
    """Mean k-fold accuracy; folds are stratified and seed-deterministic."""
    folds = kfold_split(ds, k, seed)
    all_indices = np.arange(len(ds))
    fold_accuracies = []
    for fold in folds:
        train_idx = np.setdiff1d(all_indices, fold, assume_unique=False)
        clf = train(method, ds.subset(train_idx), config)
        X = extract_matrix(ds.values[fold], config)
        predicted = predict_batch(clf, X)
        fold_accuracies.append(float(np.mean(predicted == ds.labels[fold])))
    return CVResult(float(np.mean(fold_accuracies)), tuple(fold_accuracies))


@dataclass(frozen=True)
class SweepCell:
    method: str
    config: str
    normalization: str | None
    cv_accuracy: float | None
    status: str  # "ok" | "skipped" | "failed"


@dataclass(eq=False)
class SweepReport:
    cells: tuple[SweepCell, ...]

    def cell(self, method: str, config: str, normalization: str | None) -> SweepCell:
        for c in self.cells:
            if (c.method, c.config, c.normalization) == (method, config, normalization):
                return c
        raise KeyError((method, config, normalization))

    def count(self, normalization: str | None = "any", status: str = "ok") -> int:
        return sum(
            1
            for c in self.cells
            if c.status == status
            and (normalization == "any" or c.normalization == normalization)
        )

    def perfect_cells(self, normalization: str | None = "any") -> int:
        """Number of evaluated cells with CV accuracy exactly 1.0."""
        return sum(
            1
            for c in self.cells
            if c.status == "ok"
            and c.cv_accuracy == 1.0
            and (normalization == "any" or c.normalization == normalization)
        )

    def perfect_by_method(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for c in self.cells:
            out.setdefault(c.method, 0)
            if c.status == "ok" and c.cv_accuracy == 1.0:
                out[c.method] += 1
        return out

    def perfect_by_config(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for c in self.cells:
            out.setdefault(c.config, 0)
            if c.status == "ok" and c.cv_accuracy == 1.0:
                out[c.config] += 1
        return out


def sweep(
    ds: LabeledDataset,
    methods=None,
    configs=None,
    normalizations=None,
    k: int = 5,
    seed: int = 0,
) -> SweepReport:
    """Cross-validate every (method, config, normalization) cell.

    Cells whose config letter is invalid under a normalization are marked
    skipped; cells whose training fails are marked failed and carry no
    accuracy.  Cell order is deterministic.
    """
    methods = tuple(methods) if methods is not None else METHOD_NAMES
    configs = tuple(configs) if configs is not None else ALL_CONFIG_LETTERS
    normalizations = (
        tuple(normalizations) if normalizations is not None else NORMALIZATIONS
    )
    cells = []
    for norm in normalizations:
        for letter in configs:
            if not config_is_valid(letter, norm):
                for name in methods:
                    cells.append(SweepCell(name, letter, norm, None, "skipped"))
                continue
            config = feature_config(letter, norm)
            for name in methods:
                try:
                    result = cross_validate(name, ds, config, k=k, seed=seed)
                    cells.append(SweepCell(name, letter, norm, result.accuracy, "ok"))
                except LuxHarvestError:
                    cells.append(SweepCell(name, letter, norm, None, "failed"))
    return SweepReport(tuple(cells))


SWEEP_CSV_HEADER = ("method", "config", "normalization", "cv_accuracy", "status")


def write_sweep_csv(report: SweepReport, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_CSV_HEADER)
        for c in report.cells:
            writer.writerow(
                [
                    c.method,
                    c.config,
                    c.normalization if c.normalization is not None else "none",
                    "" if c.cv_accuracy is None else format(c.cv_accuracy, ".10g"),
                    c.status,
                ]
            )


def read_sweep_csv(path) -> SweepReport:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != SWEEP_CSV_HEADER:
            raise ParseError(f"{path}: not a sweep CSV")
        cells = []
        try:
            for row in reader:
                if not row:
                    continue
                method, config, norm, acc, status = row
                cells.append(
                    SweepCell(
                        method,
                        config,
                        None if norm == "none" else norm,
                        float(acc) if acc else None,
                        status,
                    )
                )
        except (ValueError, IndexError) as exc:
            raise ParseError(f"{path}: malformed sweep row ({exc})") from exc
    return SweepReport(tuple(cells))


@dataclass(eq=False)
class SurfaceGrid:
    xs: np.ndarray
    ys: np.ndarray
    labels: np.ndarray  # (resolution, resolution) class ordinals, row = y index


def decision_surface(
    clf: TrainedClassifier,
    bounds: tuple[float, float, float, float],
    resolution: int,
    dims: tuple[int, int] = (0, 1),
) -> SurfaceGrid:
    """Predicted class over a 2D slice of feature space.

    The two swept dimensions are dims; any remaining features are pinned at
    the training-set medians.
    """
    x0, x1, y0, y1 = bounds
    if not (x0 < x1 and y0 < y1):
        raise InvalidGrid("surface bounds must satisfy x0 < x1 and y0 < y1")
    if resolution < 2:
        raise InvalidGrid("surface resolution must be at least 2")
    d = clf.config.dimension
    if not (0 <= dims[0] < d and 0 <= dims[1] < d) or dims[0] == dims[1]:
        raise InvalidGrid(f"surface dims {dims} invalid for dimension {d}")
    xs = np.linspace(x0, x1, resolution)
    ys = np.linspace(y0, y1, resolution)
    gx, gy = np.meshgrid(xs, ys)
    points = np.tile(clf.feature_medians, (resolution * resolution, 1))
    points[:, dims[0]] = gx.ravel()
    points[:, dims[1]] = gy.ravel()
    labels = predict_batch(clf, points).reshape(resolution, resolution)
    return SurfaceGrid(xs, ys, labels)


def surface_to_csv(grid: SurfaceGrid, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("x", "y", "class"))
        for yi, yv in enumerate(grid.ys):
            for xi, xv in enumerate(grid.xs):
                writer.writerow(
                    [
                        format(xv, ".10g"),
                        format(yv, ".10g"),
                        CANONICAL_ORDER[grid.labels[yi, xi]].id,
                    ]
                )


@dataclass(eq=False)
class HoldoutResult:
    accuracy: float
    confusion: np.ndarray
    classes: tuple[LightClass, ...]


def evaluate_holdout(clf: TrainedClassifier, ds: LabeledDataset) -> HoldoutResult:
    """Accuracy and confusion matrix (rows truth, columns prediction)."""
    if ds.taxonomy != clf.taxonomy:
        raise TaxonomyError(
            f"holdout taxonomy {ds.taxonomy!r} does not match model {clf.taxonomy!r}"
        )
    classes = taxonomy_classes(ds.taxonomy)
    index = {ORDINAL[c]: i for i, c in enumerate(classes)}
    X = extract_matrix(ds.values, clf.config)
    predicted = predict_batch(clf, X)
    confusion = np.zeros((len(classes), len(classes)), dtype=int)
    for truth, pred in zip(ds.labels, predicted):
        confusion[index[int(truth)], index[int(pred)]] += 1
    accuracy = float(np.mean(predicted == ds.labels))
    return HoldoutResult(accuracy, confusion, classes)
