"""From-scratch multiclass classifiers over pseudo-spectrum features.

Twelve methods in five families: three Gini decision trees (split budgets
100/20/4), a regularized linear discriminant, Gaussian naive Bayes, a
linear one-vs-one SVM trained by sequential minimal optimization, and six
k-nearest-neighbour variants.  Everything is deterministic: ties are broken
by the canonical class order, and KNN neighbour ties by training-row order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .classes import CANONICAL_ORDER, LightClass, ORDINAL, class_from_id
from .errors import (
    DegenerateTraining,
    NumericalFailure,
    ParseError,
    ShapeMismatch,
)
from .features import FeatureConfig, FeatureVector, LabeledDataset, extract_matrix

__all__ = [
    "METHOD_NAMES",
    "ClassifierMethod",
    "TrainedClassifier",
    "load_model",
    "method_by_name",
    "predict",
    "predict_batch",
    "save_model",
    "train",
]

_N_CLASSES = len(CANONICAL_ORDER)


@dataclass(frozen=True)
class ClassifierMethod:
    name: str
    family: str
    params: dict = field(default_factory=dict)


_METHODS = (
    ClassifierMethod("fine_tree", "tree", {"max_splits": 100}),
    ClassifierMethod("medium_tree", "tree", {"max_splits": 20}),
    ClassifierMethod("coarse_tree", "tree", {"max_splits": 4}),
    ClassifierMethod("linear_discriminant", "lda", {}),
    ClassifierMethod("gaussian_naive_bayes", "gnb", {}),
    ClassifierMethod("linear_svm", "svm", {"c": 1.0, "tol": 1e-3}),
    ClassifierMethod("fine_knn", "knn", {"k": 1, "metric": "euclidean", "weights": "uniform"}),
    ClassifierMethod("medium_knn", "knn", {"k": 10, "metric": "euclidean", "weights": "uniform"}),
    ClassifierMethod("coarse_knn", "knn", {"k": 100, "metric": "euclidean", "weights": "uniform"}),
    ClassifierMethod("cosine_knn", "knn", {"k": 10, "metric": "cosine", "weights": "uniform"}),
    ClassifierMethod("cubic_knn", "knn", {"k": 10, "metric": "cubic", "weights": "uniform"}),
    ClassifierMethod("weighted_knn", "knn", {"k": 10, "metric": "euclidean", "weights": "squared_inverse"}),
)

METHODS = {m.name: m for m in _METHODS}
METHOD_NAMES = tuple(METHODS)


def method_by_name(name: str) -> ClassifierMethod:
    try:
        return METHODS[name]
    except KeyError:
        raise ParseError(f"unknown classifier method {name!r}") from None


@dataclass(eq=False)
class TrainedClassifier:
    method: ClassifierMethod
    config: FeatureConfig
    taxonomy: str
    classes: tuple[LightClass, ...]
    state: object
    feature_medians: np.ndarray


def train(method, ds: LabeledDataset, config: FeatureConfig) -> TrainedClassifier:
    """Fit one method on the dataset's features under the given config."""
    if isinstance(method, str):
        method = method_by_name(method)
    X = extract_matrix(ds.values, config)
    y = ds.labels
    if len(np.unique(y)) < 2:
        raise DegenerateTraining("training needs at least two classes")
    if not np.all(np.isfinite(X)):
        raise DegenerateTraining("training features contain non-finite values")
    trainer = _TRAINERS[method.family]
    state = trainer(X, y, method.params)
    return TrainedClassifier(
        method=method,
        config=config,
        taxonomy=ds.taxonomy,
        classes=tuple(CANONICAL_ORDER[i] for i in np.unique(y)),
        state=state,
        feature_medians=np.median(X, axis=0),
    )


def predict(clf: TrainedClassifier, fv) -> LightClass:
    values = fv.values if isinstance(fv, FeatureVector) else np.asarray(fv, dtype=float)
    if values.shape != (clf.config.dimension,):
        raise ShapeMismatch(
            f"feature vector has {values.shape} values, config "
            f"{clf.config.id} needs {clf.config.dimension}"
        )
    return CANONICAL_ORDER[int(predict_batch(clf, values[None, :])[0])]


def predict_batch(clf: TrainedClassifier, X: np.ndarray) -> np.ndarray:
    """Class ordinals for an (n, d) feature matrix."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != clf.config.dimension:
        raise ShapeMismatch("feature matrix does not match the classifier config")
    return _PREDICTORS[clf.method.family](clf.state, X, clf.method.params)


# ---------------------------------------------------------------------------
# KNN

@dataclass(eq=False)
class _KnnState:
    x: np.ndarray
    y: np.ndarray


def _train_knn(X, y, params):
    return _KnnState(X.copy(), y.copy())


def _knn_distances(metric: str, train: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """(n_query, n_train) distances; monotone stand-ins where order suffices."""
    if metric == "euclidean":
        diff = queries[:, None, :] - train[None, :, :]
        return np.sqrt(np.sum(diff * diff, axis=2))
    if metric == "cubic":
        diff = np.abs(queries[:, None, :] - train[None, :, :])
        return np.sum(diff**3, axis=2) ** (1.0 / 3.0)
    if metric == "cosine":
        qn = np.linalg.norm(queries, axis=1)
        tn = np.linalg.norm(train, axis=1)
        dots = queries @ train.T
        with np.errstate(invalid="ignore", divide="ignore"):
            cos = dots / np.outer(qn, tn)
        dist = 1.0 - cos
        # zero vectors: distance 1 to anything non-zero, 0 to another zero
        qz, tz = qn == 0.0, tn == 0.0
        dist[qz, :] = 1.0
        dist[:, tz] = 1.0
        dist[np.ix_(qz, tz)] = 0.0
        return dist
    raise ParseError(f"unknown KNN metric {metric!r}")


def _predict_knn(state: _KnnState, X, params):
    n_train = len(state.y)
    k = max(1, min(int(params["k"]), n_train - 1)) if n_train > 1 else 1
    out = np.empty(len(X), dtype=int)
    chunk = max(1, int(2_000_000 // max(n_train, 1)))
    for start in range(0, len(X), chunk):
        queries = X[start : start + chunk]
        dists = _knn_distances(params["metric"], state.x, queries)
        # stable sort keeps training order on distance ties
        order = np.argsort(dists, axis=1, kind="stable")[:, :k]
        for row, nearest in enumerate(order):
            d = dists[row, nearest]
            labels = state.y[nearest]
            if params["weights"] == "squared_inverse":
                exact = d == 0.0
                if np.any(exact):
                    tally = np.bincount(labels[exact], minlength=_N_CLASSES).astype(float)
                else:
                    tally = np.bincount(
                        labels, weights=1.0 / (d * d), minlength=_N_CLASSES
                    )
            else:
                tally = np.bincount(labels, minlength=_N_CLASSES).astype(float)
            out[start + row] = int(np.argmax(tally))
    return out


# ---------------------------------------------------------------------------
# Gini decision tree

@dataclass(eq=False)
class _TreeState:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    prediction: np.ndarray


def _best_split(X, y):
    """(gain, feature, threshold) of the best Gini split, or None."""
    n = len(y)
    onehot = np.zeros((n, _N_CLASSES))
    onehot[np.arange(n), y] = 1.0
    totals = onehot.sum(axis=0)
    parent_score = np.sum(totals**2) / n  # n * (1 - gini)
    best = None
    for f in range(X.shape[1]):
        order = np.argsort(X[:, f], kind="stable")
        values = X[order, f]
        cum = np.cumsum(onehot[order], axis=0)
        cuts = np.flatnonzero(values[:-1] < values[1:])  # split after index i
        if cuts.size == 0:
            continue
        n_left = (cuts + 1).astype(float)
        n_right = n - n_left
        left_sq = np.sum(cum[cuts] ** 2, axis=1)
        right_sq = np.sum((totals - cum[cuts]) ** 2, axis=1)
        scores = left_sq / n_left + right_sq / n_right
        best_idx = int(np.argmax(scores))
        gain = (scores[best_idx] - parent_score) / n
        if gain > 1e-12 and (best is None or gain > best[0] + 1e-15):
            cut = cuts[best_idx]
            threshold = 0.5 * (values[cut] + values[cut + 1])
            best = (float(gain), f, float(threshold))
    return best


def _train_tree(X, y, params):
    max_splits = int(params["max_splits"])
    feature, threshold, left, right, prediction = [], [], [], [], []

    def majority(labels):
        return int(np.argmax(np.bincount(labels, minlength=_N_CLASSES)))

    # Breadth-first growth so the split budget is spent near the root first.
    feature.append(-1)
    threshold.append(0.0)
    left.append(-1)
    right.append(-1)
    prediction.append(majority(y))
    node_rows = {0: np.arange(len(y))}
    pending = [0]
    splits = 0
    while pending and splits < max_splits:
        node = pending.pop(0)
        rows = node_rows.pop(node)
        labels = y[rows]
        if np.all(labels == labels[0]):
            continue
        found = _best_split(X[rows], labels)
        if found is None:
            continue
        _, f, thr = found
        mask = X[rows, f] <= thr
        for child_rows in (rows[mask], rows[~mask]):
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            prediction.append(majority(y[child_rows]))
            child = len(feature) - 1
            node_rows[child] = child_rows
            pending.append(child)
        feature[node] = f
        threshold[node] = thr
        left[node] = len(feature) - 2
        right[node] = len(feature) - 1
        splits += 1
    return _TreeState(
        feature=np.asarray(feature, dtype=int),
        threshold=np.asarray(threshold),
        left=np.asarray(left, dtype=int),
        right=np.asarray(right, dtype=int),
        prediction=np.asarray(prediction, dtype=int),
    )


def _predict_tree(state: _TreeState, X, params):
    out = np.empty(len(X), dtype=int)
    for i, row in enumerate(X):
        node = 0
        while state.feature[node] >= 0:
            node = (
                state.left[node]
                if row[state.feature[node]] <= state.threshold[node]
                else state.right[node]
            )
        out[i] = state.prediction[node]
    return out


# ---------------------------------------------------------------------------
# Linear discriminant

@dataclass(eq=False)
class _LdaState:
    class_ids: np.ndarray
    means: np.ndarray
    precision: np.ndarray
    log_priors: np.ndarray


def _train_lda(X, y, params):
    class_ids = np.unique(y)
    n, d = X.shape
    means = np.vstack([X[y == c].mean(axis=0) for c in class_ids])
    pooled = np.zeros((d, d))
    for c, mu in zip(class_ids, means):
        centered = X[y == c] - mu
        pooled += centered.T @ centered
    pooled /= max(n - len(class_ids), 1)
    ridge = 1e-6 * np.trace(pooled) / d
    pooled += ridge * np.eye(d)
    try:
        precision = np.linalg.inv(pooled)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"singular pooled covariance: {exc}") from exc
    if not np.all(np.isfinite(precision)):
        raise NumericalFailure("pooled covariance inversion overflowed")
    priors = np.array([(y == c).sum() / n for c in class_ids])
    return _LdaState(class_ids, means, precision, np.log(priors))


def _predict_lda(state: _LdaState, X, params):
    proj = state.precision @ state.means.T  # (d, C)
    scores = X @ proj - 0.5 * np.sum(state.means.T * proj, axis=0) + state.log_priors
    return state.class_ids[np.argmax(scores, axis=1)]


# ---------------------------------------------------------------------------
# Gaussian naive Bayes

_GNB_VAR_FLOOR = 1e-9


@dataclass(eq=False)
class _GnbState:
    class_ids: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    log_priors: np.ndarray


def _train_gnb(X, y, params):
    class_ids = np.unique(y)
    means = np.vstack([X[y == c].mean(axis=0) for c in class_ids])
    variances = np.vstack(
        [np.maximum(X[y == c].var(axis=0), _GNB_VAR_FLOOR) for c in class_ids]
    )
    priors = np.array([(y == c).sum() / len(y) for c in class_ids])
    return _GnbState(class_ids, means, variances, np.log(priors))


def _predict_gnb(state: _GnbState, X, params):
    # log-likelihood per class, vectorized over the query rows
    diff = X[:, None, :] - state.means[None, :, :]
    log_pdf = -0.5 * (
        np.log(2.0 * np.pi * state.variances)[None, :, :]
        + diff * diff / state.variances[None, :, :]
    )
    scores = log_pdf.sum(axis=2) + state.log_priors
    return state.class_ids[np.argmax(scores, axis=1)]


# ---------------------------------------------------------------------------
# Linear SVM, one-vs-one SMO

@dataclass(eq=False)
class _SvmMachine:
    pos: int
    neg: int
    w: np.ndarray
    b: float


@dataclass(eq=False)
class _SvmState:
    machines: list


def _smo(X, y, c, tol, max_sweeps=200):
    """Deterministic simplified SMO for a linear binary SVM, labels +-1."""
    n = len(y)
    K = X @ X.T
    alpha = np.zeros(n)
    b = 0.0
    # p holds the current decision values; kept in sync incrementally so the
    # KKT scan costs O(n) instead of O(n^2) per candidate.
    p = np.zeros(n)
    for _ in range(max_sweeps):
        changed = 0
        for i in range(n):
            e_i = p[i] - y[i]
            r = e_i * y[i]
            if not ((r < -tol and alpha[i] < c) or (r > tol and alpha[i] > 0.0)):
                continue
            errors = p - y
            j = int(np.argmax(np.abs(errors - e_i)))
            if j == i:
                continue
            e_j = errors[j]
            ai_old, aj_old = alpha[i], alpha[j]
            if y[i] != y[j]:
                lo, hi = max(0.0, aj_old - ai_old), min(c, c + aj_old - ai_old)
            else:
                lo, hi = max(0.0, ai_old + aj_old - c), min(c, ai_old + aj_old)
            if lo >= hi:
                continue
            eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
            if eta <= 0.0:
                continue
            aj = np.clip(aj_old + y[j] * (e_i - e_j) / eta, lo, hi)
            if abs(aj - aj_old) < 1e-12:
                continue
            ai = ai_old + y[i] * y[j] * (aj_old - aj)
            alpha[i], alpha[j] = ai, aj
            b1 = b - e_i - y[i] * (ai - ai_old) * K[i, i] - y[j] * (aj - aj_old) * K[i, j]
            b2 = b - e_j - y[i] * (ai - ai_old) * K[i, j] - y[j] * (aj - aj_old) * K[j, j]
            if 0.0 < ai < c:
                b_new = b1
            elif 0.0 < aj < c:
                b_new = b2
            else:
                b_new = 0.5 * (b1 + b2)
            p += y[i] * (ai - ai_old) * K[i] + y[j] * (aj - aj_old) * K[j] + (b_new - b)
            b = b_new
            changed += 1
        if changed == 0:
            break
    return (alpha * y) @ X, b


def _train_svm(X, y, params):
    class_ids = np.unique(y)
    machines = []
    for a_pos, a in enumerate(class_ids):
        for bcls in class_ids[a_pos + 1 :]:
            rows = (y == a) | (y == bcls)
            labels = np.where(y[rows] == a, 1.0, -1.0)
            # Standardize per machine so the kernel is well conditioned even
            # when a raw-count or lux feature spans thousands of units, then
            # fold the affine transform back into (w, b).
            sub = X[rows]
            mu = sub.mean(axis=0)
            sd = sub.std(axis=0)
            sd[sd < 1e-12] = 1.0
            w_s, bias = _smo((sub - mu) / sd, labels, params["c"], params["tol"])
            w = w_s / sd
            machines.append(_SvmMachine(int(a), int(bcls), w, float(bias - w @ mu)))
    return _SvmState(machines)


def _predict_svm(state: _SvmState, X, params):
    votes = np.zeros((len(X), _N_CLASSES))
    for machine in state.machines:
        decision = X @ machine.w + machine.b
        votes[:, machine.pos] += decision >= 0.0
        votes[:, machine.neg] += decision < 0.0
    return np.argmax(votes, axis=1)


_TRAINERS = {
    "knn": _train_knn,
    "tree": _train_tree,
    "lda": _train_lda,
    "gnb": _train_gnb,
    "svm": _train_svm,
}

_PREDICTORS = {
    "knn": _predict_knn,
    "tree": _predict_tree,
    "lda": _predict_lda,
    "gnb": _predict_gnb,
    "svm": _predict_svm,
}


# ---------------------------------------------------------------------------
# Model files

_MODEL_FORMAT_VERSION = 1


def _state_to_json(family: str, state) -> dict:
    if family == "knn":
        return {"x": state.x.tolist(), "y": state.y.tolist()}
    if family == "tree":
        return {
            "feature": state.feature.tolist(),
            "threshold": state.threshold.tolist(),
            "left": state.left.tolist(),
            "right": state.right.tolist(),
            "prediction": state.prediction.tolist(),
        }
    if family == "lda":
        return {
            "class_ids": state.class_ids.tolist(),
            "means": state.means.tolist(),
            "precision": state.precision.tolist(),
            "log_priors": state.log_priors.tolist(),
        }
    if family == "gnb":
        return {
            "class_ids": state.class_ids.tolist(),
            "means": state.means.tolist(),
            "variances": state.variances.tolist(),
            "log_priors": state.log_priors.tolist(),
        }
    if family == "svm":
        return {
            "machines": [
                {"pos": m.pos, "neg": m.neg, "w": m.w.tolist(), "b": m.b}
                for m in state.machines
            ]
        }
    raise ParseError(f"unknown family {family!r}")


def _state_from_json(family: str, doc: dict):
    if family == "knn":
        return _KnnState(np.asarray(doc["x"], dtype=float), np.asarray(doc["y"], dtype=int))
    if family == "tree":
        return _TreeState(
            np.asarray(doc["feature"], dtype=int),
            np.asarray(doc["threshold"], dtype=float),
            np.asarray(doc["left"], dtype=int),
            np.asarray(doc["right"], dtype=int),
            np.asarray(doc["prediction"], dtype=int),
        )
    if family == "lda":
        return _LdaState(
            np.asarray(doc["class_ids"], dtype=int),
            np.asarray(doc["means"], dtype=float),
            np.asarray(doc["precision"], dtype=float),
            np.asarray(doc["log_priors"], dtype=float),
        )
    if family == "gnb":
        return _GnbState(
            np.asarray(doc["class_ids"], dtype=int),
            np.asarray(doc["means"], dtype=float),
            np.asarray(doc["variances"], dtype=float),
            np.asarray(doc["log_priors"], dtype=float),
        )
    if family == "svm":
        return _SvmState(
            [
                _SvmMachine(
                    int(m["pos"]), int(m["neg"]), np.asarray(m["w"], dtype=float), float(m["b"])
                )
                for m in doc["machines"]
            ]
        )
    raise ParseError(f"unknown family {family!r}")


def save_model(clf: TrainedClassifier, path) -> None:
    doc = {
        "format_version": _MODEL_FORMAT_VERSION,
        "method": clf.method.name,
        "config": {
            "id": clf.config.id,
            "channels": list(clf.config.channels),
            "normalization": clf.config.normalization,
        },
        "taxonomy": clf.taxonomy,
        "classes": [cls.id for cls in clf.classes],
        "feature_medians": clf.feature_medians.tolist(),
        "state": _state_to_json(clf.method.family, clf.state),
    }
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def load_model(path) -> TrainedClassifier:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid model JSON ({exc})") from exc
    try:
        if doc["format_version"] != _MODEL_FORMAT_VERSION:
            raise ParseError(f"{path}: unsupported model format {doc['format_version']}")
        method = method_by_name(doc["method"])
        config = FeatureConfig(
            doc["config"]["id"],
            tuple(doc["config"]["channels"]),
            doc["config"]["normalization"],
        )
        classes = tuple(class_from_id(c) for c in doc["classes"])
        state = _state_from_json(method.family, doc["state"])
        medians = np.asarray(doc["feature_medians"], dtype=float)
        taxonomy = doc["taxonomy"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: malformed model file ({exc})") from exc
    return TrainedClassifier(
        method=method,
        config=config,
        taxonomy=taxonomy,
        classes=classes,
        state=state,
        feature_medians=medians,
    )
