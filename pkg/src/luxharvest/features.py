"""Feature configurations, normalized differences and labeled datasets.

Channel subsets are named by letters.  A to K are fixed subsets of the six
channels; L to S mirror A to H with the active normalization channel
removed, and only exist when a normalization is chosen (removing a channel
that is not in the parent set would just duplicate the parent, so those
combinations are invalid and show up as skipped sweep cells).  The LUX
channel is an intensity handle, not a spectral feature: it is never
normalized and never used as a normalizer.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .classes import (
    CANONICAL_ORDER,
    LightClass,
    ORDINAL,
    class_from_id,
    taxonomy_classes,
)
from .errors import (
    ConfigError,
    InvalidChannelValue,
    InvalidFold,
    ParseError,
    ShapeMismatch,
    TaxonomyError,
)
from .twin import CHANNEL_NAMES, PseudoSpectrum, SensorTwin, reference_spd, sense

__all__ = [
    "ALL_CONFIG_LETTERS",
    "DATASET_CSV_HEADER",
    "FeatureConfig",
    "FeatureVector",
    "LabeledDataset",
    "NORMALIZATIONS",
    "available_configs",
    "config_is_valid",
    "extract",
    "extract_matrix",
    "feature_config",
    "kfold_split",
    "make_training_dataset",
    "normalized_difference",
]

SPECTRAL_CHANNELS = ("bb", "ir", "r", "g", "b")
NORMALIZATIONS: tuple[str | None, ...] = (None, "b", "g", "r", "bb", "ir")

_CONFIG_TABLE: dict[str, tuple[str, ...]] = {
    "A": ("bb", "ir", "r", "g", "b", "lux"),
    "B": ("bb", "ir", "r", "g", "b"),
    "C": ("r", "g", "b"),
    "D": ("bb", "ir", "lux"),
    "E": ("ir", "r", "g", "b"),
    "F": ("bb", "r", "g", "b"),
    "G": ("b", "ir"),
    "H": ("g", "ir"),
    "I": ("r", "ir"),
    "J": ("bb", "ir"),
    "K": ("ir",),
}

_DERIVED_PARENT = {
    "L": "A",
    "M": "B",
    "N": "C",
    "O": "D",
    "P": "E",
    "Q": "F",
    "R": "G",
    "S": "H",
}

ALL_CONFIG_LETTERS = tuple(_CONFIG_TABLE) + tuple(_DERIVED_PARENT)

DATASET_CSV_HEADER = ("bb", "ir", "r", "g", "b", "lux", "label")


@dataclass(frozen=True)
class FeatureConfig:
    """A named channel subset plus the optional normalization channel."""

    id: str
    channels: tuple[str, ...]
    normalization: str | None = None

    def __post_init__(self):
        for ch in self.channels:
            if ch not in CHANNEL_NAMES:
                raise ConfigError(f"unknown channel {ch!r}")
        if len(set(self.channels)) != len(self.channels):
            raise ConfigError("duplicate channels in config")
        if not self.channels:
            raise ConfigError("a feature config needs at least one channel")
        if self.normalization is not None and self.normalization not in SPECTRAL_CHANNELS:
            raise ConfigError(f"cannot normalize by {self.normalization!r}")

    @property
    def dimension(self) -> int:
        return len(self.channels)


def _validity(letter: str, normalization: str | None) -> tuple[str, ...] | str:
    """Channel tuple when valid, else a reason string."""
    if normalization is not None and normalization not in SPECTRAL_CHANNELS:
        raise ConfigError(f"cannot normalize by {normalization!r}")
    if letter in _CONFIG_TABLE:
        channels = _CONFIG_TABLE[letter]
        if normalization is not None and all(
            ch == normalization for ch in channels
        ):
            return "only the self-normalized zero feature would remain"
        return channels
    if letter in _DERIVED_PARENT:
        if normalization is None:
            return "exists only under a normalization"
        parent = _CONFIG_TABLE[_DERIVED_PARENT[letter]]
        if normalization not in parent:
            return f"would duplicate config {_DERIVED_PARENT[letter]}"
        return tuple(ch for ch in parent if ch != normalization)
    raise ConfigError(f"unknown config letter {letter!r}")


def config_is_valid(letter: str, normalization: str | None) -> bool:
    return not isinstance(_validity(letter, normalization), str)


def feature_config(letter: str, normalization: str | None = None) -> FeatureConfig:
    result = _validity(letter, normalization)
    if isinstance(result, str):
        raise ConfigError(f"config {letter} with norm {normalization}: {result}")
    return FeatureConfig(letter, result, normalization)


def available_configs(normalization: str | None) -> tuple[str, ...]:
    return tuple(
        letter for letter in ALL_CONFIG_LETTERS if config_is_valid(letter, normalization)
    )


def normalized_difference(value: float, norm: float) -> float:
    """(value - norm) / (value + norm) with the 0/0 case defined as 0."""
    if value < 0.0 or norm < 0.0:
        raise InvalidChannelValue("normalized difference needs non-negative inputs")
    total = value + norm
    if total == 0.0:
        return 0.0
    return (value - norm) / total


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    config_id: str

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1:
            raise ShapeMismatch("feature vector must be one-dimensional")
        if not np.all(np.isfinite(vals)):
            raise ValueError("feature vector contains non-finite values")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)


def extract(ps: PseudoSpectrum, config: FeatureConfig) -> FeatureVector:
    """Feature vector for one reading; LUX passes through unnormalized."""
    norm_value = getattr(ps, config.normalization) if config.normalization else None
    out = np.empty(config.dimension)
    for i, ch in enumerate(config.channels):
        value = getattr(ps, ch)
        if config.normalization is None or ch == "lux":
            out[i] = value
        else:
            out[i] = normalized_difference(value, norm_value)
    return FeatureVector(out, config.id)


def extract_matrix(values: np.ndarray, config: FeatureConfig) -> np.ndarray:
    """Vectorized extract over an (n, 6) channel matrix in canonical order."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2 or values.shape[1] != 6:
        raise ShapeMismatch("channel matrix must be (n, 6)")
    if np.any(values < 0.0):
        raise InvalidChannelValue("channel matrix contains negative readings")
    col = {name: i for i, name in enumerate(CHANNEL_NAMES)}
    out = np.empty((values.shape[0], config.dimension))
    norm = values[:, col[config.normalization]] if config.normalization else None
    for i, ch in enumerate(config.channels):
        column = values[:, col[ch]]
        if config.normalization is None or ch == "lux":
            out[:, i] = column
        else:
            total = column + norm
            with np.errstate(invalid="ignore", divide="ignore"):
                nd = np.where(total > 0.0, (column - norm) / np.where(total > 0, total, 1.0), 0.0)
            out[:, i] = nd
    return out


@dataclass(eq=False)
class LabeledDataset:
    """Rows of six-channel readings with class labels, single taxonomy."""

    values: np.ndarray
    labels: np.ndarray
    taxonomy: str = "base"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=int)
        if self.values.ndim != 2 or self.values.shape[1] != 6:
            raise ShapeMismatch("dataset values must be (n, 6)")
        if self.labels.shape != (self.values.shape[0],):
            raise ShapeMismatch("one label per dataset row required")
        allowed = {ORDINAL[c] for c in taxonomy_classes(self.taxonomy)}
        present = set(np.unique(self.labels).tolist())
        if not present <= allowed:
            bad = [CANONICAL_ORDER[i].id for i in sorted(present - allowed)]
            raise TaxonomyError(
                f"labels {bad} are not part of the {self.taxonomy!r} taxonomy"
            )

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def classes(self) -> tuple[LightClass, ...]:
        return tuple(CANONICAL_ORDER[i] for i in np.unique(self.labels))

    def class_counts(self) -> dict[LightClass, int]:
        idx, counts = np.unique(self.labels, return_counts=True)
        return {CANONICAL_ORDER[i]: int(c) for i, c in zip(idx, counts)}

    def subset(self, indices) -> "LabeledDataset":
        return LabeledDataset(self.values[indices], self.labels[indices], self.taxonomy)

    def row(self, i: int) -> tuple[PseudoSpectrum, LightClass]:
        return PseudoSpectrum(*self.values[i]), CANONICAL_ORDER[self.labels[i]]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(DATASET_CSV_HEADER)
            for row, label in zip(self.values, self.labels):
                writer.writerow(
                    [format(v, ".10g") for v in row] + [CANONICAL_ORDER[label].id]
                )

    @classmethod
    def from_csv(cls, path, taxonomy: str | None = None) -> "LabeledDataset":
        path = Path(path)
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or tuple(h.strip() for h in header) != DATASET_CSV_HEADER:
                raise ParseError(
                    f"{path}: expected header {','.join(DATASET_CSV_HEADER)}"
                )
            values, labels = [], []
            try:
                for row in reader:
                    if not row:
                        continue
                    values.append([float(v) for v in row[:6]])
                    labels.append(ORDINAL[class_from_id(row[6])])
            except (ValueError, IndexError) as exc:
                raise ParseError(f"{path}: malformed dataset row ({exc})") from exc
        if not values:
            raise ParseError(f"{path}: dataset has no rows")
        if taxonomy is None:
            present = set(labels)
            base = {ORDINAL[c] for c in taxonomy_classes("base")}
            taxonomy = "base" if present <= base else "extended"
        return cls(np.asarray(values), np.asarray(labels), taxonomy)


def kfold_split(ds: LabeledDataset, k: int, seed: int = 0) -> list[np.ndarray]:
    """Partition row indices into k folds whose sizes differ by at most one.

    Splits are stratified by class whenever every class has at least k
    rows; rows are dealt to the currently smallest fold so both the global
    and the per-class balance hold.  Deterministic for a given seed.
    """
    n = len(ds)
    if k < 2:
        raise InvalidFold("need at least two folds")
    if k > n:
        raise InvalidFold(f"cannot split {n} rows into {k} folds")
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]

    counts = ds.class_counts()
    if all(c >= k for c in counts.values()):
        for cls in sorted(counts, key=lambda c: ORDINAL[c]):
            members = np.flatnonzero(ds.labels == ORDINAL[cls])
            members = members[rng.permutation(len(members))]
            for idx in members:
                target = min(range(k), key=lambda f: (len(folds[f]), f))
                folds[target].append(int(idx))
    else:
        order = rng.permutation(n)
        for pos, idx in enumerate(order):
            folds[pos % k].append(int(idx))

    return [np.sort(np.asarray(f, dtype=int)) for f in folds]


# Default intensity ladder: six geometric steps, three noise draws each.
DEFAULT_INTENSITY_LADDER = (50.0, 100.0, 200.0, 400.0, 800.0, 1600.0)

# Sub-classes live on their own illuminance ranges, so their ladders differ.
EXTENDED_INTENSITY_LADDERS: dict[LightClass, tuple[float, ...]] = {
    LightClass.SUNRISE: (10.0, 25.0, 60.0, 150.0, 300.0, 600.0),
    LightClass.SUNSET: (10.0, 25.0, 60.0, 150.0, 300.0, 600.0),
    LightClass.DAYLIGHT: (100.0, 200.0, 350.0, 600.0, 1000.0, 1450.0),
    LightClass.STRONG_DAYLIGHT: (1600.0, 2200.0, 3000.0, 4200.0, 5800.0, 8000.0),
}


def make_training_dataset(
    twin: SensorTwin,
    taxonomy: str = "base",
    draws: int = 3,
    seed: int = 0,
    intensities: dict[LightClass, tuple[float, ...]] | None = None,
) -> LabeledDataset:
    """Sense every class of the taxonomy over an intensity ladder.

    The base taxonomy with defaults yields 7 classes x 6 intensities x 3
    noise draws = 126 rows.
    """
    classes = taxonomy_classes(taxonomy)
    rng = np.random.default_rng(seed)
    rows, labels = [], []
    for cls in classes:
        ladder: tuple[float, ...] = DEFAULT_INTENSITY_LADDER
        if intensities and cls in intensities:
            ladder = intensities[cls]
        elif taxonomy == "extended" and cls in EXTENDED_INTENSITY_LADDERS:
            ladder = EXTENDED_INTENSITY_LADDERS[cls]
        for lux in ladder:
            spd = reference_spd(cls, lux if cls is not LightClass.DARK else 0.0)
            for _ in range(draws):
                ps = sense(spd, twin, rng=rng, truth_class=cls, true_lux=lux)
                rows.append(ps.as_array())
                labels.append(ORDINAL[cls])
    return LabeledDataset(np.asarray(rows), np.asarray(labels), taxonomy)
