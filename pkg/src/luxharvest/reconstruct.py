"""Illuminance correction and spectrum reconstruction.

The low-cost LUX reading carries a class-dependent error: roughly constant
for artificial sources, illuminance-dependent for natural light.  Artificial
classes therefore get a single correction factor; natural sub-classes get a
low-order polynomial fitted against reference illuminance over a validity
range.  A reconstructed spectrum is the class reference scaled to the
corrected illuminance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from .classes import (
    LightClass,
    NATURAL_SUBCLASSES,
    class_from_id,
    is_natural,
)
from .classifiers import TrainedClassifier, predict
from .errors import (
    MissingCorrection,
    MissingReference,
    NumericalFailure,
    ParseError,
    TaxonomyError,
)
from .features import extract
from .spectral import SPD, illuminance, read_spd_csv, scale_to_lux, write_spd_csv
from .twin import (
    PseudoSpectrum,
    REFERENCE_GRID_NM,
    SensorTwin,
    reference_spd,
    sense,
)

__all__ = [
    "ConstantCorrection",
    "LuxCorrection",
    "PolynomialCorrection",
    "ReferenceLibrary",
    "STRONG_DAYLIGHT_MIN_LUX",
    "classify_natural_subclass",
    "correct_lux",
    "correct_lux_detailed",
    "fit_natural_correction",
    "fit_twin_corrections",
    "read_library",
    "reconstruct",
    "twin_reference_library",
    "write_library",
]

# Natural light above this corrected illuminance is strong daylight.
STRONG_DAYLIGHT_MIN_LUX = 1500.0


@dataclass(frozen=True)
class ConstantCorrection:
    """Multiplicative correction for an artificial class."""

    factor: float

    def __post_init__(self):
        if not 0.2 < self.factor < 5.0:
            raise ValueError(f"correction factor {self.factor} outside (0.2, 5)")


@dataclass(frozen=True)
class PolynomialCorrection:
    """Raw-to-corrected lux polynomial, valid on range_lux.

    Coefficients are in ascending order.  The polynomial must be monotone
    non-decreasing over the validity range; raw readings outside the range
    are clamped to the nearest bound and flagged.
    """

    coefficients: tuple[float, ...]
    range_lux: tuple[float, float]

    def __post_init__(self):
        if len(self.coefficients) == 0 or len(self.coefficients) > 3:
            raise ValueError("polynomial degree must be 0, 1 or 2")
        lo, hi = self.range_lux
        if not 0.0 <= lo < hi:
            raise ValueError("validity range must satisfy 0 <= lo < hi")
        grid = np.arange(lo, hi + 1.0, 1.0)
        values = self._eval(grid)
        if np.any(np.diff(values) < -1e-9):
            raise ValueError("correction polynomial must be monotone non-decreasing")

    def _eval(self, raw):
        return np.polynomial.polynomial.polyval(raw, np.asarray(self.coefficients))

    def apply(self, raw_lux: float) -> tuple[float, bool]:
        lo, hi = self.range_lux
        clamped = raw_lux < lo or raw_lux > hi
        value = float(self._eval(np.clip(raw_lux, lo, hi)))
        return max(value, 0.0), clamped


@dataclass(frozen=True)
class LuxCorrection:
    """Correction table: one entry per class the pipeline may encounter."""

    entries: Mapping[LightClass, ConstantCorrection | PolynomialCorrection]


def correct_lux_detailed(
    raw_lux: float, cls: LightClass, correction: LuxCorrection
) -> tuple[float, bool]:
    """Corrected illuminance and whether the reading was out of range."""
    if raw_lux < 0.0:
        raise ValueError("raw lux must be non-negative")
    if cls is LightClass.DARK:
        return 0.0, False
    entry = correction.entries.get(cls)
    if entry is None:
        raise MissingCorrection(f"no lux correction for class {cls.id}")
    if isinstance(entry, ConstantCorrection):
        return raw_lux * entry.factor, False
    return entry.apply(raw_lux)


def correct_lux(raw_lux: float, cls: LightClass, correction: LuxCorrection) -> float:
    return correct_lux_detailed(raw_lux, cls, correction)[0]


def fit_natural_correction(
    raw_lux, reference_lux, degree: int
) -> tuple[tuple[float, ...], float]:
    """Least-squares raw-to-reference polynomial; returns (coefficients, rms).

    Needs at least degree + 1 samples and a full-rank design, otherwise
    NumericalFailure.
    """
    raw = np.asarray(raw_lux, dtype=float)
    ref = np.asarray(reference_lux, dtype=float)
    if degree not in (0, 1, 2):
        raise ValueError("degree must be 0, 1 or 2")
    if raw.shape != ref.shape or raw.ndim != 1:
        raise NumericalFailure("raw and reference sample lengths differ")
    if raw.size < degree + 1:
        raise NumericalFailure(
            f"need at least {degree + 1} samples for degree {degree}"
        )
    if np.any(ref <= 0.0):
        raise ValueError("reference illuminance must be positive")
    design = np.vander(raw, degree + 1, increasing=True)
    coeffs, _, rank, _ = np.linalg.lstsq(design, ref, rcond=None)
    if rank < degree + 1:
        raise NumericalFailure("rank-deficient fit (degenerate raw lux samples)")
    residual = design @ coeffs - ref
    rms = float(np.sqrt(np.mean(residual**2)))
    return tuple(float(c) for c in coeffs), rms


def _apply_subclass_rule(
    sub: LightClass, raw_lux: float, correction: LuxCorrection
) -> LightClass:
    """Illuminance rule on top of a shape decision: strong daylight is
    exactly the regime above the threshold."""
    if sub not in NATURAL_SUBCLASSES:
        sub = LightClass.DAYLIGHT
    corrected, _ = correct_lux_detailed(raw_lux, sub, correction)
    if corrected > STRONG_DAYLIGHT_MIN_LUX:
        return LightClass.STRONG_DAYLIGHT
    if sub is LightClass.STRONG_DAYLIGHT:
        return LightClass.DAYLIGHT
    return sub


def classify_natural_subclass(
    ps: PseudoSpectrum,
    classified: LightClass,
    subclassifier: TrainedClassifier,
    correction: LuxCorrection,
) -> LightClass:
    """Refine a natural classification into one of the four sub-classes.

    The extended-taxonomy classifier picks the shape; the illuminance rule
    overrides it: corrected lux above the strong-daylight threshold always
    means strong daylight, below it never does.
    """
    if not is_natural(classified):
        raise TaxonomyError(f"{classified.id} is not a natural class")
    sub = predict(subclassifier, extract(ps, subclassifier.config))
    return _apply_subclass_rule(sub, ps.lux, correction)


@dataclass(eq=False)
class ReferenceLibrary:
    """Class references plus the lux-correction table, JSON manifest backed."""

    spds: dict[LightClass, SPD]
    correction: LuxCorrection

    def reference(self, cls: LightClass) -> SPD:
        spd = self.spds.get(cls)
        if spd is None:
            raise MissingReference(f"no reference spectrum for class {cls.id}")
        return spd


def reconstruct(cls: LightClass, corrected_lux: float, library: ReferenceLibrary) -> SPD:
    """Class reference scaled so its illuminance equals corrected_lux."""
    if cls is LightClass.DARK or corrected_lux == 0.0:
        return SPD(REFERENCE_GRID_NM, np.zeros_like(REFERENCE_GRID_NM))
    return scale_to_lux(library.reference(cls), corrected_lux)


# ---------------------------------------------------------------------------
# Fitting corrections against the twin

# Raw-reading sweep ranges used when fitting per-class corrections.
_FIT_RANGES: dict[LightClass, tuple[float, float]] = {
    LightClass.NLTW_CLEAR: (20.0, 5000.0),
    LightClass.NLTW_CLOUDY: (20.0, 5000.0),
    LightClass.SUNRISE: (5.0, 600.0),
    LightClass.SUNSET: (5.0, 600.0),
    LightClass.DAYLIGHT: (20.0, 1500.0),
    LightClass.STRONG_DAYLIGHT: (1500.0, 8000.0),
}


def _noiseless(twin: SensorTwin) -> SensorTwin:
    if twin.noise_frac == 0.0:
        return twin
    return SensorTwin(
        channels=twin.channels,
        lux_breakpoints=twin.lux_breakpoints,
        lux_segments=twin.lux_segments,
        class_bias=twin.class_bias,
        noise_frac=0.0,
        b_floor=twin.b_floor,
    )


def fit_twin_corrections(
    twin: SensorTwin,
    classes,
    degree: int = 2,
    points: int = 25,
) -> LuxCorrection:
    """Fit the correction table by sweeping noiseless twin readings.

    Artificial classes get the mean reference/raw ratio as a constant
    factor; natural classes get a degree<=2 polynomial over their fit
    range, with the validity range expressed in raw readings.
    """
    quiet = _noiseless(twin)
    entries: dict[LightClass, ConstantCorrection | PolynomialCorrection] = {}
    for cls in classes:
        if cls is LightClass.DARK:
            continue
        lo, hi = _FIT_RANGES.get(cls, (10.0, 5000.0))
        true_grid = np.linspace(lo, hi, points)
        raw = np.array(
            [
                sense(reference_spd(cls, L), quiet, truth_class=cls, true_lux=L).lux
                for L in true_grid
            ]
        )
        if is_natural(cls):
            coeffs, _ = fit_natural_correction(raw, true_grid, degree)
            entries[cls] = PolynomialCorrection(
                coeffs, (float(raw.min()), float(raw.max()))
            )
        else:
            entries[cls] = ConstantCorrection(float(np.mean(true_grid / raw)))
    return LuxCorrection(entries)


def twin_reference_library(
    twin: SensorTwin, classes, degree: int = 2
) -> ReferenceLibrary:
    spds = {cls: reference_spd(cls, 1000.0) for cls in classes if cls is not LightClass.DARK}
    return ReferenceLibrary(spds, fit_twin_corrections(twin, classes, degree=degree))


# ---------------------------------------------------------------------------
# Manifest files

def _correction_to_json(entry) -> dict:
    if isinstance(entry, ConstantCorrection):
        return {"type": "constant", "params": [entry.factor]}
    return {
        "type": "poly",
        "params": list(entry.coefficients),
        "range_lux": list(entry.range_lux),
    }


def _correction_from_json(doc: dict):
    try:
        if doc["type"] == "constant":
            return ConstantCorrection(float(doc["params"][0]))
        if doc["type"] == "poly":
            return PolynomialCorrection(
                tuple(float(c) for c in doc["params"]),
                (float(doc["range_lux"][0]), float(doc["range_lux"][1])),
            )
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise ParseError(f"bad correction entry: {exc}") from exc
    raise ParseError(f"unknown correction type {doc.get('type')!r}")


def write_library(library: ReferenceLibrary, manifest_path, spd_dir=None) -> None:
    """Write the manifest JSON plus one spectrum CSV per class."""
    manifest_path = Path(manifest_path)
    spd_dir = Path(spd_dir) if spd_dir is not None else manifest_path.parent
    spd_dir.mkdir(parents=True, exist_ok=True)
    doc: dict = {"spectra": {}, "correction": {}}
    for cls, spd in sorted(library.spds.items(), key=lambda kv: kv[0].id):
        filename = f"reference_{cls.id}.csv"
        write_spd_csv(spd, spd_dir / filename)
        doc["spectra"][cls.id] = filename
    for cls, entry in sorted(library.correction.entries.items(), key=lambda kv: kv[0].id):
        doc["correction"][cls.id] = _correction_to_json(entry)
    manifest_path.write_text(json.dumps(doc, indent=2) + "\n")


def read_library(manifest_path) -> ReferenceLibrary:
    manifest_path = Path(manifest_path)
    try:
        doc = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{manifest_path}: invalid manifest JSON ({exc})") from exc
    try:
        spd_entries = doc["spectra"]
        corr_entries = doc["correction"]
    except KeyError as exc:
        raise ParseError(f"{manifest_path}: missing section {exc}") from exc
    spds = {}
    for name, filename in spd_entries.items():
        cls = class_from_id(name)
        spd = read_spd_csv(manifest_path.parent / filename)
        if illuminance(spd) <= 0.0 and cls is not LightClass.DARK:
            raise ParseError(f"{manifest_path}: reference for {name} has no illuminance")
        spds[cls] = spd
    entries = {
        class_from_id(name): _correction_from_json(entry)
        for name, entry in corr_entries.items()
    }
    return ReferenceLibrary(spds, LuxCorrection(entries))
