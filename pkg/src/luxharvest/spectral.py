"""Spectral power distributions and photometric quadrature.

All spectra are tabulated: a strictly increasing wavelength grid in nm and
non-negative spectral irradiance in W m^-2 nm^-1.  Every integral in the
package is trapezoidal, and resampling is linear inside the tabulated
domain with zero extension outside it.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from ._cie_photopic import PHOTOPIC_5NM, PHOTOPIC_START_NM, PHOTOPIC_STEP_NM
from .errors import DegenerateSpectrum, InvalidGrid, ParseError, ShapeMismatch

__all__ = [
    "LUMINOUS_EFFICACY_LM_PER_W",
    "REFERENCE_SPAN_NM",
    "SPD",
    "PhotopicCurve",
    "illuminance",
    "integrate",
    "mix",
    "photopic_curve",
    "read_spd_csv",
    "resample",
    "scale_to_lux",
    "write_spd_csv",
]

# Maximum spectral luminous efficacy at 555 nm, lm/W (SI definition of the candela).
LUMINOUS_EFFICACY_LM_PER_W = 683.002

# Span the sensors and the PV converter care about.
REFERENCE_SPAN_NM = (350.0, 1100.0)

_trapz = getattr(np, "trapezoid", None) or np.trapz

SPD_CSV_HEADER = ("wavelength_nm", "irradiance_w_m2_nm")


def _validated_grid(wavelengths_nm) -> np.ndarray:
    grid = np.asarray(wavelengths_nm, dtype=np.float64)
    if grid.ndim != 1 or grid.size < 2:
        raise InvalidGrid("wavelength grid needs at least two points")
    if not np.all(np.isfinite(grid)):
        raise InvalidGrid("wavelength grid contains non-finite values")
    if np.any(np.diff(grid) <= 0.0):
        raise InvalidGrid("wavelength grid must be strictly increasing")
    return grid


@dataclass(frozen=True, eq=False)
class SPD:
    """Tabulated spectral power distribution.

    Attributes
    ----------
    wavelengths_nm : strictly increasing grid, at least two points.
    irradiance : spectral irradiance in W m^-2 nm^-1, non-negative.
    """

    wavelengths_nm: np.ndarray
    irradiance: np.ndarray

    def __post_init__(self):
        grid = _validated_grid(self.wavelengths_nm)
        values = np.asarray(self.irradiance, dtype=np.float64)
        if values.shape != grid.shape:
            raise ShapeMismatch(
                f"irradiance length {values.shape} does not match grid {grid.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("irradiance contains non-finite values")
        if np.any(values < 0.0):
            raise ValueError("irradiance values must be non-negative")
        grid.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "wavelengths_nm", grid)
        object.__setattr__(self, "irradiance", values)

    @property
    def domain_nm(self) -> tuple[float, float]:
        return float(self.wavelengths_nm[0]), float(self.wavelengths_nm[-1])

    def scaled(self, factor: float) -> "SPD":
        if factor < 0.0:
            raise ValueError("scale factor must be non-negative")
        return SPD(self.wavelengths_nm, self.irradiance * factor)


@dataclass(frozen=True, eq=False)
class PhotopicCurve:
    """V(lambda) on a 1 nm grid, 360 to 830 nm, peak 1.0 at 555 nm."""

    wavelengths_nm: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        grid = _validated_grid(self.wavelengths_nm)
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != grid.shape:
            raise ShapeMismatch("photopic curve grid/value length mismatch")
        if np.any(vals < 0.0) or np.any(vals > 1.0):
            raise ValueError("photopic values must lie in [0, 1]")
        grid.flags.writeable = False
        vals.flags.writeable = False
        object.__setattr__(self, "wavelengths_nm", grid)
        object.__setattr__(self, "values", vals)


@lru_cache(maxsize=1)
def photopic_curve() -> PhotopicCurve:
    """The CIE 1931 photopic curve expanded to the 1 nm working grid."""
    coarse_grid = PHOTOPIC_START_NM + PHOTOPIC_STEP_NM * np.arange(len(PHOTOPIC_5NM))
    grid = np.arange(PHOTOPIC_START_NM, coarse_grid[-1] + 0.5, 1.0)
    values = np.interp(grid, coarse_grid, np.asarray(PHOTOPIC_5NM))
    return PhotopicCurve(grid, values)


def resample(spd: SPD, grid_nm) -> SPD:
    """Linear interpolation onto a new grid; zero outside the source domain."""
    grid = _validated_grid(grid_nm)
    values = np.interp(grid, spd.wavelengths_nm, spd.irradiance, left=0.0, right=0.0)
    return SPD(grid, values)


def integrate(spd: SPD) -> float:
    """Band-integrated irradiance in W m^-2 (trapezoidal)."""
    return float(_trapz(spd.irradiance, spd.wavelengths_nm))


def illuminance(spd: SPD) -> float:
    """Photopic illuminance in lux, evaluated on the 1 nm photopic grid."""
    curve = photopic_curve()
    on_grid = np.interp(
        curve.wavelengths_nm, spd.wavelengths_nm, spd.irradiance, left=0.0, right=0.0
    )
    return float(
        LUMINOUS_EFFICACY_LM_PER_W * _trapz(on_grid * curve.values, curve.wavelengths_nm)
    )


def scale_to_lux(spd: SPD, target_lux: float) -> SPD:
    """Rescale so that illuminance(result) equals target_lux.

    A target of zero returns the all-zero spectrum on the same grid.  A
    zero-illuminance spectrum cannot reach a positive target and raises
    DegenerateSpectrum.
    """
    if target_lux < 0.0:
        raise ValueError("target illuminance must be non-negative")
    if target_lux == 0.0:
        return SPD(spd.wavelengths_nm, np.zeros_like(spd.irradiance))
    current = illuminance(spd)
    if current <= 0.0:
        raise DegenerateSpectrum(
            "cannot scale a zero-illuminance spectrum to a positive target"
        )
    return spd.scaled(target_lux / current)


def _union_grid_nm(spds) -> np.ndarray:
    lo = min(s.wavelengths_nm[0] for s in spds)
    hi = max(s.wavelengths_nm[-1] for s in spds)
    return np.arange(np.floor(lo), np.ceil(hi) + 0.5, 1.0)


def mix(spds, weights) -> SPD:
    """Weighted sum of spectra on the 1 nm union grid.

    Weights must be non-negative and match the number of spectra.
    """
    spds = list(spds)
    weights = np.asarray(weights, dtype=np.float64)
    if len(spds) == 0:
        raise ShapeMismatch("mix needs at least one spectrum")
    if weights.shape != (len(spds),):
        raise ShapeMismatch(
            f"{len(spds)} spectra but {weights.size} weights"
        )
    if np.any(weights < 0.0):
        raise ValueError("mix weights must be non-negative")
    grid = _union_grid_nm(spds)
    total = np.zeros_like(grid)
    for weight, spd in zip(weights, spds):
        total += weight * np.interp(
            grid, spd.wavelengths_nm, spd.irradiance, left=0.0, right=0.0
        )
    return SPD(grid, total)


def write_spd_csv(spd: SPD, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SPD_CSV_HEADER)
        for wl, irr in zip(spd.wavelengths_nm, spd.irradiance):
            writer.writerow([format(wl, ".10g"), format(irr, ".10g")])


def read_spd_csv(path) -> SPD:
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or tuple(h.strip() for h in header) != SPD_CSV_HEADER:
                raise ParseError(f"{path}: expected header {','.join(SPD_CSV_HEADER)}")
            rows = [(float(row[0]), float(row[1])) for row in reader if row]
    except (ValueError, IndexError) as exc:
        raise ParseError(f"{path}: malformed spectrum row ({exc})") from exc
    if len(rows) < 2:
        raise ParseError(f"{path}: a spectrum needs at least two rows")
    wl, irr = zip(*rows)
    return SPD(np.asarray(wl), np.asarray(irr))
