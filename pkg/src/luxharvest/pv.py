"""Photovoltaic conversion and energy accounting.

The illuminated J-V curve is modeled by superposition: J(v) = Jsc - Jdark(v),
with Jdark taken from a tabulated dark measurement rather than a fitted diode
equation.  Photocurrent comes from the EQE-weighted photon flux of the
spectrum; the maximum power point is located numerically; harvested power is
derated by a PMIC efficiency curve and a constant battery efficiency.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    CannotSize,
    ConverterRangeExceeded,
    InvalidTimeline,
    OutOfRange,
    ParseError,
)
from .spectral import SPD

_trapz = getattr(np, "trapezoid", None) or np.trapz

__all__ = [
    "ELEMENTARY_CHARGE_C",
    "EnergyEstimate",
    "HarvestChain",
    "MppPoint",
    "PLANCK_J_S",
    "PVConverter",
    "SPEED_OF_LIGHT_M_S",
    "SizingRecommendation",
    "chain_output",
    "estimate_energy",
    "j_at",
    "jsc",
    "load_converter",
    "mpp",
    "pmic_efficiency",
    "read_chain_json",
    "read_dark_jv_csv",
    "read_eqe_csv",
    "recommend_area",
    "voc",
    "write_chain_json",
    "write_dark_jv_csv",
    "write_eqe_csv",
]

ELEMENTARY_CHARGE_C = 1.602176634e-19
PLANCK_J_S = 6.62607015e-34
SPEED_OF_LIGHT_M_S = 2.99792458e8

# Dark current at 0 V must vanish; smaller offsets are zeroed by shifting
# the whole curve, larger ones indicate a bad measurement.
_DARK_J0_SHIFT_LIMIT_MA_CM2 = 1e-4

_VOLTAGE_TOL_V = 1e-6


def _ascending(values, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size < 2:
        raise ValueError(f"{what} must be a 1-D table with at least 2 rows")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains non-finite values")
    if np.any(np.diff(arr) <= 0.0):
        raise ValueError(f"{what} must be strictly increasing")
    return arr


@dataclass(frozen=True, eq=False)
class PVConverter:
    """EQE table plus tabulated dark J-V characteristic for one cell."""

    eqe_wavelength_nm: np.ndarray
    eqe: np.ndarray
    dark_v: np.ndarray
    dark_j_ma_cm2: np.ndarray
    area_cm2: float = 1.0
    name: str = "unnamed"

    def __post_init__(self):
        wl = _ascending(self.eqe_wavelength_nm, "EQE wavelengths")
        eqe = np.asarray(self.eqe, dtype=float)
        if eqe.shape != wl.shape:
            raise ValueError("EQE table length mismatch")
        if not np.all(np.isfinite(eqe)) or np.any(eqe < 0.0) or np.any(eqe > 1.0):
            raise ValueError("EQE values must lie in [0, 1]")
        v = _ascending(self.dark_v, "dark J-V voltages")
        j = np.asarray(self.dark_j_ma_cm2, dtype=float)
        if j.shape != v.shape:
            raise ValueError("dark J-V table length mismatch")
        if not np.all(np.isfinite(j)):
            raise ValueError("dark J-V contains non-finite values")
        if not v[0] <= 0.0 <= v[-1]:
            raise ValueError("dark J-V voltage range must include 0 V")
        j0 = float(np.interp(0.0, v, j))
        if abs(j0) > _DARK_J0_SHIFT_LIMIT_MA_CM2:
            raise ValueError(
                f"dark current at 0 V is {j0} mA/cm2; "
                f"exceeds the {_DARK_J0_SHIFT_LIMIT_MA_CM2} shift limit"
            )
        if j0 != 0.0:
            j = j - j0
        if np.any(np.diff(j) < 0.0):
            raise ValueError("dark current density must be non-decreasing in voltage")
        if not self.area_cm2 > 0.0:
            raise ValueError("cell area must be positive")
        for name, value in (
            ("eqe_wavelength_nm", wl),
            ("eqe", eqe),
            ("dark_v", v),
            ("dark_j_ma_cm2", j),
        ):
            value = np.ascontiguousarray(value)
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def v_max(self) -> float:
        return float(self.dark_v[-1])

    def dark_j(self, v):
        return np.interp(v, self.dark_v, self.dark_j_ma_cm2)


def jsc(spd: SPD, pv: PVConverter) -> float:
    """Short-circuit current density in mA/cm2 from the EQE-weighted flux."""
    lo = min(spd.wavelengths_nm[0], pv.eqe_wavelength_nm[0])
    hi = max(spd.wavelengths_nm[-1], pv.eqe_wavelength_nm[-1])
    grid = np.arange(math.floor(lo), math.ceil(hi) + 0.5, 1.0)
    irr = np.interp(grid, spd.wavelengths_nm, spd.irradiance, left=0.0, right=0.0)
    eqe = np.interp(grid, pv.eqe_wavelength_nm, pv.eqe, left=0.0, right=0.0)
    # photon flux E*lambda/(h*c), wavelength in meters
    flux = irr * grid * 1e-9 / (PLANCK_J_S * SPEED_OF_LIGHT_M_S)
    amps_per_m2 = ELEMENTARY_CHARGE_C * float(_trapz(eqe * flux, grid))
    return max(amps_per_m2 * 0.1, 0.0)


def j_at(v, jsc_ma_cm2: float, pv: PVConverter):
    """Net current density J(v) = Jsc - Jdark(v)."""
    v_arr = np.asarray(v, dtype=float)
    if np.any(v_arr < pv.dark_v[0]) or np.any(v_arr > pv.v_max):
        raise OutOfRange(
            f"voltage outside tabulated dark J-V domain "
            f"[{pv.dark_v[0]}, {pv.v_max}] V"
        )
    result = jsc_ma_cm2 - pv.dark_j(v_arr)
    return float(result) if np.isscalar(v) or v_arr.ndim == 0 else result


def voc(jsc_ma_cm2: float, pv: PVConverter) -> float:
    """Open-circuit voltage, bisected to 1e-6 V."""
    if jsc_ma_cm2 <= 0.0:
        return 0.0
    if jsc_ma_cm2 > float(pv.dark_j_ma_cm2[-1]):
        raise ConverterRangeExceeded(
            f"jsc {jsc_ma_cm2} mA/cm2 exceeds the dark J-V table maximum "
            f"{float(pv.dark_j_ma_cm2[-1])} mA/cm2"
        )
    lo, hi = 0.0, pv.v_max
    while hi - lo > _VOLTAGE_TOL_V:
        mid = 0.5 * (lo + hi)
        if jsc_ma_cm2 - float(pv.dark_j(mid)) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class MppPoint:
    v_v: float
    j_ma_cm2: float
    p_mw_cm2: float


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def mpp(jsc_ma_cm2: float, pv: PVConverter) -> MppPoint:
    """Maximum power point over [0, Voc]: coarse scan then golden section."""
    if jsc_ma_cm2 <= 0.0:
        return MppPoint(0.0, 0.0, 0.0)
    open_v = voc(jsc_ma_cm2, pv)

    def power(v):
        return v * (jsc_ma_cm2 - pv.dark_j(v))

    vs = np.linspace(0.0, open_v, 257)
    ps = vs * (jsc_ma_cm2 - pv.dark_j(vs))
    peak = int(np.argmax(ps))
    best_v, best_p = float(vs[peak]), float(ps[peak])

    a = float(vs[max(peak - 1, 0)])
    b = float(vs[min(peak + 1, len(vs) - 1)])
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    p1, p2 = power(x1), power(x2)
    while b - a > _VOLTAGE_TOL_V:
        if p1 < p2:
            a, x1, p1 = x1, x2, p2
            x2 = a + _GOLDEN * (b - a)
            p2 = power(x2)
        else:
            b, x2, p2 = x2, x1, p1
            x1 = b - _GOLDEN * (b - a)
            p1 = power(x1)
    v_gold = 0.5 * (a + b)
    p_gold = power(v_gold)
    if p_gold < best_p:
        v_gold, p_gold = best_v, best_p
    j_mp = jsc_ma_cm2 - float(pv.dark_j(v_gold))
    return MppPoint(float(v_gold), float(j_mp), float(v_gold * j_mp))


@dataclass(frozen=True, eq=False)
class HarvestChain:
    """PMIC efficiency vs input power, plus battery efficiency and capacity."""

    pmic_power_w: np.ndarray
    pmic_eff: np.ndarray
    battery_efficiency: float = 0.95
    battery_capacity_wh: float = 4.4

    def __post_init__(self):
        p = _ascending(self.pmic_power_w, "PMIC power grid")
        if np.any(p <= 0.0):
            raise ValueError("PMIC power grid must be positive")
        eff = np.asarray(self.pmic_eff, dtype=float)
        if eff.shape != p.shape:
            raise ValueError("PMIC efficiency table length mismatch")
        if np.any(eff <= 0.0) or np.any(eff > 1.0):
            raise ValueError("PMIC efficiencies must lie in (0, 1]")
        if not 0.0 < self.battery_efficiency <= 1.0:
            raise ValueError("battery efficiency must lie in (0, 1]")
        if not self.battery_capacity_wh > 0.0:
            raise ValueError("battery capacity must be positive")
        for name, value in (("pmic_power_w", p), ("pmic_eff", eff)):
            value = np.ascontiguousarray(value)
            value.setflags(write=False)
            object.__setattr__(self, name, value)


def pmic_efficiency(p_w: float, chain: HarvestChain) -> float:
    """Efficiency interpolated in log10(power), clamped at the table edges."""
    if p_w <= chain.pmic_power_w[0]:
        return float(chain.pmic_eff[0])
    if p_w >= chain.pmic_power_w[-1]:
        return float(chain.pmic_eff[-1])
    return float(np.interp(math.log10(p_w), np.log10(chain.pmic_power_w), chain.pmic_eff))


def chain_output(pmpp_total_w: float, chain: HarvestChain) -> float:
    """Stored power after PMIC and battery losses."""
    if pmpp_total_w < 0.0:
        raise ValueError("input power must be non-negative")
    if pmpp_total_w == 0.0:
        return 0.0
    return pmpp_total_w * pmic_efficiency(pmpp_total_w, chain) * chain.battery_efficiency


@dataclass(frozen=True, eq=False)
class EnergyEstimate:
    """Power timeline and trapezoidal energy totals for one estimation run."""

    t_s: np.ndarray
    p_mpp_w: np.ndarray
    p_stored_w: np.ndarray
    harvestable_wh: float
    stored_wh: float
    area_cm2: float
    converter_name: str = "unnamed"
    source: str = ""

    @property
    def elapsed_h(self) -> float:
        return (float(self.t_s[-1]) - float(self.t_s[0])) / 3600.0


def _integrate_wh(t_s: np.ndarray, p_w: np.ndarray) -> float:
    return float(_trapz(p_w, t_s)) / 3600.0


def estimate_energy(timeline, pv: PVConverter, chain: HarvestChain, source: str = "") -> EnergyEstimate:
    """Integrate MPP and stored power over a (time, SPD) iterable.

    Timestamps must be strictly increasing; the iterable is consumed lazily
    so timelines never need to be materialized.
    """
    t_list: list[float] = []
    p_mpp: list[float] = []
    p_stored: list[float] = []
    last_t = None
    for t_val, spd in timeline:
        t_val = float(t_val)
        if last_t is not None and t_val <= last_t:
            raise InvalidTimeline(f"timestamps must be strictly increasing at t={t_val}")
        last_t = t_val
        point = mpp(jsc(spd, pv), pv)
        p_w = point.p_mw_cm2 * pv.area_cm2 * 1e-3
        t_list.append(t_val)
        p_mpp.append(p_w)
        p_stored.append(chain_output(p_w, chain))
    if len(t_list) < 2:
        raise InvalidTimeline("timeline needs at least 2 samples")
    t_arr = np.asarray(t_list)
    mpp_arr = np.asarray(p_mpp)
    stored_arr = np.asarray(p_stored)
    return EnergyEstimate(
        t_s=t_arr,
        p_mpp_w=mpp_arr,
        p_stored_w=stored_arr,
        harvestable_wh=_integrate_wh(t_arr, mpp_arr),
        stored_wh=_integrate_wh(t_arr, stored_arr),
        area_cm2=pv.area_cm2,
        converter_name=pv.name,
        source=source,
    )


@dataclass(frozen=True)
class SizingRecommendation:
    area_cm2: float
    cell_count: int
    avg_stored_w: float


def recommend_area(
    target_avg_power_w: float,
    estimate: EnergyEstimate,
    per_cell_cm2: float | None = None,
) -> SizingRecommendation:
    """Scale the estimate's area so average stored power meets the target."""
    if target_avg_power_w <= 0.0:
        raise ValueError("target power must be positive")
    if estimate.stored_wh <= 0.0 or estimate.elapsed_h <= 0.0:
        raise CannotSize("estimate stored no energy; cannot size an array from it")
    avg_stored_w = estimate.stored_wh / estimate.elapsed_h
    area = estimate.area_cm2 * target_avg_power_w / avg_stored_w
    cell = per_cell_cm2 if per_cell_cm2 is not None else estimate.area_cm2
    if cell <= 0.0:
        raise ValueError("per-cell area must be positive")
    return SizingRecommendation(area, int(math.ceil(area / cell)), avg_stored_w)


# ---------------------------------------------------------------------------
# File formats

EQE_CSV_HEADER = ("wavelength_nm", "eqe")
DARK_JV_CSV_HEADER = ("voltage_v", "current_density_ma_cm2")


def _read_two_column_csv(path, header: tuple[str, str]):
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines or [c.strip() for c in lines[0].split(",")] != list(header):
        raise ParseError(f"{path}: expected header '{','.join(header)}'")
    first, second = [], []
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError(f"{path}:{i}: expected 2 columns")
        try:
            first.append(float(parts[0]))
            second.append(float(parts[1]))
        except ValueError as exc:
            raise ParseError(f"{path}:{i}: {exc}") from exc
    return np.asarray(first), np.asarray(second)


def _write_two_column_csv(path, header: tuple[str, str], a, b) -> None:
    lines = [",".join(header)]
    lines.extend(f"{x:.10g},{y:.10g}" for x, y in zip(a, b))
    Path(path).write_text("\n".join(lines) + "\n")


def read_eqe_csv(path):
    return _read_two_column_csv(path, EQE_CSV_HEADER)


def write_eqe_csv(wavelength_nm, eqe, path) -> None:
    _write_two_column_csv(path, EQE_CSV_HEADER, wavelength_nm, eqe)


def read_dark_jv_csv(path):
    return _read_two_column_csv(path, DARK_JV_CSV_HEADER)


def write_dark_jv_csv(voltage_v, current_ma_cm2, path) -> None:
    _write_two_column_csv(path, DARK_JV_CSV_HEADER, voltage_v, current_ma_cm2)


def load_converter(eqe_path, dark_jv_path, area_cm2: float = 1.0, name: str = "") -> PVConverter:
    wl, eqe = read_eqe_csv(eqe_path)
    v, j = read_dark_jv_csv(dark_jv_path)
    try:
        return PVConverter(wl, eqe, v, j, area_cm2=area_cm2, name=name or Path(eqe_path).stem)
    except ValueError as exc:
        raise ParseError(f"invalid converter tables: {exc}") from exc


def read_chain_json(path) -> HarvestChain:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
        curve = sorted((float(w), float(e)) for w, e in doc["pmic_curve"])
        chain = HarvestChain(
            pmic_power_w=np.array([w for w, _ in curve]),
            pmic_eff=np.array([e for _, e in curve]),
            battery_efficiency=float(doc["battery_eff"]),
            battery_capacity_wh=float(doc["capacity_wh"]),
        )
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: invalid chain file ({exc})") from exc
    return chain


def write_chain_json(chain: HarvestChain, path) -> None:
    doc = {
        "pmic_curve": [[float(w), float(e)] for w, e in zip(chain.pmic_power_w, chain.pmic_eff)],
        "battery_eff": chain.battery_efficiency,
        "capacity_wh": chain.battery_capacity_wh,
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")
