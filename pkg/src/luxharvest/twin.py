"""Digital twin of the six-channel sensing head and indoor-light scenarios.

The twin mirrors a low-cost sensor pair: five photodiode channels (broadband
BB, near-infrared IR and colour channels R, G, B) plus a LUX value derived
from BB and IR through a piecewise empirical formula, as ambient-light chips
do.  Reference emission spectra for each light-source class are synthesised
from simple physical shapes (phosphor LED humps, discharge-lamp lines,
Planck radiators) so the whole pipeline can be exercised without hardware.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Mapping, Sequence, Union

import numpy as np

from .classes import (
    BASE_TAXONOMY,
    CANONICAL_ORDER,
    LightClass,
    ORDINAL,
    class_from_id,
    is_natural,
)
from .errors import (
    InvalidChannelValue,
    ParseError,
    ShapeMismatch,
    UnknownClass,
)
from .spectral import SPD, illuminance, integrate, resample, scale_to_lux

__all__ = [
    "CHANNEL_NAMES",
    "REFERENCE_GRID_NM",
    "ChannelResponsivity",
    "NaturalBias",
    "PseudoSpectrum",
    "Scenario",
    "SensorTwin",
    "Source",
    "SourceProfile",
    "Timeline",
    "channel_value",
    "default_twin",
    "reference_spd",
    "scenario_from_json",
    "scenario_to_json",
    "sense",
    "simulate_day",
]

# Canonical channel order used for feature matrices and CSV columns.
CHANNEL_NAMES = ("bb", "ir", "r", "g", "b", "lux")

# Working wavelength grid shared by the reference spectra, 1 nm steps.
REFERENCE_GRID_NM = np.arange(350.0, 1100.5, 1.0)
REFERENCE_GRID_NM.flags.writeable = False

SECONDS_PER_DAY = 86400.0

_trapz = getattr(np, "trapezoid", None) or np.trapz


@dataclass(frozen=True, eq=False)
class ChannelResponsivity:
    """One photodiode channel: dimensionless band shape plus a count gain.

    The band must stay within [300, 1100] nm with values in [0, 1]; gain is
    in counts per W m^-2 of band-weighted irradiance.
    """

    name: str
    wavelengths_nm: np.ndarray
    response: np.ndarray
    gain: float

    def __post_init__(self):
        wl = np.asarray(self.wavelengths_nm, dtype=np.float64)
        resp = np.asarray(self.response, dtype=np.float64)
        if wl.shape != resp.shape or wl.size < 2:
            raise ShapeMismatch("responsivity grid/value mismatch")
        if np.any(np.diff(wl) <= 0.0):
            raise ValueError("responsivity grid must be strictly increasing")
        if wl[0] < 300.0 or wl[-1] > 1100.0:
            raise ValueError("responsivity band must lie within [300, 1100] nm")
        if np.any(resp < 0.0) or np.any(resp > 1.0 + 1e-12):
            raise ValueError("responsivity values must lie in [0, 1]")
        if self.gain <= 0.0:
            raise ValueError("gain must be positive")
        wl.flags.writeable = False
        resp.flags.writeable = False
        object.__setattr__(self, "wavelengths_nm", wl)
        object.__setattr__(self, "response", resp)


@dataclass(frozen=True)
class PseudoSpectrum:
    """One six-channel reading: five band counts and the derived LUX value."""

    bb: float
    ir: float
    r: float
    g: float
    b: float
    lux: float
    timestamp: float | None = None

    def __post_init__(self):
        for name in CHANNEL_NAMES:
            value = getattr(self, name)
            if not np.isfinite(value):
                raise InvalidChannelValue(f"channel {name} is not finite")
            if value < 0.0:
                raise InvalidChannelValue(f"channel {name} is negative: {value}")

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in CHANNEL_NAMES])


@dataclass(frozen=True)
class NaturalBias:
    """Smooth lux-dependent reading bias: 1 + amplitude * exp(-lux / tau)."""

    amplitude: float
    tau_lux: float

    def at(self, true_lux: float) -> float:
        if true_lux <= 0.0:
            return 1.0 + self.amplitude
        return 1.0 + self.amplitude * float(np.exp(-true_lux / self.tau_lux))


BiasModel = Union[float, NaturalBias]


@dataclass(frozen=True, eq=False)
class SensorTwin:
    """Sensor model: channel set, LUX formula coefficients and error model.

    lux_breakpoints partition the IR/BB count ratio axis into segments;
    lux_segments holds one (c0, c1) pair per segment so that
    raw lux = c0 * BB - c1 * IR.  noise_frac is the additive Gaussian noise
    std as a fraction of each reading.
    """

    channels: tuple[ChannelResponsivity, ...]
    lux_breakpoints: tuple[float, ...]
    lux_segments: tuple[tuple[float, float], ...]
    class_bias: Mapping[LightClass, BiasModel]
    noise_frac: float = 0.01
    # Dark-count floor on the blue channel.  An unlit reading then has the
    # exact band-ratio signature nd(x, b) = -1 instead of the undefined 0/0,
    # parking "dark" at the bottom of the ratio axis away from every lit
    # mixture trajectory.  Lit readings clear the floor and are unaffected.
    b_floor: float = 0.5

    def __post_init__(self):
        names = tuple(ch.name for ch in self.channels)
        if names != CHANNEL_NAMES[:5]:
            raise ShapeMismatch(f"channels must be {CHANNEL_NAMES[:5]}, got {names}")
        if len(self.lux_segments) != len(self.lux_breakpoints) + 1:
            raise ShapeMismatch("need exactly one (c0, c1) pair per ratio segment")
        if any(b2 <= b1 for b1, b2 in zip(self.lux_breakpoints, self.lux_breakpoints[1:])):
            raise ValueError("lux breakpoints must be strictly increasing")
        if self.noise_frac < 0.0:
            raise ValueError("noise fraction must be non-negative")
        if self.b_floor < 0.0:
            raise ValueError("blue dark-count floor must be non-negative")

    @cached_property
    def _grid_responses(self) -> dict[str, np.ndarray]:
        # Responses resampled once onto the shared reference grid (fast path).
        out = {}
        for ch in self.channels:
            out[ch.name] = np.interp(
                REFERENCE_GRID_NM, ch.wavelengths_nm, ch.response, left=0.0, right=0.0
            )
        return out

    def counts(self, spd: SPD) -> np.ndarray:
        """Noiseless counts for the five channels, canonical order."""
        if spd.wavelengths_nm.shape == REFERENCE_GRID_NM.shape and np.array_equal(
            spd.wavelengths_nm, REFERENCE_GRID_NM
        ):
            resp = self._grid_responses
            return np.array(
                [
                    ch.gain * _trapz(resp[ch.name] * spd.irradiance, REFERENCE_GRID_NM)
                    for ch in self.channels
                ]
            )
        return np.array([channel_value(spd, ch) for ch in self.channels])

    def raw_lux(self, bb: float, ir: float) -> float:
        """Piecewise empirical LUX formula on the BB and IR counts."""
        if bb <= 0.0:
            return 0.0
        ratio = ir / bb
        seg = int(np.searchsorted(np.asarray(self.lux_breakpoints), ratio, side="right"))
        c0, c1 = self.lux_segments[seg]
        return c0 * bb - c1 * ir

    def bias_at(self, cls: LightClass | None, true_lux: float) -> float:
        if cls is None or cls is LightClass.DARK:
            return 1.0
        model = self.class_bias.get(cls)
        if model is None:
            return 1.0
        if isinstance(model, NaturalBias):
            return model.at(true_lux)
        return float(model)


def channel_value(spd: SPD, channel: ChannelResponsivity) -> float:
    """gain times the band-weighted irradiance, trapezoidal on the union grid."""
    lo = min(spd.wavelengths_nm[0], channel.wavelengths_nm[0])
    hi = max(spd.wavelengths_nm[-1], channel.wavelengths_nm[-1])
    grid = np.arange(np.floor(lo), np.ceil(hi) + 0.5, 1.0)
    irr = np.interp(grid, spd.wavelengths_nm, spd.irradiance, left=0.0, right=0.0)
    resp = np.interp(grid, channel.wavelengths_nm, channel.response, left=0.0, right=0.0)
    return float(channel.gain * _trapz(resp * irr, grid))


def _sense_from_counts(
    twin: SensorTwin,
    counts: np.ndarray,
    true_lux: float,
    truth_class: LightClass | None,
    rng: np.random.Generator | None,
    timestamp: float | None,
) -> PseudoSpectrum:
    raw = twin.raw_lux(counts[0], counts[1])
    biased = raw * twin.bias_at(truth_class, true_lux)
    values = np.append(counts, biased)
    if rng is not None and twin.noise_frac > 0.0:
        values = values + rng.normal(0.0, twin.noise_frac * np.abs(values))
    values = np.maximum(values, 0.0)
    values[4] = max(values[4], twin.b_floor)
    return PseudoSpectrum(*values, timestamp=timestamp)


def sense(
    spd: SPD,
    twin: SensorTwin,
    rng: np.random.Generator | int | None = None,
    truth_class: LightClass | None = None,
    true_lux: float | None = None,
    timestamp: float | None = None,
) -> PseudoSpectrum:
    """Read the twin's six channels for one spectrum.

    The per-class lux bias needs to know which source dominates, so callers
    that have the ground truth pass truth_class (and, to fix the bias
    operating point, the true illuminance).  Without a class no bias is
    applied.  Noise is only drawn when an rng or seed is given; the result
    is deterministic for a given (spd, twin, seed).
    """
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(int(rng))
    counts = twin.counts(spd)
    if true_lux is None:
        true_lux = illuminance(spd)
    return _sense_from_counts(twin, counts, true_lux, truth_class, rng, timestamp)


# ---------------------------------------------------------------------------
# Reference spectra

_PLANCK_C2_NM_K = 1.4388e7  # second radiation constant, nm K


def _gaussian(grid: np.ndarray, center: float, sigma: float) -> np.ndarray:
    return np.exp(-0.5 * ((grid - center) / sigma) ** 2)


def _planck_shape(grid: np.ndarray, temperature_k: float, tilt: float = 0.0) -> np.ndarray:
    lam = grid / 1000.0  # scaled to keep lam**-5 in a friendly range
    shape = lam**-5.0 / np.expm1(_PLANCK_C2_NM_K / (grid * temperature_k))
    if tilt != 0.0:
        shape = shape * (grid / 700.0) ** tilt
    return shape


# (builder, kwargs) per class; LED humps are blue chip + phosphor, CFLs are
# five discharge/phosphor lines plus the weak argon NIR pair, natural classes
# are windowed Planck shapes.
_CFL_LINES_NM = (405.0, 436.0, 546.0, 578.0, 611.0, 750.4, 811.5)

_LED_PARAMS = {
    LightClass.LED_3000K: {"phosphor_nm": 600.0, "phosphor_sigma": 70.0, "ratio": 3.2},
    LightClass.LED_4000K: {"phosphor_nm": 565.0, "phosphor_sigma": 62.0, "ratio": 1.5},
}

_CFL_WEIGHTS = {
    LightClass.CFL_2700K: (0.22, 0.48, 0.95, 0.55, 1.0, 0.05, 0.035),
    LightClass.CFL_6500K: (0.45, 1.0, 0.95, 0.45, 0.5, 0.018, 0.012),
}

_PLANCK_PARAMS = {
    LightClass.NLTW_CLEAR: {"temperature_k": 6500.0},
    LightClass.NLTW_CLOUDY: {"temperature_k": 7000.0},
    # Ambient daylight away from the window is diffuse skylight, which runs
    # far bluer than direct sun; strong daylight (sun patches) stays warm.
    LightClass.DAYLIGHT: {"temperature_k": 10000.0},
    LightClass.STRONG_DAYLIGHT: {"temperature_k": 6000.0},
    LightClass.SUNRISE: {"temperature_k": 3600.0, "tilt": 0.5},
    LightClass.SUNSET: {"temperature_k": 3400.0, "tilt": 1.5},
}


def reference_spd(cls: LightClass, target_lux: float = 1000.0, grid_nm=None) -> SPD:
    """Synthetic reference emission spectrum for a class, scaled to target_lux.

    Dark returns the all-zero spectrum and ignores the target.
    """
    if not isinstance(cls, LightClass):
        raise UnknownClass(f"not a light class: {cls!r}")
    grid = REFERENCE_GRID_NM if grid_nm is None else np.asarray(grid_nm, dtype=float)
    if cls is LightClass.DARK:
        return SPD(grid, np.zeros_like(grid))
    if cls in _LED_PARAMS:
        p = _LED_PARAMS[cls]
        shape = _gaussian(grid, 450.0, 12.0) + p["ratio"] * _gaussian(
            grid, p["phosphor_nm"], p["phosphor_sigma"]
        )
    elif cls in _CFL_WEIGHTS:
        shape = np.zeros_like(grid)
        for line_nm, weight in zip(_CFL_LINES_NM, _CFL_WEIGHTS[cls]):
            shape += weight * _gaussian(grid, line_nm, 6.0)
    elif cls in _PLANCK_PARAMS:
        shape = _planck_shape(grid, **_PLANCK_PARAMS[cls])
    else:
        raise UnknownClass(f"no reference generator for {cls!r}")
    return scale_to_lux(SPD(grid, shape), target_lux)


# ---------------------------------------------------------------------------
# Twin defaults

def _raised_cosine_band(grid, rise_lo, rise_hi, fall_lo, fall_hi):
    values = np.zeros_like(grid)
    flat = (grid >= rise_hi) & (grid <= fall_lo)
    values[flat] = 1.0
    rising = (grid >= rise_lo) & (grid < rise_hi)
    values[rising] = 0.5 - 0.5 * np.cos(
        np.pi * (grid[rising] - rise_lo) / (rise_hi - rise_lo)
    )
    falling = (grid > fall_lo) & (grid <= fall_hi)
    values[falling] = 0.5 + 0.5 * np.cos(
        np.pi * (grid[falling] - fall_lo) / (fall_hi - fall_lo)
    )
    return values


def _default_channels() -> tuple[ChannelResponsivity, ...]:
    wide = np.arange(300.0, 1100.5, 1.0)
    bb = ChannelResponsivity(
        "bb", wide, _raised_cosine_band(wide, 310.0, 370.0, 990.0, 1090.0), gain=150.0
    )
    # IR band stays above the visible so phosphor/discharge sources barely
    # register; this is what makes nd(ir, b) split natural from artificial.
    ir_grid = np.arange(680.0, 1100.5, 1.0)
    ir = ChannelResponsivity(
        "ir",
        ir_grid,
        _raised_cosine_band(ir_grid, 690.0, 770.0, 1010.0, 1095.0),
        gain=520.0,
    )
    r_grid = np.arange(460.0, 775.5, 1.0)
    g_grid = np.arange(385.0, 700.5, 1.0)
    b_grid = np.arange(330.0, 605.5, 1.0)
    r = ChannelResponsivity("r", r_grid, _gaussian(r_grid, 615.0, 35.0), gain=420.0)
    g = ChannelResponsivity("g", g_grid, _gaussian(g_grid, 540.0, 42.0), gain=400.0)
    b = ChannelResponsivity("b", b_grid, _gaussian(b_grid, 465.0, 32.0), gain=430.0)
    return (bb, ir, r, g, b)


DEFAULT_CLASS_BIAS: dict[LightClass, BiasModel] = {
    LightClass.LED_3000K: 1.30,
    LightClass.LED_4000K: 0.85,
    LightClass.CFL_2700K: 1.12,
    LightClass.CFL_6500K: 0.78,
    LightClass.NLTW_CLEAR: NaturalBias(1.0, 400.0),
    LightClass.NLTW_CLOUDY: NaturalBias(1.0, 450.0),
    LightClass.SUNRISE: NaturalBias(1.0, 350.0),
    LightClass.SUNSET: NaturalBias(0.95, 330.0),
    LightClass.DAYLIGHT: NaturalBias(0.9, 800.0),
    LightClass.STRONG_DAYLIGHT: NaturalBias(0.7, 4000.0),
}


def _calibrate_lux_segments(channels):
    """Solve (c0, c1) per ratio segment so every reference class reads true.

    Classes are sorted by IR/BB count ratio, near-duplicates merged, then
    paired into segments; each pair gives an exact 2x2 solve, a leftover
    singleton gets c1 = 0.  Breakpoints sit mid-gap between segments.
    """
    probe = SensorTwin(
        channels=channels,
        lux_breakpoints=(),
        lux_segments=((1.0, 0.0),),
        class_bias={},
        noise_frac=0.0,
    )
    anchors = []  # (ratio, bb, ir)
    for cls in CANONICAL_ORDER:
        if cls is LightClass.DARK or cls not in DEFAULT_CLASS_BIAS:
            continue
        counts = probe.counts(reference_spd(cls, 1000.0))
        bb, ir = counts[0], counts[1]
        anchors.append((ir / bb, bb, ir))
    anchors.sort(key=lambda a: a[0])
    merged: list[tuple[float, float, float]] = []
    for ratio, bb, ir in anchors:
        if merged and abs(ratio - merged[-1][0]) < 1e-9:
            continue
        merged.append((ratio, bb, ir))
    groups = [merged[i : i + 2] for i in range(0, len(merged), 2)]
    segments = []
    for group in groups:
        if len(group) == 2:
            (_, bb1, ir1), (_, bb2, ir2) = group
            matrix = np.array([[bb1, -ir1], [bb2, -ir2]])
            c0, c1 = np.linalg.solve(matrix, np.array([1000.0, 1000.0]))
        else:
            (_, bb1, _) = group[0]
            c0, c1 = 1000.0 / bb1, 0.0
        segments.append((float(c0), float(c1)))
    breakpoints = tuple(
        (groups[i][-1][0] + groups[i + 1][0][0]) / 2.0 for i in range(len(groups) - 1)
    )
    return breakpoints, tuple(segments)


_DEFAULT_TWIN_CACHE: dict[float, SensorTwin] = {}


def default_twin(noise_frac: float = 0.01) -> SensorTwin:
    """The bundled sensor twin, LUX formula calibrated on the reference set."""
    twin = _DEFAULT_TWIN_CACHE.get(noise_frac)
    if twin is None:
        channels = _default_channels()
        breakpoints, segments = _calibrate_lux_segments(channels)
        twin = SensorTwin(
            channels=channels,
            lux_breakpoints=breakpoints,
            lux_segments=segments,
            class_bias=dict(DEFAULT_CLASS_BIAS),
            noise_frac=noise_frac,
        )
        _DEFAULT_TWIN_CACHE[noise_frac] = twin
    return twin


# ---------------------------------------------------------------------------
# Scenarios

@dataclass(frozen=True)
class SourceProfile:
    """Daily illuminance profile of one source.

    Kinds: "constant" (params lux, optional start_s/end_s window),
    "bell" (peak_lux scalar or per-day list, center_s, sigma_s, optional
    window) and "schedule" (entries: list of [start_s, end_s, lux]).
    Times are seconds within the day; profiles repeat daily.
    """

    kind: str
    params: Mapping[str, object]

    def __post_init__(self):
        if self.kind not in ("constant", "bell", "schedule"):
            raise ParseError(f"unknown profile kind {self.kind!r}")
        p = dict(self.params)
        try:
            if self.kind == "constant":
                float(p["lux"])
            elif self.kind == "bell":
                peak = p["peak_lux"]
                if not isinstance(peak, (int, float)):
                    [float(v) for v in peak]
                float(p["center_s"]), float(p["sigma_s"])
            else:
                for start, end, lux in p["entries"]:
                    float(start), float(end), float(lux)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad {self.kind} profile params: {exc}") from exc

    def lux_at(self, t_in_day_s: float, day: int) -> float:
        p = self.params
        if self.kind == "constant":
            start = float(p.get("start_s", 0.0))
            end = float(p.get("end_s", SECONDS_PER_DAY))
            return float(p["lux"]) if start <= t_in_day_s < end else 0.0
        if self.kind == "bell":
            start = float(p.get("start_s", 0.0))
            end = float(p.get("end_s", SECONDS_PER_DAY))
            if not (start <= t_in_day_s < end):
                return 0.0
            peak = p["peak_lux"]
            if not isinstance(peak, (int, float)):
                peak = peak[day % len(peak)]
            arg = (t_in_day_s - float(p["center_s"])) / float(p["sigma_s"])
            return float(peak) * float(np.exp(-0.5 * arg * arg))
        for start, end, lux in p["entries"]:
            if float(start) <= t_in_day_s < float(end):
                return float(lux)
        return 0.0


@dataclass(frozen=True)
class Source:
    light_class: LightClass
    profile: SourceProfile


@dataclass(frozen=True)
class Scenario:
    """A multi-day lighting timeline: sources plus the sensing twin."""

    duration_s: float
    step_s: float
    sources: tuple[Source, ...]
    twin: SensorTwin

    def __post_init__(self):
        if self.duration_s <= 0.0 or self.step_s <= 0.0:
            raise ValueError("duration and step must be positive")
        if self.step_s > self.duration_s:
            raise ValueError("step exceeds scenario duration")


@dataclass(eq=False)
class Timeline:
    """Simulated sensing timeline with per-step ground truth.

    channels holds the six sensed values per step (canonical order);
    fractions holds per-source-class irradiance fractions that sum to one
    on lit steps.  weights (per unique source class, relative to the
    1000 lx references) let the ground-truth spectrum be rebuilt lazily.
    """

    t_s: np.ndarray
    channels: np.ndarray
    truth_class: np.ndarray
    fractions: np.ndarray
    source_classes: tuple[LightClass, ...]
    weights: np.ndarray | None = None
    _ref_irradiance: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.t_s)

    def pseudo(self, i: int) -> PseudoSpectrum:
        row = self.channels[i]
        return PseudoSpectrum(*row, timestamp=float(self.t_s[i]))

    def truth_spd(self, i: int) -> SPD:
        if self.weights is None or self._ref_irradiance is None:
            raise InvalidChannelValue(
                "timeline was loaded without ground-truth spectra"
            )
        return SPD(REFERENCE_GRID_NM, self.weights[i] @ self._ref_irradiance)

    def true_lux(self, i: int) -> float:
        if self.weights is None:
            raise InvalidChannelValue("timeline was loaded without ground truth lux")
        return float(self.weights[i].sum() * 1000.0)

    def to_csv(self, path) -> None:
        import csv as _csv

        header = ["timestamp", *CHANNEL_NAMES, "truth_class"]
        header += [f"frac_{cls.id}" for cls in self.source_classes]
        with open(path, "w", newline="") as fh:
            writer = _csv.writer(fh)
            writer.writerow(header)
            for i in range(len(self)):
                row = [format(self.t_s[i], ".10g")]
                row += [format(v, ".10g") for v in self.channels[i]]
                row.append(CANONICAL_ORDER[self.truth_class[i]].id)
                row += [format(v, ".10g") for v in self.fractions[i]]
                writer.writerow(row)

    @classmethod
    def from_csv(cls, path) -> "Timeline":
        import csv as _csv

        path = Path(path)
        with open(path, newline="") as fh:
            reader = _csv.reader(fh)
            header = next(reader, None)
            if header is None or header[:8] != ["timestamp", *CHANNEL_NAMES, "truth_class"]:
                raise ParseError(f"{path}: not a timeline CSV")
            frac_classes = []
            for col in header[8:]:
                if not col.startswith("frac_"):
                    raise ParseError(f"{path}: unexpected column {col!r}")
                frac_classes.append(class_from_id(col[len("frac_") :]))
            t, chan, truth, fracs = [], [], [], []
            try:
                for row in reader:
                    if not row:
                        continue
                    t.append(float(row[0]))
                    chan.append([float(v) for v in row[1:7]])
                    truth.append(ORDINAL[class_from_id(row[7])])
                    fracs.append([float(v) for v in row[8:]])
            except (ValueError, IndexError) as exc:
                raise ParseError(f"{path}: malformed timeline row ({exc})") from exc
        return cls(
            t_s=np.asarray(t),
            channels=np.asarray(chan).reshape(len(t), 6),
            truth_class=np.asarray(truth, dtype=int),
            fractions=np.asarray(fracs).reshape(len(t), len(frac_classes)),
            source_classes=tuple(frac_classes),
        )


def simulate_day(scenario: Scenario, seed: int) -> Timeline:
    """Run the twin over the scenario and record truth alongside readings.

    Steps are step_s apart from t = 0 through the scenario duration
    (inclusive).  Each simulated day draws noise from its own sub-seed, so
    the result is deterministic for a given (scenario, seed) regardless of
    chunking.
    """
    twin = scenario.twin
    n_steps = int(np.floor(scenario.duration_s / scenario.step_s)) + 1
    t_s = np.arange(n_steps) * scenario.step_s
    n_days = max(1, int(np.ceil(scenario.duration_s / SECONDS_PER_DAY)))
    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n_days)]

    unique_classes: list[LightClass] = []
    for src in scenario.sources:
        if src.light_class not in unique_classes:
            unique_classes.append(src.light_class)
    unique_classes.sort(key=lambda c: ORDINAL[c])
    class_index = {cls: i for i, cls in enumerate(unique_classes)}
    m = len(unique_classes)

    ref_irr = np.zeros((m, REFERENCE_GRID_NM.size))
    ref_counts = np.zeros((m, 5))
    ref_integral = np.zeros(m)
    for cls, i in class_index.items():
        ref = reference_spd(cls, 1000.0)
        ref_irr[i] = ref.irradiance
        ref_counts[i] = twin.counts(ref)
        ref_integral[i] = integrate(ref)

    channels = np.zeros((n_steps, 6))
    truth = np.zeros(n_steps, dtype=int)
    fractions = np.zeros((n_steps, m))
    weights = np.zeros((n_steps, m))

    dark_ordinal = ORDINAL[LightClass.DARK]
    for i, t in enumerate(t_s):
        day = min(int(t // SECONDS_PER_DAY), n_days - 1)
        t_in_day = t - day * SECONDS_PER_DAY
        w = np.zeros(m)
        for src in scenario.sources:
            w[class_index[src.light_class]] += (
                src.profile.lux_at(t_in_day, day) / 1000.0
            )
        weights[i] = w
        irr = w * ref_integral
        total_irr = irr.sum()
        if total_irr > 0.0:
            fractions[i] = irr / total_irr
            dominant = unique_classes[int(np.argmax(fractions[i]))]
        else:
            dominant = LightClass.DARK
        truth[i] = ORDINAL[dominant] if total_irr > 0.0 else dark_ordinal
        counts = w @ ref_counts
        true_lux = w.sum() * 1000.0
        ps = _sense_from_counts(
            twin, counts, true_lux, dominant if total_irr > 0.0 else None,
            rngs[day], timestamp=float(t),
        )
        channels[i] = ps.as_array()

    return Timeline(
        t_s=t_s,
        channels=channels,
        truth_class=truth,
        fractions=fractions,
        source_classes=tuple(unique_classes),
        weights=weights,
        _ref_irradiance=ref_irr,
    )


# ---------------------------------------------------------------------------
# Scenario JSON

def _bias_to_json(bias: BiasModel):
    if isinstance(bias, NaturalBias):
        return {"amplitude": bias.amplitude, "tau_lux": bias.tau_lux}
    return bias


def _bias_from_json(value) -> BiasModel:
    if isinstance(value, dict):
        try:
            return NaturalBias(float(value["amplitude"]), float(value["tau_lux"]))
        except KeyError as exc:
            raise ParseError(f"natural bias needs amplitude and tau_lux: {exc}") from exc
    return float(value)


def scenario_to_json(scenario: Scenario, path=None) -> dict:
    doc = {
        "duration_s": scenario.duration_s,
        "step_s": scenario.step_s,
        "sources": [
            {
                "class": src.light_class.id,
                "profile": {"type": src.profile.kind, "params": dict(src.profile.params)},
            }
            for src in scenario.sources
        ],
        "twin": {
            "bias": {
                cls.id: _bias_to_json(b) for cls, b in scenario.twin.class_bias.items()
            },
            "noise_std": scenario.twin.noise_frac,
            "b_floor": scenario.twin.b_floor,
            "lux_coeffs": {
                "breakpoints": list(scenario.twin.lux_breakpoints),
                "segments": [list(seg) for seg in scenario.twin.lux_segments],
            },
        },
    }
    if path is not None:
        Path(path).write_text(json.dumps(doc, indent=2) + "\n")
    return doc


def scenario_from_json(source) -> Scenario:
    """Build a Scenario from a JSON file path or an already-parsed dict.

    Twin sections may be partial: omitted bias entries, noise_std or
    lux_coeffs fall back to the bundled defaults.
    """
    if isinstance(source, (str, Path)):
        try:
            doc = json.loads(Path(source).read_text())
        except json.JSONDecodeError as exc:
            raise ParseError(f"{source}: invalid JSON ({exc})") from exc
    else:
        doc = source
    try:
        duration = float(doc["duration_s"])
        step = float(doc["step_s"])
        raw_sources = doc["sources"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"scenario JSON missing field: {exc}") from exc

    sources = []
    for entry in raw_sources:
        try:
            cls = class_from_id(entry["class"])
            profile = SourceProfile(entry["profile"]["type"], entry["profile"]["params"])
        except (KeyError, TypeError) as exc:
            raise ParseError(f"bad scenario source entry: {exc}") from exc
        sources.append(Source(cls, profile))

    base = default_twin()
    twin_doc = doc.get("twin", {})
    bias: dict[LightClass, BiasModel] = dict(base.class_bias)
    for name, value in twin_doc.get("bias", {}).items():
        bias[class_from_id(name)] = _bias_from_json(value)
    noise = float(twin_doc.get("noise_std", base.noise_frac))
    b_floor = float(twin_doc.get("b_floor", base.b_floor))
    coeffs = twin_doc.get("lux_coeffs")
    if coeffs is not None:
        try:
            breakpoints = tuple(float(b) for b in coeffs["breakpoints"])
            segments = tuple((float(c0), float(c1)) for c0, c1 in coeffs["segments"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad lux_coeffs section: {exc}") from exc
    else:
        breakpoints, segments = base.lux_breakpoints, base.lux_segments
    twin = SensorTwin(
        channels=base.channels,
        lux_breakpoints=breakpoints,
        lux_segments=segments,
        class_bias=bias,
        noise_frac=noise,
        b_floor=b_floor,
    )
    return Scenario(duration_s=duration, step_s=step, sources=tuple(sources), twin=twin)
