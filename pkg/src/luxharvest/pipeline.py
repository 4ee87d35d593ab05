"""End-to-end pipeline: simulate, classify, correct, reconstruct, estimate.

Two estimation paths run side by side.  The low-cost path sees only sensor
readings: classify each step, refine natural classes, correct the lux value,
reconstruct a spectrum, and feed it to the PV model.  The truth path consumes
only the scenario's source weights, never the sensor channels, so the error
between the two measures the whole sensing-and-reconstruction chain.
"""

from __future__ import annotations

import json
import math
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .classes import CANONICAL_ORDER, LightClass, is_natural
from .classifiers import TrainedClassifier, predict_batch, train, method_by_name
from .errors import (
    CannotSize,
    ConfigError,
    EmptyResult,
    InputError,
    LuxHarvestError,
    NumericalError,
    ParseError,
    StageError,
)
from .evaluation import cross_validate
from .features import (
    LabeledDataset,
    config_is_valid,
    extract_matrix,
    feature_config,
    make_training_dataset,
)
from .pv import (
    EnergyEstimate,
    HarvestChain,
    PVConverter,
    SizingRecommendation,
    estimate_energy,
    load_converter,
    read_chain_json,
    recommend_area,
)
from .reconstruct import (
    ReferenceLibrary,
    _apply_subclass_rule,
    correct_lux_detailed,
    read_library,
    reconstruct,
)
from .twin import Timeline, scenario_from_json, simulate_day

_trapz = getattr(np, "trapezoid", None) or np.trapz

__all__ = [
    "DEFAULT_CLASSIFIER",
    "DayEnergy",
    "EvaluationReport",
    "PipelineConfig",
    "SwitchEvent",
    "SwitchingSummary",
    "class_family",
    "daily_energy_wh",
    "load_pipeline_config",
    "run_pipeline",
    "switching_ratio",
]

SECONDS_PER_DAY = 86400.0

# method, config letter, normalization of the default classification cell
DEFAULT_CLASSIFIER = ("weighted_knn", "R", "b")


@dataclass(frozen=True)
class PipelineConfig:
    dataset_csv: Path
    library_manifest: Path
    eqe_csv: Path
    dark_jv_csv: Path
    chain_json: Path
    scenario_json: Path
    method: str = DEFAULT_CLASSIFIER[0]
    config: str = DEFAULT_CLASSIFIER[1]
    normalization: str | None = DEFAULT_CLASSIFIER[2]
    area_cm2: float = 1.0
    converter_name: str = "gaas_synthetic"
    target_power_w: float = 0.01
    scenario_seed: int = 20260401
    dataset_seed: int = 0
    extended_dataset_csv: Path | None = None

    def __post_init__(self):
        method_by_name(self.method)
        if not config_is_valid(self.config, self.normalization):
            raise ConfigError(
                f"config {self.config} is not valid under normalization "
                f"{self.normalization or 'none'}"
            )
        if self.area_cm2 <= 0.0:
            raise ConfigError("area_cm2 must be positive")
        if self.target_power_w <= 0.0:
            raise ConfigError("target_power_w must be positive")


def load_pipeline_config(path) -> PipelineConfig:
    """Parse a pipeline JSON file; relative paths resolve beside the file."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid pipeline JSON ({exc})") from exc
    base = path.parent

    def resolve(value) -> Path:
        p = Path(value)
        return p if p.is_absolute() else base / p

    try:
        converter = doc["converter"]
        classifier = doc.get("classifier", {})
        seeds = doc.get("seeds", {})
        norm = classifier.get("normalization", DEFAULT_CLASSIFIER[2])
        if norm in ("none", ""):
            norm = None
        extended = doc.get("extended_dataset_csv")
        return PipelineConfig(
            dataset_csv=resolve(doc["dataset_csv"]),
            library_manifest=resolve(doc["library_manifest"]),
            eqe_csv=resolve(converter["eqe_csv"]),
            dark_jv_csv=resolve(converter["dark_jv_csv"]),
            chain_json=resolve(doc["chain_json"]),
            scenario_json=resolve(doc["scenario_json"]),
            method=classifier.get("method", DEFAULT_CLASSIFIER[0]),
            config=classifier.get("config", DEFAULT_CLASSIFIER[1]),
            normalization=norm,
            area_cm2=float(converter.get("area_cm2", 1.0)),
            converter_name=converter.get("name", "gaas_synthetic"),
            target_power_w=float(doc.get("target_power_w", 0.01)),
            scenario_seed=int(seeds.get("scenario", 20260401)),
            dataset_seed=int(seeds.get("dataset", 0)),
            extended_dataset_csv=resolve(extended) if extended else None,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: bad pipeline config ({exc})") from exc


def class_family(cls: LightClass) -> str:
    """Grouping used for switching analysis: naturals form one family."""
    return "natural" if is_natural(cls) else cls.id


@dataclass(frozen=True)
class SwitchEvent:
    t_s: float
    from_family: str
    to_family: str
    outgoing_fraction_pct: float


@dataclass(frozen=True)
class SwitchingSummary:
    events: tuple[SwitchEvent, ...]

    @property
    def mean_ratio_pct(self) -> float:
        return float(np.mean([e.outgoing_fraction_pct for e in self.events]))


def switching_ratio(timeline: Timeline, predicted: Sequence[LightClass]) -> SwitchingSummary:
    """Outgoing source family's irradiance share at each recognized switch."""
    n = len(timeline.t_s)
    if len(predicted) != n:
        raise ValueError("predicted classes must match timeline length")
    families = [class_family(c) for c in predicted]
    source_families = [class_family(c) for c in timeline.source_classes]
    events = []
    for i in range(1, n):
        prev, cur = families[i - 1], families[i]
        if cur == prev or prev == LightClass.DARK.id or cur == LightClass.DARK.id:
            continue
        outgoing = sum(
            float(timeline.fractions[i, j])
            for j, fam in enumerate(source_families)
            if fam == prev
        )
        events.append(SwitchEvent(float(timeline.t_s[i]), prev, cur, 100.0 * outgoing))
    if not events:
        raise EmptyResult("timeline contains no transitions between lit sources")
    return SwitchingSummary(tuple(events))


def daily_energy_wh(t_s: np.ndarray, p_w: np.ndarray, day_s: float = SECONDS_PER_DAY) -> np.ndarray:
    """Trapezoidal energy per calendar day, interpolating day boundaries."""
    t = np.asarray(t_s, dtype=float)
    p = np.asarray(p_w, dtype=float)
    n_days = max(1, math.ceil(float(t[-1]) / day_s - 1e-12))
    out = np.zeros(n_days)
    for d in range(n_days):
        lo = max(d * day_s, float(t[0]))
        hi = min((d + 1) * day_s, float(t[-1]))
        if hi <= lo:
            continue
        inside = (t > lo) & (t < hi)
        ts = np.concatenate(([lo], t[inside], [hi]))
        ps = np.concatenate(
            ([np.interp(lo, t, p)], p[inside], [np.interp(hi, t, p)])
        )
        out[d] = float(_trapz(ps, ts)) / 3600.0
    return out


def _error_pct(estimate: float, truth: float) -> float:
    if truth == 0.0:
        return 0.0 if estimate == 0.0 else float("inf")
    return 100.0 * abs(estimate - truth) / truth


@dataclass(frozen=True)
class DayEnergy:
    day: int
    lowcost_wh: float
    truth_wh: float
    error_pct: float
    lowcost_stored_wh: float
    truth_stored_wh: float


@dataclass(eq=False)
class EvaluationReport:
    config: PipelineConfig
    timeline: Timeline
    predicted: tuple[LightClass, ...]
    reconstruction: tuple[LightClass, ...]
    raw_lux: np.ndarray
    corrected_lux: np.ndarray
    clamped: np.ndarray
    lowcost: EnergyEstimate
    truth: EnergyEstimate
    days: tuple[DayEnergy, ...]
    mean_daily_error_pct: float
    cumulative_error_pct: float
    switching: SwitchingSummary | None
    sizing: SizingRecommendation | None
    cv_accuracy: float
    timeline_exact_accuracy: float
    timeline_family_accuracy: float


@contextmanager
def _stage(name: str):
    try:
        yield
    except StageError:
        raise
    except (InputError, NumericalError) as exc:
        raise type(exc)(f"{name}: {exc}") from exc
    except LuxHarvestError as exc:
        raise StageError(name, str(exc)) from exc
    except OSError as exc:
        raise StageError(name, str(exc)) from exc


def _classify_timeline(
    timeline: Timeline,
    clf: TrainedClassifier,
    subclf: TrainedClassifier,
    library: ReferenceLibrary,
):
    """Predicted base class, reconstruction class, and corrected lux per step."""
    base_preds = [
        CANONICAL_ORDER[int(o)]
        for o in predict_batch(clf, extract_matrix(timeline.channels, clf.config))
    ]
    sub_preds = [
        CANONICAL_ORDER[int(o)]
        for o in predict_batch(subclf, extract_matrix(timeline.channels, subclf.config))
    ]
    n = len(base_preds)
    recon: list[LightClass] = []
    corrected = np.zeros(n)
    clamped = np.zeros(n, dtype=bool)
    raw_lux = timeline.channels[:, 5]
    for i in range(n):
        cls = base_preds[i]
        if cls is LightClass.DARK:
            recon.append(LightClass.DARK)
            continue
        if is_natural(cls):
            cls = _apply_subclass_rule(sub_preds[i], float(raw_lux[i]), library.correction)
        lux, flag = correct_lux_detailed(float(raw_lux[i]), cls, library.correction)
        recon.append(cls)
        corrected[i] = lux
        clamped[i] = flag
    return tuple(base_preds), tuple(recon), corrected, clamped


def _lowcost_spd_stream(timeline, recon, corrected, library):
    for i in range(len(recon)):
        yield float(timeline.t_s[i]), reconstruct(recon[i], float(corrected[i]), library)


def _truth_spd_stream(timeline):
    # Consumes only scenario weights and reference spectra, never channels.
    for i in range(len(timeline.t_s)):
        yield float(timeline.t_s[i]), timeline.truth_spd(i)


def truth_energy_estimate(
    timeline: Timeline, converter: PVConverter, chain: HarvestChain
) -> EnergyEstimate:
    return estimate_energy(_truth_spd_stream(timeline), converter, chain, source="truth")


def lowcost_energy_estimate(
    timeline: Timeline,
    clf: TrainedClassifier,
    subclf: TrainedClassifier,
    library: ReferenceLibrary,
    converter: PVConverter,
    chain: HarvestChain,
) -> EnergyEstimate:
    _, recon, corrected, _ = _classify_timeline(timeline, clf, subclf, library)
    return estimate_energy(
        _lowcost_spd_stream(timeline, recon, corrected, library),
        converter,
        chain,
        source="lowcost",
    )


def run_pipeline(cfg: PipelineConfig) -> EvaluationReport:
    with _stage("load"):
        dataset = LabeledDataset.from_csv(cfg.dataset_csv)
        library = read_library(cfg.library_manifest)
        converter = load_converter(
            cfg.eqe_csv, cfg.dark_jv_csv, area_cm2=cfg.area_cm2, name=cfg.converter_name
        )
        chain = read_chain_json(cfg.chain_json)
        scenario = scenario_from_json(cfg.scenario_json)

    with _stage("train"):
        config = feature_config(cfg.config, cfg.normalization)
        method = method_by_name(cfg.method)
        clf = train(method, dataset, config)
        if cfg.extended_dataset_csv is not None:
            extended = LabeledDataset.from_csv(cfg.extended_dataset_csv)
        else:
            extended = make_training_dataset(
                scenario.twin, taxonomy="extended", seed=cfg.dataset_seed
            )
        subclf = train(method, extended, config)
        cv_accuracy = cross_validate(
            method, dataset, config, k=5, seed=cfg.dataset_seed
        ).accuracy

    with _stage("simulate"):
        timeline = simulate_day(scenario, cfg.scenario_seed)

    with _stage("classify"):
        predicted, recon, corrected, clamped = _classify_timeline(
            timeline, clf, subclf, library
        )

    with _stage("estimate"):
        lowcost = estimate_energy(
            _lowcost_spd_stream(timeline, recon, corrected, library),
            converter,
            chain,
            source="lowcost",
        )
        truth = truth_energy_estimate(timeline, converter, chain)

    with _stage("evaluate"):
        low_daily = daily_energy_wh(lowcost.t_s, lowcost.p_mpp_w)
        truth_daily = daily_energy_wh(truth.t_s, truth.p_mpp_w)
        low_stored = daily_energy_wh(lowcost.t_s, lowcost.p_stored_w)
        truth_stored = daily_energy_wh(truth.t_s, truth.p_stored_w)
        days = tuple(
            DayEnergy(
                day=d,
                lowcost_wh=float(low_daily[d]),
                truth_wh=float(truth_daily[d]),
                error_pct=_error_pct(float(low_daily[d]), float(truth_daily[d])),
                lowcost_stored_wh=float(low_stored[d]),
                truth_stored_wh=float(truth_stored[d]),
            )
            for d in range(len(low_daily))
        )
        mean_daily = float(np.mean([d.error_pct for d in days])) if days else 0.0
        cumulative = _error_pct(lowcost.harvestable_wh, truth.harvestable_wh)
        try:
            switching = switching_ratio(timeline, recon)
        except EmptyResult:
            switching = None
        try:
            sizing = recommend_area(cfg.target_power_w, lowcost)
        except CannotSize:
            # an all-dark run stores nothing; the report is still valid
            sizing = None
        truth_classes = [
            CANONICAL_ORDER[int(o)] for o in np.asarray(timeline.truth_class)
        ]
        exact = float(
            np.mean([recon[i] is truth_classes[i] for i in range(len(recon))])
        )
        family = float(
            np.mean(
                [
                    class_family(recon[i]) == class_family(truth_classes[i])
                    for i in range(len(recon))
                ]
            )
        )

    return EvaluationReport(
        config=cfg,
        timeline=timeline,
        predicted=predicted,
        reconstruction=recon,
        raw_lux=np.asarray(timeline.channels[:, 5], dtype=float),
        corrected_lux=corrected,
        clamped=clamped,
        lowcost=lowcost,
        truth=truth,
        days=days,
        mean_daily_error_pct=mean_daily,
        cumulative_error_pct=cumulative,
        switching=switching,
        sizing=sizing,
        cv_accuracy=cv_accuracy,
        timeline_exact_accuracy=exact,
        timeline_family_accuracy=family,
    )
