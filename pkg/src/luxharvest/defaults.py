"""Bundled assets: converter tables, harvest chain, scenarios, datasets.

Everything a pipeline run needs can be materialized into a working directory
with init_workdir(); the CLI exposes it as `luxharvest init`.
"""

from __future__ import annotations

import json
import shutil
from pathlib import Path

from .classes import (
    ARTIFICIAL_CLASSES,
    LightClass,
    NATURAL_SUBCLASSES,
)
from .features import LabeledDataset, make_training_dataset
from .pv import HarvestChain, PVConverter, load_converter, read_chain_json
from .reconstruct import ReferenceLibrary, twin_reference_library, write_library
from .twin import (
    Scenario,
    Source,
    SourceProfile,
    default_twin,
    scenario_to_json,
)

__all__ = [
    "DATA_DIR",
    "default_chain",
    "default_converter",
    "default_library",
    "default_scenario",
    "default_training_dataset",
    "init_workdir",
    "office_scenario",
    "switching_scenario",
]

DATA_DIR = Path(__file__).parent / "data"

# Classes the bundled reference library covers: everything a classifier can
# output, except Dark.
_LIBRARY_CLASSES = tuple(ARTIFICIAL_CLASSES) + (
    LightClass.NLTW_CLEAR,
    LightClass.NLTW_CLOUDY,
) + tuple(NATURAL_SUBCLASSES)


def _h(hours: float) -> float:
    return hours * 3600.0


def default_converter(area_cm2: float = 1.0) -> PVConverter:
    return load_converter(
        DATA_DIR / "gaas_eqe.csv",
        DATA_DIR / "gaas_dark_jv.csv",
        area_cm2=area_cm2,
        name="gaas_synthetic",
    )


def default_chain() -> HarvestChain:
    return read_chain_json(DATA_DIR / "default_chain.json")


def default_training_dataset(
    taxonomy: str = "base", seed: int = 0, noise_frac: float = 0.01
) -> LabeledDataset:
    return make_training_dataset(default_twin(noise_frac), taxonomy=taxonomy, seed=seed)


def default_library(noise_frac: float = 0.01) -> ReferenceLibrary:
    return twin_reference_library(default_twin(noise_frac), _LIBRARY_CLASSES)


# Per-day midday peaks for the 16-day scenario; kept below the strong-daylight
# threshold so the daylight reference stays the right reconstruction target.
_DAYLIGHT_PEAKS = [
    1300.0, 900.0, 1100.0, 600.0, 1350.0, 1000.0, 800.0, 1200.0,
    500.0, 1300.0, 950.0, 700.0, 1250.0, 1050.0, 850.0, 1150.0,
]


def default_scenario(days: int = 16, noise_frac: float = 0.01) -> Scenario:
    """Mixed natural + LED home scenario, one lighting pattern per day."""
    if days < 1:
        raise ValueError("scenario needs at least one day")
    sources = (
        Source(
            LightClass.SUNRISE,
            SourceProfile(
                "bell",
                {
                    "peak_lux": 140.0,
                    "center_s": _h(6.5),
                    "sigma_s": 1500.0,
                    "start_s": _h(5.0),
                    "end_s": _h(8.0),
                },
            ),
        ),
        Source(
            LightClass.DAYLIGHT,
            SourceProfile(
                "bell",
                {
                    "peak_lux": list(_DAYLIGHT_PEAKS),
                    "center_s": _h(12.5),
                    "sigma_s": 9360.0,
                    "start_s": _h(5.5),
                    "end_s": _h(19.5),
                },
            ),
        ),
        Source(
            LightClass.SUNSET,
            SourceProfile(
                "bell",
                {
                    "peak_lux": 120.0,
                    "center_s": _h(18.5),
                    "sigma_s": 1500.0,
                    "start_s": _h(17.0),
                    "end_s": _h(20.0),
                },
            ),
        ),
        Source(
            LightClass.LED_3000K,
            SourceProfile("schedule", {"entries": [[_h(19.5), _h(23.0), 220.0]]}),
        ),
    )
    return Scenario(
        duration_s=days * 86400.0,
        step_s=60.0,
        sources=sources,
        twin=default_twin(noise_frac),
    )


def switching_scenario(noise_frac: float = 0.01) -> Scenario:
    """One working day where daylight overtakes a constant LED and recedes."""
    sources = (
        Source(
            LightClass.LED_3000K,
            SourceProfile(
                "constant", {"lux": 260.0, "start_s": _h(7.0), "end_s": _h(19.0)}
            ),
        ),
        Source(
            LightClass.DAYLIGHT,
            SourceProfile(
                "bell",
                {
                    "peak_lux": 700.0,
                    "center_s": _h(12.5),
                    "sigma_s": 7200.0,
                    "start_s": _h(7.0),
                    "end_s": _h(19.0),
                },
            ),
        ),
    )
    return Scenario(
        duration_s=86400.0, step_s=60.0, sources=sources, twin=default_twin(noise_frac)
    )


def office_scenario(noise_frac: float = 0.01) -> Scenario:
    """Bright office: window daylight plus ceiling LEDs over working hours."""
    sources = (
        Source(
            LightClass.DAYLIGHT,
            SourceProfile(
                "bell",
                {
                    "peak_lux": 300.0,
                    "center_s": _h(12.5),
                    "sigma_s": 7920.0,
                    "start_s": _h(8.0),
                    "end_s": _h(18.0),
                },
            ),
        ),
        Source(
            LightClass.LED_4000K,
            SourceProfile(
                "constant", {"lux": 190.0, "start_s": _h(8.0), "end_s": _h(18.0)}
            ),
        ),
    )
    return Scenario(
        duration_s=86400.0, step_s=60.0, sources=sources, twin=default_twin(noise_frac)
    )


def init_workdir(out_dir, seed: int = 0, scenario_seed: int = 20260401) -> list[Path]:
    """Materialize every default asset plus a ready-to-run pipeline config."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    for name in ("gaas_eqe.csv", "gaas_dark_jv.csv", "default_chain.json"):
        target = out / name
        shutil.copyfile(DATA_DIR / name, target)
        written.append(target)

    for name, scenario in (
        ("scenario_16day.json", default_scenario()),
        ("scenario_switching.json", switching_scenario()),
        ("scenario_office.json", office_scenario()),
    ):
        target = out / name
        scenario_to_json(scenario, target)
        written.append(target)

    base = out / "dataset_base.csv"
    default_training_dataset("base", seed=seed).to_csv(base)
    written.append(base)
    extended = out / "dataset_extended.csv"
    default_training_dataset("extended", seed=seed).to_csv(extended)
    written.append(extended)

    lib_dir = out / "library"
    manifest = lib_dir / "manifest.json"
    write_library(default_library(), manifest)
    written.append(manifest)

    pipeline = out / "pipeline.json"
    pipeline.write_text(
        json.dumps(
            {
                "dataset_csv": "dataset_base.csv",
                "extended_dataset_csv": "dataset_extended.csv",
                "library_manifest": "library/manifest.json",
                "converter": {
                    "eqe_csv": "gaas_eqe.csv",
                    "dark_jv_csv": "gaas_dark_jv.csv",
                    "area_cm2": 1.0,
                    "name": "gaas_synthetic",
                },
                "chain_json": "default_chain.json",
                "scenario_json": "scenario_16day.json",
                "classifier": {
                    "method": "weighted_knn",
                    "config": "R",
                    "normalization": "b",
                },
                "seeds": {"scenario": scenario_seed, "dataset": seed},
                "target_power_w": 0.01,
            },
            indent=2,
        )
        + "\n"
    )
    written.append(pipeline)
    return written
