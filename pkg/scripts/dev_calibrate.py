"""Dev-only calibration sweep: measures every tuned behavior of the twin.

Run after touching twin constants, scenario shapes, or correction ranges.
Prints one line per check with the measured numbers.
"""

from __future__ import annotations

import time

import numpy as np

from luxharvest.classes import (
    ARTIFICIAL_CLASSES,
    BASE_TAXONOMY,
    LightClass,
    NATURAL_SUBCLASSES,
)
from luxharvest.defaults import (
    default_scenario,
    default_training_dataset,
    office_scenario,
    switching_scenario,
)
from luxharvest.evaluation import cross_validate, sweep
from luxharvest.features import extract, feature_config, normalized_difference as nd
from luxharvest.pipeline import PipelineConfig, run_pipeline
from luxharvest.reconstruct import correct_lux, fit_twin_corrections
from luxharvest.twin import default_twin, reference_spd, sense, SensorTwin


def check(name: str, ok: bool, detail: str) -> None:
    print(f"{'PASS' if ok else 'FAIL':4}  {name}: {detail}")


def noiseless(twin: SensorTwin) -> SensorTwin:
    return SensorTwin(
        channels=twin.channels,
        lux_breakpoints=twin.lux_breakpoints,
        lux_segments=twin.lux_segments,
        class_bias=twin.class_bias,
        noise_frac=0.0,
        b_floor=twin.b_floor,
    )


def main() -> None:
    twin = noiseless(default_twin())

    # 1. lux self-calibration: every reference class reads exactly true lux
    worst = 0.0
    for cls in BASE_TAXONOMY + NATURAL_SUBCLASSES:
        if cls is LightClass.DARK:
            continue
        for lux in (10.0, 100.0, 1000.0, 5000.0):
            ps = sense(reference_spd(cls, lux), twin)
            worst = max(worst, abs(ps.lux - lux) / lux)
    check("lux exactness", worst < 1e-9, f"worst rel err {worst:.3e}")

    # 2. generator separability: best channel-pair nd gap per class pair >= 0.05
    classes = [c for c in BASE_TAXONOMY if c is not LightClass.DARK]
    counts = {c: twin.counts(reference_spd(c, 1000.0)) for c in classes}
    pairs = [(i, j) for i in range(5) for j in range(5) if i < j]
    min_gap = np.inf
    worst_pair = None
    for a in classes:
        for b in classes:
            if a.id >= b.id:
                continue
            gap = max(
                abs(nd(counts[a][i], counts[a][j]) - nd(counts[b][i], counts[b][j]))
                for i, j in pairs
            )
            if gap < min_gap:
                min_gap, worst_pair = gap, (a.id, b.id)
    check("nd separability", min_gap >= 0.05, f"min best-pair gap {min_gap:.3f} at {worst_pair}")

    # 3. config R (nd(ir, b)) spread across base classes
    cfg_r = feature_config("R", "b")
    vals = {c.id: extract(sense(reference_spd(c, 1000.0), twin), cfg_r).values[0] for c in classes}
    ordered = sorted(vals.items(), key=lambda kv: kv[1])
    gaps = [round(b[1] - a[1], 4) for a, b in zip(ordered, ordered[1:])]
    print(f"      config R values: {[(k, round(v, 3)) for k, v in ordered]}")
    check("config R spread", min(gaps) > 0.02, f"adjacent gaps {gaps}")

    # 4. fine_knn / blue / config I CV == 1.0 on the default dataset
    ds = default_training_dataset()
    t0 = time.time()
    res = cross_validate("fine_knn", ds, feature_config("I", "b"), k=5, seed=0)
    check("fineknn/I/b CV", res.accuracy == 1.0, f"accuracy {res.accuracy:.4f} ({time.time()-t0:.2f}s)")

    # 5. full sweep: perfect-cell counts raw vs blue, runtime
    t0 = time.time()
    rep = sweep(ds, normalizations=(None, "b"), k=5, seed=0)
    dt = time.time() - t0
    raw_perfect = rep.perfect_cells(None)
    blue_perfect = rep.perfect_cells("b")
    check(
        "sweep blue > raw",
        blue_perfect > raw_perfect,
        f"raw {raw_perfect}, blue {blue_perfect}, cells {len(rep.cells)}, {dt:.1f}s",
    )

    # 6. degree-2 corrections: error reduction per natural sub-class, artificial < 1%
    artificial = tuple(sorted(ARTIFICIAL_CLASSES, key=lambda c: c.id))
    corr = fit_twin_corrections(default_twin(), artificial + NATURAL_SUBCLASSES)
    for cls in NATURAL_SUBCLASSES:
        lo, hi = {
            LightClass.SUNRISE: (5.0, 600.0),
            LightClass.SUNSET: (5.0, 600.0),
            LightClass.DAYLIGHT: (20.0, 1500.0),
            LightClass.STRONG_DAYLIGHT: (1500.0, 8000.0),
        }[cls]
        true = np.linspace(lo, hi, 40)
        raw = np.array([sense(reference_spd(cls, L), twin, truth_class=cls, true_lux=L).lux for L in true])
        before = np.mean(np.abs(raw - true))
        after = np.mean(np.abs([correct_lux(r, cls, corr) - t for r, t in zip(raw, true)]))
        ratio = before / after if after > 0 else np.inf
        check(f"poly2 {cls.id}", ratio >= 5.0, f"before {before:.2f} lx, after {after:.2f} lx, ratio {ratio:.1f}x")
    for cls in artificial:
        true = np.linspace(50.0, 1600.0, 20)
        raw = np.array([sense(reference_spd(cls, L), twin, truth_class=cls, true_lux=L).lux for L in true])
        after = np.mean(np.abs([correct_lux(r, cls, corr) - t for r, t in zip(raw, true)]) / true)
        check(f"const {cls.id}", after < 0.01, f"mean rel err {after*100:.4f}%")

    # 7. switching-day pipeline: mean ratio in [40, 60]
    import json
    import tempfile
    from pathlib import Path

    from luxharvest.defaults import init_workdir

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        paths = init_workdir(tmp)
        cfg_doc = json.loads((tmp / "pipeline.json").read_text())

        cfg_doc["scenario_json"] = "scenario_switching.json"
        (tmp / "pipeline_sw.json").write_text(json.dumps(cfg_doc))
        from luxharvest.pipeline import load_pipeline_config

        t0 = time.time()
        er = run_pipeline(load_pipeline_config(tmp / "pipeline_sw.json"))
        dt = time.time() - t0
        sw = er.switching
        ok = sw is not None and 40.0 <= sw.mean_ratio_pct <= 60.0
        detail = "no transitions" if sw is None else (
            f"mean {sw.mean_ratio_pct:.1f}% over {len(sw.events)} events, {dt:.1f}s"
        )
        check("switching ratio", ok, detail)
        if sw is not None:
            print(f"      events: {[(e.from_family, e.to_family, round(e.outgoing_fraction_pct, 1)) for e in sw.events]}")

        # 8. 16-day scenario: daily + cumulative error, runtime
        t0 = time.time()
        er16 = run_pipeline(load_pipeline_config(tmp / "pipeline.json"))
        dt = time.time() - t0
        check(
            "16-day errors",
            er16.mean_daily_error_pct < 5.0 and er16.cumulative_error_pct < 5.0,
            f"daily {er16.mean_daily_error_pct:.2f}%, cumulative {er16.cumulative_error_pct:.2f}%, {dt:.0f}s",
        )
        print(f"      exact acc {er16.timeline_exact_accuracy:.3f}, family acc {er16.timeline_family_accuracy:.3f}, cv {er16.cv_accuracy:.3f}")
        worst_days = sorted(er16.days, key=lambda d: -d.error_pct)[:4]
        print(f"      worst days: {[(d.day, round(d.error_pct, 2)) for d in worst_days]}")

        # 9. office sizing: 10 mW target in [100, 1000] cm^2
        cfg_doc["scenario_json"] = "scenario_office.json"
        (tmp / "pipeline_office.json").write_text(json.dumps(cfg_doc))
        er_off = run_pipeline(load_pipeline_config(tmp / "pipeline_office.json"))
        area = er_off.sizing.area_cm2
        check(
            "office sizing",
            100.0 <= area <= 1000.0,
            f"area {area:.0f} cm^2, avg stored {er_off.sizing.avg_stored_w*1e6:.1f} uW/cm^2",
        )


if __name__ == "__main__":
    main()
