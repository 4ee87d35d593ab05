"""Render an evaluation into files: summary text, CSVs, and figures.

Numeric CSV cells use the %.10g format so repeated runs with the same seeds
produce byte-identical files.  Figures are drawn straight onto an Agg canvas;
no global pyplot state is touched.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .classes import CANONICAL_ORDER
from .pipeline import EvaluationReport, SECONDS_PER_DAY

_trapz = getattr(np, "trapezoid", None) or np.trapz

__all__ = [
    "CLASSIFICATION_CSV_HEADER",
    "DAILY_ENERGY_CSV_HEADER",
    "POWER_ENERGY_CSV_HEADER",
    "report",
    "write_classification_csv",
    "write_daily_energy_csv",
    "write_power_energy_csv",
]

DAILY_ENERGY_CSV_HEADER = (
    "day",
    "lowcost_wh",
    "truth_wh",
    "abs_error_pct",
    "lowcost_stored_wh",
    "truth_stored_wh",
)

CLASSIFICATION_CSV_HEADER = (
    "timestamp_s",
    "truth_class",
    "predicted_class",
    "reconstruction_class",
    "raw_lux",
    "corrected_lux",
    "clamped",
)

POWER_ENERGY_CSV_HEADER = (
    "timestamp_s",
    "p_mpp_lowcost_w",
    "p_mpp_truth_w",
    "p_stored_lowcost_w",
    "p_stored_truth_w",
    "e_lowcost_wh",
    "e_truth_wh",
    "e_stored_lowcost_wh",
    "e_stored_truth_wh",
)


def _g(value) -> str:
    return format(float(value), ".10g")


def write_daily_energy_csv(days, path) -> None:
    lines = [",".join(DAILY_ENERGY_CSV_HEADER)]
    for d in days:
        lines.append(
            ",".join(
                [
                    str(d.day),
                    _g(d.lowcost_wh),
                    _g(d.truth_wh),
                    _g(d.error_pct),
                    _g(d.lowcost_stored_wh),
                    _g(d.truth_stored_wh),
                ]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def write_classification_csv(
    t_s, truth_ordinals, predicted, reconstruction, raw_lux, corrected_lux, clamped, path
) -> None:
    lines = [",".join(CLASSIFICATION_CSV_HEADER)]
    for i in range(len(t_s)):
        lines.append(
            ",".join(
                [
                    _g(t_s[i]),
                    CANONICAL_ORDER[int(truth_ordinals[i])].id,
                    predicted[i].id,
                    reconstruction[i].id,
                    _g(raw_lux[i]),
                    _g(corrected_lux[i]),
                    str(int(clamped[i])),
                ]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def _cumulative_wh(t_s: np.ndarray, p_w: np.ndarray) -> np.ndarray:
    if len(t_s) == 0:
        return np.zeros(0)
    steps = 0.5 * (p_w[1:] + p_w[:-1]) * np.diff(t_s) / 3600.0
    return np.concatenate(([0.0], np.cumsum(steps)))


def write_power_energy_csv(lowcost, truth, path) -> None:
    e_low = _cumulative_wh(lowcost.t_s, lowcost.p_mpp_w)
    e_truth = _cumulative_wh(truth.t_s, truth.p_mpp_w)
    e_low_st = _cumulative_wh(lowcost.t_s, lowcost.p_stored_w)
    e_truth_st = _cumulative_wh(truth.t_s, truth.p_stored_w)
    lines = [",".join(POWER_ENERGY_CSV_HEADER)]
    for i in range(len(lowcost.t_s)):
        lines.append(
            ",".join(
                [
                    _g(lowcost.t_s[i]),
                    _g(lowcost.p_mpp_w[i]),
                    _g(truth.p_mpp_w[i]),
                    _g(lowcost.p_stored_w[i]),
                    _g(truth.p_stored_w[i]),
                    _g(e_low[i]),
                    _g(e_truth[i]),
                    _g(e_low_st[i]),
                    _g(e_truth_st[i]),
                ]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def _summary_text(er: EvaluationReport) -> str:
    cfg = er.config
    n = len(er.timeline.t_s)
    step = float(er.timeline.t_s[1] - er.timeline.t_s[0]) if n > 1 else 0.0
    lines = [
        "light-harvest evaluation",
        "========================",
        f"steps: {n} at {step:.10g} s over {len(er.days)} day(s)",
        f"classifier: {cfg.method}, config {cfg.config}, "
        f"normalization {cfg.normalization or 'none'}",
        f"cross-validation accuracy: {er.cv_accuracy:.4f}",
        f"timeline accuracy: exact {er.timeline_exact_accuracy:.4f}, "
        f"family {er.timeline_family_accuracy:.4f}",
        f"harvestable energy: lowcost {er.lowcost.harvestable_wh:.6g} Wh, "
        f"truth {er.truth.harvestable_wh:.6g} Wh",
        f"stored energy: lowcost {er.lowcost.stored_wh:.6g} Wh, "
        f"truth {er.truth.stored_wh:.6g} Wh",
        f"mean daily error: {er.mean_daily_error_pct:.4g} %",
        f"cumulative error: {er.cumulative_error_pct:.4g} %",
    ]
    if er.switching is None:
        lines.append("switching: no transitions between lit sources")
    else:
        lines.append(
            f"switching: {len(er.switching.events)} transition(s), "
            f"mean outgoing fraction {er.switching.mean_ratio_pct:.4g} %"
        )
    if er.sizing is None:
        lines.append("sizing: not possible (run stored no energy)")
    else:
        lines.append(
            f"sizing: target {cfg.target_power_w:.6g} W -> "
            f"{er.sizing.area_cm2:.6g} cm2 ({er.sizing.cell_count} cell(s)); "
            f"avg stored {er.sizing.avg_stored_w:.6g} W at {er.lowcost.area_cm2:.6g} cm2"
        )
    return "\n".join(lines) + "\n"


def _day_axis(t_s: np.ndarray) -> np.ndarray:
    return np.asarray(t_s, dtype=float) / SECONDS_PER_DAY


def _figure_power(er: EvaluationReport, path: Path) -> None:
    fig = Figure(figsize=(10.0, 6.5), dpi=110)
    FigureCanvasAgg(fig)
    ax_p, ax_e = fig.subplots(2, 1, sharex=True)
    days = _day_axis(er.lowcost.t_s)
    ax_p.plot(days, er.truth.p_mpp_w * 1e3, label="truth", color="#444444", lw=0.9)
    ax_p.plot(days, er.lowcost.p_mpp_w * 1e3, label="low-cost", color="#d62728", lw=0.9, alpha=0.8)
    ax_p.set_ylabel("MPP power (mW)")
    ax_p.legend(loc="upper right", fontsize=8)
    ax_e.plot(days, _cumulative_wh(er.truth.t_s, er.truth.p_mpp_w), label="truth", color="#444444")
    ax_e.plot(days, _cumulative_wh(er.lowcost.t_s, er.lowcost.p_mpp_w), label="low-cost", color="#d62728", alpha=0.8)
    ax_e.plot(days, _cumulative_wh(er.lowcost.t_s, er.lowcost.p_stored_w), label="low-cost stored", color="#1f77b4", ls="--")
    ax_e.set_xlabel("time (days)")
    ax_e.set_ylabel("cumulative energy (Wh)")
    ax_e.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    fig.savefig(path)


def _figure_daily(er: EvaluationReport, path: Path) -> None:
    fig = Figure(figsize=(10.0, 4.5), dpi=110)
    FigureCanvasAgg(fig)
    ax = fig.subplots()
    idx = np.arange(len(er.days))
    truth = [d.truth_wh for d in er.days]
    low = [d.lowcost_wh for d in er.days]
    ax.bar(idx - 0.2, truth, width=0.4, label="truth", color="#444444")
    ax.bar(idx + 0.2, low, width=0.4, label="low-cost", color="#d62728")
    ax.set_xlabel("day")
    ax.set_ylabel("harvestable energy (Wh)")
    ax.legend(loc="upper right", fontsize=8)
    err_ax = ax.twinx()
    err_ax.plot(idx, [d.error_pct for d in er.days], color="#1f77b4", marker="o", ms=3, lw=1.0)
    err_ax.set_ylabel("daily error (%)", color="#1f77b4")
    fig.tight_layout()
    fig.savefig(path)


def _figure_timeline(er: EvaluationReport, path: Path) -> None:
    fig = Figure(figsize=(10.0, 4.5), dpi=110)
    FigureCanvasAgg(fig)
    ax = fig.subplots()
    days = _day_axis(er.timeline.t_s)
    truth = np.asarray(er.timeline.truth_class, dtype=int)
    recon = np.array([CANONICAL_ORDER.index(c) for c in er.reconstruction])
    ax.step(days, truth, where="post", color="#444444", lw=1.0, label="truth")
    ax.step(days, recon, where="post", color="#d62728", lw=0.8, alpha=0.75, label="reconstruction")
    ax.set_yticks(range(len(CANONICAL_ORDER)))
    ax.set_yticklabels([c.id for c in CANONICAL_ORDER], fontsize=7)
    ax.set_xlabel("time (days)")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path)


def report(er: EvaluationReport, out_dir) -> list[Path]:
    """Write the full report; returns the paths that were written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []

    summary = out / "summary.txt"
    summary.write_text(_summary_text(er))
    paths.append(summary)

    daily = out / "daily_energy.csv"
    write_daily_energy_csv(er.days, daily)
    paths.append(daily)

    classification = out / "classification_timeline.csv"
    write_classification_csv(
        er.timeline.t_s,
        er.timeline.truth_class,
        er.predicted,
        er.reconstruction,
        er.raw_lux,
        er.corrected_lux,
        er.clamped,
        classification,
    )
    paths.append(classification)

    power = out / "power_energy.csv"
    write_power_energy_csv(er.lowcost, er.truth, power)
    paths.append(power)

    for name, draw in (
        ("power_energy.png", _figure_power),
        ("daily_energy.png", _figure_daily),
        ("classification_timeline.png", _figure_timeline),
    ):
        target = out / name
        draw(er, target)
        paths.append(target)

    return paths
