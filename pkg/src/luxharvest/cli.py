"""Command-line surface.

Exit codes: 0 on success, 2 for input or parse problems (a missing or
malformed input file counts), 3 for numerical failures, 4 for errors
inside a pipeline stage.
"""

from __future__ import annotations

import functools
import sys
from dataclasses import replace
from pathlib import Path

import click
import numpy as np

from .classes import class_from_id, is_natural, LightClass
from .classifiers import load_model, method_by_name, predict_batch, save_model, train, METHOD_NAMES
from .defaults import init_workdir
from .errors import InputError, NumericalError, ParseError, StageError
from .evaluation import decision_surface, surface_to_csv, sweep, write_sweep_csv
from .features import (
    ALL_CONFIG_LETTERS,
    LabeledDataset,
    extract_matrix,
    feature_config,
    make_training_dataset,
)
from .pipeline import load_pipeline_config, run_pipeline
from .reconstruct import fit_natural_correction
from .report import report as write_report
from .twin import scenario_from_json, simulate_day

__all__ = ["main"]


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            fn(*args, **kwargs)
        except StageError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(4)
        except InputError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except NumericalError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(3)
        except OSError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)

    return wrapper


_NORM_CHOICES = ("none", "b", "g", "r", "bb", "ir")


def _parse_norm(norm: str) -> str | None:
    return None if norm == "none" else norm


@click.group()
@click.version_option(package_name="luxharvest")
def main() -> None:
    """Classify indoor light, reconstruct spectra, estimate PV energy."""


@main.command("generate-dataset")
@click.option("--scenario", "scenario_path", required=True, type=click.Path(), help="Scenario JSON; its twin section defines the sensor model.")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--taxonomy", default="base", show_default=True, type=click.Choice(["base", "extended"]))
@_guarded
def generate_dataset(scenario_path, out_path, seed, taxonomy) -> None:
    """Sweep the twin over the intensity ladder into a labeled dataset CSV."""
    scenario = scenario_from_json(scenario_path)
    ds = make_training_dataset(scenario.twin, taxonomy=taxonomy, seed=seed)
    ds.to_csv(out_path)
    click.echo(f"wrote {len(ds.labels)} rows to {out_path}")


@main.command("train")
@click.option("--dataset", "dataset_path", required=True, type=click.Path())
@click.option("--method", required=True, type=click.Choice(METHOD_NAMES))
@click.option("--config", "config_letter", required=True, type=click.Choice(ALL_CONFIG_LETTERS))
@click.option("--norm", default="none", show_default=True, type=click.Choice(_NORM_CHOICES))
@click.option("--out", "out_path", required=True, type=click.Path())
@_guarded
def train_cmd(dataset_path, method, config_letter, norm, out_path) -> None:
    """Train one classifier and save it as a model JSON."""
    ds = LabeledDataset.from_csv(dataset_path)
    config = feature_config(config_letter, _parse_norm(norm))
    clf = train(method_by_name(method), ds, config)
    save_model(clf, out_path)
    click.echo(f"trained {method} on {len(ds.labels)} rows -> {out_path}")


@main.command("sweep")
@click.option("--dataset", "dataset_path", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--k", default=5, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@_guarded
def sweep_cmd(dataset_path, out_path, k, seed) -> None:
    """Cross-validate every method over every valid config and normalization."""
    ds = LabeledDataset.from_csv(dataset_path)
    rep = sweep(ds, k=k, seed=seed)
    write_sweep_csv(rep, out_path)
    click.echo(
        f"swept {len(rep.cells)} cells ({rep.perfect_cells()} perfect) -> {out_path}"
    )


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path())
@click.option("--bounds", required=True, help="x0,x1,y0,y1")
@click.option("--res", default=101, show_default=True, type=int)
@click.option("--dims", default="0,1", show_default=True, help="two feature indices")
@click.option("--out", "out_path", required=True, type=click.Path())
@_guarded
def surface(model_path, bounds, res, dims, out_path) -> None:
    """Rasterize a classifier's decision surface over a 2-D feature plane."""
    clf = load_model(model_path)
    try:
        x0, x1, y0, y1 = (float(v) for v in bounds.split(","))
        di, dj = (int(v) for v in dims.split(","))
    except ValueError as exc:
        raise ParseError(f"bad --bounds/--dims: {exc}") from exc
    grid = decision_surface(clf, (x0, x1, y0, y1), res, dims=(di, dj))
    surface_to_csv(grid, out_path)
    click.echo(f"wrote {res}x{res} surface -> {out_path}")


def _read_channel_csv(path):
    """Channel matrix from any CSV that includes the six sensor columns."""
    path = Path(path)
    lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    if not lines:
        raise ParseError(f"{path}: empty file")
    header = [c.strip() for c in lines[0].split(",")]
    names = ("bb", "ir", "r", "g", "b", "lux")
    try:
        cols = [header.index(n) for n in names]
    except ValueError as exc:
        raise ParseError(f"{path}: missing channel column ({exc})") from exc
    t_col = None
    for cand in ("timestamp", "timestamp_s"):
        if cand in header:
            t_col = header.index(cand)
            break
    rows, times = [], []
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        try:
            rows.append([float(parts[c]) for c in cols])
            times.append(float(parts[t_col]) if t_col is not None else float(i - 2))
        except (ValueError, IndexError) as exc:
            raise ParseError(f"{path}:{i}: {exc}") from exc
    return np.asarray(times), np.asarray(rows).reshape(len(rows), 6)


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path())
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
@_guarded
def classify(model_path, input_path, out_path) -> None:
    """Predict a class for every row of a sensor CSV."""
    clf = load_model(model_path)
    t_s, channels = _read_channel_csv(input_path)
    if len(channels) == 0:
        raise ParseError(f"{input_path}: no data rows")
    from .classes import CANONICAL_ORDER

    ordinals = predict_batch(clf, extract_matrix(channels, clf.config))
    lines = ["timestamp_s,predicted_class"]
    lines += [
        f"{format(t_s[i], '.10g')},{CANONICAL_ORDER[int(ordinals[i])].id}"
        for i in range(len(ordinals))
    ]
    Path(out_path).write_text("\n".join(lines) + "\n")
    click.echo(f"classified {len(ordinals)} rows -> {out_path}")


@main.command("fit-lux")
@click.option("--samples", "samples_path", required=True, type=click.Path(), help="CSV with header raw_lux,reference_lux")
@click.option("--class", "class_name", required=True)
@click.option("--degree", default=2, show_default=True, type=click.Choice(["0", "1", "2"]))
@click.option("--out", "out_path", required=True, type=click.Path())
@_guarded
def fit_lux(samples_path, class_name, degree, out_path) -> None:
    """Fit a lux correction for one class from (raw, reference) samples."""
    import json

    cls = class_from_id(class_name)
    if cls is LightClass.DARK:
        raise ParseError("the dark class needs no lux correction")
    path = Path(samples_path)
    lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    if not lines or [c.strip() for c in lines[0].split(",")] != ["raw_lux", "reference_lux"]:
        raise ParseError(f"{path}: expected header 'raw_lux,reference_lux'")
    try:
        pairs = [tuple(float(v) for v in ln.split(",")) for ln in lines[1:]]
    except ValueError as exc:
        raise ParseError(f"{path}: malformed sample row ({exc})") from exc
    raw = np.array([p[0] for p in pairs])
    ref = np.array([p[1] for p in pairs])
    if is_natural(cls):
        coeffs, rms = fit_natural_correction(raw, ref, int(degree))
        doc = {
            "class": cls.id,
            "type": "poly",
            "params": list(coeffs),
            "range_lux": [float(raw.min()), float(raw.max())],
            "rms_lux": rms,
        }
    else:
        if np.any(raw <= 0.0):
            raise ParseError("constant-factor fit needs positive raw lux samples")
        factor = float(np.mean(ref / raw))
        residual = ref - factor * raw
        doc = {
            "class": cls.id,
            "type": "constant",
            "params": [factor],
            "rms_lux": float(np.sqrt(np.mean(residual**2))),
        }
    Path(out_path).write_text(json.dumps(doc, indent=2) + "\n")
    click.echo(f"fitted {doc['type']} correction for {cls.id} -> {out_path}")


@main.command()
@click.option("--pipeline", "pipeline_path", required=True, type=click.Path())
@click.option("--out-dir", "out_dir", required=True, type=click.Path())
@_guarded
def estimate(pipeline_path, out_dir) -> None:
    """Run the full pipeline and write the report files."""
    cfg = load_pipeline_config(pipeline_path)
    er = run_pipeline(cfg)
    paths = write_report(er, out_dir)
    click.echo(
        f"mean daily error {er.mean_daily_error_pct:.4g} %, "
        f"cumulative {er.cumulative_error_pct:.4g} %"
    )
    for p in paths:
        click.echo(f"wrote {p}")


@main.command()
@click.option("--scenario", "scenario_path", required=True, type=click.Path())
@click.option("--days", default=None, type=int, help="override the scenario duration")
@click.option("--seed", default=20260401, show_default=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path())
@_guarded
def simulate(scenario_path, days, seed, out_path) -> None:
    """Run the sensor twin over a scenario into a timeline CSV."""
    scenario = scenario_from_json(scenario_path)
    if days is not None:
        if days < 1:
            raise ParseError("--days must be at least 1")
        scenario = replace(scenario, duration_s=days * 86400.0)
    timeline = simulate_day(scenario, seed)
    timeline.to_csv(out_path)
    click.echo(f"simulated {len(timeline)} steps -> {out_path}")


@main.command()
@click.option("--out-dir", "out_dir", required=True, type=click.Path())
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--scenario-seed", default=20260401, show_default=True, type=int)
@_guarded
def init(out_dir, seed, scenario_seed) -> None:
    """Write bundled datasets, scenarios, converter tables, and a pipeline config."""
    paths = init_workdir(out_dir, seed=seed, scenario_seed=scenario_seed)
    for p in paths:
        click.echo(f"wrote {p}")


if __name__ == "__main__":
    main()
