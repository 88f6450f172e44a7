"""Run orchestration: scenario -> KZFT -> bootstrap -> bias, with artifact files and a manifest."""

from __future__ import annotations

import json
import logging
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import plotting
from .bias import TABLE1_COLUMNS, BiasReport, bias_report
from .config import AutoFilter, RunConfig
from .errors import ParameterError
from .resample import VbpbbResult, vbpbb_run
from .series import TimeSeries, atomic_write_text, read_series_csv, read_table, write_series_csv, write_table
from .simulate import ScenarioData, build_scenario
from .spectral import KzftParams, PeriodCandidate, default_window, detect_periods, periodogram

log = logging.getLogger(__name__)

MANIFEST = "manifest.json"


@dataclass
class ArtifactWriter:
    """Writes files under ``root`` and remembers each one for the manifest."""

    root: Path
    artifacts: list[dict] = field(default_factory=list)

    def path(self, name: str, kind: str) -> Path:
        self.artifacts.append({"name": name, "kind": kind})
        return self.root / name

    def manifest(self, **info) -> Path:
        doc = dict(info, artifacts=self.artifacts)
        return atomic_write_text(self.root / MANIFEST, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def auto_targets(observed: TimeSeries, auto: AutoFilter) -> tuple[list[KzftParams], list[PeriodCandidate]]:
    """Filter targets from the periodogram peaks.

    With ``auto.periods`` given, each detected frequency is snapped to the
    nearest supplied period so the filter runs at exactly ``1/P``.
    """
    cands = detect_periods(periodogram(observed), auto.top_n)
    targets = []
    for c in cands:
        period = c.period
        if auto.periods:
            period = float(min(auto.periods, key=lambda p: abs(1.0 / p - c.frequency)))
        params = KzftParams(1.0 / period, default_window(period, auto.window_factor), auto.iterations)
        if params not in targets:
            targets.append(params)
    return targets, cands


def resolve_targets(cfg: RunConfig, observed: TimeSeries) -> list[KzftParams]:
    if isinstance(cfg.filter, AutoFilter):
        targets, _ = auto_targets(observed, cfg.filter)
    else:
        targets = list(cfg.filter)
    for i, t in enumerate(targets):
        if t.support > len(observed):
            raise ParameterError(
                f"filter support k*(m-1)+1 = {t.support} exceeds series length {len(observed)}",
                f"filter[{i}].window",
            )
    return targets


def write_scenario(w: ArtifactWriter, data: ScenarioData) -> None:
    write_series_csv(w.path("truth.csv", "series"), data.truth)
    write_series_csv(w.path("observed.csv", "series"), data.observed)
    write_series_csv(w.path("base_truth.csv", "series"), data.base_truth)


def _ensemble_summary(w: ArtifactWriter, result: VbpbbResult) -> None:
    reps = result.ensemble.replicates
    sd = reps.std(axis=0, ddof=1) if reps.shape[0] > 1 else np.zeros(reps.shape[1])
    write_table(
        w.path("ensemble_summary.csv", "ensemble"),
        ["t", "mean", "sd", "min", "max"],
        zip(
            result.pc_sum.times.tolist(),
            reps.mean(axis=0).tolist(),
            sd.tolist(),
            reps.min(axis=0).tolist(),
            reps.max(axis=0).tolist(),
        ),
    )


def _window_artifacts(w: ArtifactWriter, data: ScenarioData, result: VbpbbResult, window, formats) -> None:
    times = data.truth.times
    lo, hi = plotting.check_window(window, int(times[0]), times.size)
    a, b = window
    band = result.band
    sl = slice(lo, hi)
    write_table(
        w.path(f"band_{a}-{b}.csv", "band_window"),
        ["t", "lower", "center", "upper"],
        zip(
            times[sl].tolist(),
            band.lower.values[sl].tolist(),
            band.center.values[sl].tolist(),
            band.upper.values[sl].tolist(),
        ),
    )
    if "svg" in formats:
        svg = plotting.timeseries_svg(
            times,
            data.observed.values,
            data.truth.values,
            band.lower.values,
            band.upper.values,
            band.center.values,
            window=window,
            title=f"VBPBB {int(band.level * 100)}% band, {data.config.name}, t={a}..{b}",
        )
        plotting.write_svg(w.path(f"timeseries_{a}-{b}.svg", "plot"), svg)


def write_report(w: ArtifactWriter, report: BiasReport) -> None:
    report.to_table1_csv(w.path("bias_overall.csv", "bias"))
    report.to_periodic_csv(w.path("bias_periodic.csv", "bias"))
    report.to_pointwise_csv(w.path("bias_pointwise.csv", "bias"))


def run_pipeline(cfg: RunConfig, out_dir=None, workers: int = 1) -> tuple[Path, BiasReport]:
    """Execute a full run and write every artifact plus ``manifest.json``."""
    root = Path(out_dir if out_dir is not None else cfg.output.directory)
    root.mkdir(parents=True, exist_ok=True)
    w = ArtifactWriter(root)

    data = build_scenario(cfg.scenario)
    for window in cfg.output.plot_windows:
        plotting.check_window(window, data.observed.start_index, len(data.observed))
    targets = resolve_targets(cfg, data.observed)
    bs = cfg.bootstrap
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        result = vbpbb_run(
            data.observed,
            targets,
            bs.n_boot,
            cfg.seed,
            bs.level,
            mode=bs.mode,
            block_length=bs.block_length,
            exclude_margin=bs.exclude_margin,
            workers=workers,
        )
    report = bias_report(data, result)

    write_scenario(w, data)
    periodogram(data.observed).to_csv(w.path("spectrum.csv", "spectrum"))
    for i, comp in enumerate(result.components):
        comp.to_csv(w.path(f"pc_component_{i + 1}.csv", "pc"))
    write_series_csv(w.path("pc_sum.csv", "pc"), result.pc_sum)
    result.band.to_csv(w.path("band.csv", "band"))
    _ensemble_summary(w, result)
    write_report(w, report)
    if cfg.output.dump_ensemble:
        result.ensemble.save(w.path("ensemble.npz", "ensemble"))
    for window in cfg.output.plot_windows:
        _window_artifacts(w, data, result, window, cfg.output.formats)
    if "svg" in cfg.output.formats:
        svg = plotting.bias_svg(
            {"true reference": report.periodic_true, "sample reference": report.periodic_sample},
            title=f"Bias per period, {data.config.name}",
        )
        plotting.write_svg(w.path("bias_periodic.svg", "plot"), svg)

    notes = list(result.notes) + sorted({str(c.message) for c in caught} - set(result.notes))
    manifest = w.manifest(
        scenario=data.config.name,
        T=len(data.observed),
        P=result.block_length,
        B=bs.n_boot,
        seed=cfg.seed,
        noise_seed=cfg.scenario.seed,
        band_mode=result.band.mode.value,
        level=bs.level,
        margin=result.margin,
        targets=[{"frequency": t.frequency, "window": t.window, "iterations": t.iterations} for t in targets],
        event_window="closed interval" if cfg.scenario.event is not None else None,
        periodic_normalization=report.metadata["periodic_normalization"],
        config=cfg.document,
        notes=notes,
    )
    log.info("wrote %d artifacts to %s", len(w.artifacts), root)
    return manifest, report


def simulate_only(cfg: RunConfig, out_dir) -> Path:
    w = ArtifactWriter(Path(out_dir))
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    data = build_scenario(cfg.scenario)
    write_scenario(w, data)
    return w.manifest(
        scenario=data.config.name, T=len(data.observed), seed=cfg.scenario.seed, config=cfg.document
    )


def analyze_series(series: TimeSeries, out_dir, top_n: int = 3) -> Path:
    w = ArtifactWriter(Path(out_dir))
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    spec = periodogram(series)
    spec.to_csv(w.path("spectrum.csv", "spectrum"))
    cands = detect_periods(spec, top_n)
    write_table(
        w.path("periods.csv", "periods"),
        ["rank", "frequency", "period", "power", "degenerate"],
        [[i + 1, c.frequency, c.period, c.power, int(c.degenerate)] for i, c in enumerate(cands)],
    )
    return w.manifest(T=len(series), top_n=top_n)


def load_manifest(path) -> tuple[dict, Path]:
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST
    return json.loads(path.read_text()), path.parent


def _artifact(manifest: dict, root: Path, name: str) -> Path:
    if not any(a["name"] == name for a in manifest["artifacts"]):
        raise FileNotFoundError(f"artifact {name} not listed in manifest under {root}")
    return root / name


def compare_scenarios(manifest_paths, out_path=None) -> tuple[list[list], list[str]]:
    """One Table-1 row per manifest, in the order given; duplicates are kept.

    Columns: scenario, true_overall_mean, sample_overall_mean,
    vbpbb_overall_mean, true_overall_mean_bias, estimated_overall_mean_bias.
    """
    rows, shapes, notes = [], set(), []
    for mp in manifest_paths:
        manifest, root = load_manifest(mp)
        header, body = read_table(_artifact(manifest, root, "bias_overall.csv"))
        for r in body:
            rows.append([r[0]] + [float(v) for v in r[1:]])
        shapes.add((manifest.get("T"), manifest.get("P")))
    if len(shapes) > 1:
        msg = f"manifests are not directly comparable: (T, P) values {sorted(shapes)}"
        warnings.warn(msg, stacklevel=2)
        notes.append(msg)
    if out_path is not None:
        write_table(out_path, TABLE1_COLUMNS, rows)
    return rows, notes


def emit_plots(manifest_paths, out_dir, windows=(), fmt: str = "svg") -> list[Path]:
    """Figures from stored run artifacts.

    Each manifest gets a time-domain band plot per window. With more than one
    manifest, combined per-period bias plots for both references are added.
    """
    if fmt != "svg":
        raise ParameterError(f"unsupported plot format {fmt!r}", "format")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    curves_true, curves_sample = {}, {}
    for mp in manifest_paths:
        manifest, root = load_manifest(mp)
        name = manifest.get("scenario", root.name)
        truth = read_series_csv(_artifact(manifest, root, "truth.csv"))
        observed = read_series_csv(_artifact(manifest, root, "observed.csv"))
        header, body = read_table(_artifact(manifest, root, "band.csv"))
        band = np.array([[float(v) for v in r[1:]] for r in body])
        for window in windows or [(int(truth.times[0]), int(truth.times[-1]))]:
            svg = plotting.timeseries_svg(
                truth.times, observed.values, truth.values, band[:, 0], band[:, 2], band[:, 1],
                window=window, title=f"VBPBB band, {name}, t={window[0]}..{window[1]}",
            )
            written.append(plotting.write_svg(out / f"{name}_timeseries_{window[0]}-{window[1]}.svg", svg))
        _, pb = read_table(_artifact(manifest, root, "bias_periodic.csv"))
        label = name
        while label in curves_true:
            label += "'"
        curves_true[label] = np.array([float(r[1]) for r in pb])
        curves_sample[label] = np.array([float(r[2]) for r in pb])
    if len(curves_true) > 1:
        written.append(plotting.write_svg(
            out / "bias_periodic_true.svg",
            plotting.bias_svg(curves_true, "Bias per period, true periodic mean reference"),
        ))
        written.append(plotting.write_svg(
            out / "bias_periodic_sample.svg",
            plotting.bias_svg(curves_sample, "Bias per period, sample periodic mean reference"),
        ))
    return written
