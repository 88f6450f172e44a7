import json
import warnings
from pathlib import Path

import numpy as np
import pytest

from vbpbb import config
from vbpbb.cli import main
from vbpbb.pipeline import compare_scenarios, emit_plots, load_manifest

SMALL = {"B": 60, "level": 0.95}


def _write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc, indent=2))
    return p


def _run(tmp_path, doc, out, *extra):
    return main(["run", "--config", str(_write(tmp_path, doc)), "--out", str(out), *extra])


def _small_preset(name, seed=5):
    doc = config.preset_document(name, seed)
    doc["bootstrap"] = dict(SMALL)
    return doc


def _csvs(d: Path):
    return {p.name: p.read_bytes() for p in sorted(d.glob("*.csv"))}


def test_preset_expansion_matches_paper():
    cfg = config.parse(config.preset_document("event"))
    sc = cfg.scenario
    assert sc.length == 2500 and sc.components[0].amplitude == 0.8 and sc.components[0].period == 25
    assert sc.components[0].phase == 100
    assert (sc.event.start, sc.event.end, sc.event.shift) == (1500, 1600, -4)
    (c1, d1), (c2, d2) = sc.noise.terms
    assert (c1, d1.mean, d1.sd) == (0.5, 0, 3)
    assert (c2, d2.shape, d2.scale, d2.offset) == (0.5, 2, 5, -10)
    [t] = cfg.filter
    assert (t.frequency, t.window, t.iterations) == (1 / 25, 251, 1)
    assert cfg.bootstrap.n_boot == 1000 and cfg.bootstrap.level == 0.95
    assert config.parse(config.preset_document("trend")).scenario.trend.slope == 0.001


def test_schema_error_names_field(tmp_path, capsys):
    doc = _small_preset("original")
    doc["bootstrap"]["B"] = 0
    assert _run(tmp_path, doc, tmp_path / "o") == 2
    assert "bootstrap.B" in capsys.readouterr().err


def test_json_syntax_error_reports_line(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "scenario": "original",\n  oops\n}')
    assert main(["run", "--config", str(p), "--out", str(tmp_path / "o")]) == 2
    assert "bad.json:3:" in capsys.readouterr().err


def test_unknown_field_rejected(tmp_path, capsys):
    doc = _small_preset("original")
    doc["bootstrap"]["replicates"] = 5
    assert _run(tmp_path, doc, tmp_path / "o") == 2
    assert "bootstrap" in capsys.readouterr().err


def test_window_longer_than_series_exit_3(tmp_path, capsys):
    doc = _small_preset("original")
    doc["filter"] = [{"period": 25, "window": 2501}]
    assert _run(tmp_path, doc, tmp_path / "o") == 3
    assert "filter[0].window" in capsys.readouterr().err


def test_event_outside_series_exit_3(tmp_path, capsys):
    doc = _small_preset("original")
    doc["scenario"] = config.expand(doc)["scenario"]
    doc["scenario"]["event"] = {"start": 2400, "end": 2600, "shift": -4}
    assert _run(tmp_path, doc, tmp_path / "o") == 3
    assert "event" in capsys.readouterr().err


def test_run_manifest_and_determinism(tmp_path):
    doc = _small_preset("original")
    a, b = tmp_path / "a", tmp_path / "b"
    assert _run(tmp_path, doc, a) == 0
    assert _run(tmp_path, doc, b, "--threads", "3") == 0
    manifest, root = load_manifest(a)
    names = {x["name"] for x in manifest["artifacts"]}
    assert len(names) >= 6
    on_disk = {p.name for p in a.iterdir()} - {"manifest.json"}
    assert names == on_disk
    assert {"truth.csv", "observed.csv", "pc_component_1.csv", "pc_sum.csv", "band.csv",
            "ensemble_summary.csv", "bias_overall.csv", "bias_periodic.csv"} <= names
    assert _csvs(a) == _csvs(b)
    assert manifest["seed"] == 5 and manifest["config"]["bootstrap"]["B"] == 60
    assert manifest["band_mode"] == "pointwise_ensemble_band"


def test_preset_flag_equals_explicit_config(tmp_path):
    explicit = config.expand(config.preset_document("trend", 9))
    explicit["bootstrap"]["B"] = 40
    preset_doc = {"scenario": "trend", "seed": 9, "bootstrap": {"B": 40}, "output": {"plot_windows": [[1, 1000]]}}
    assert _run(tmp_path, explicit, tmp_path / "x") == 0
    assert _run(tmp_path, preset_doc, tmp_path / "y") == 0
    assert _csvs(tmp_path / "x") == _csvs(tmp_path / "y")


def test_event_window_artifacts(tmp_path):
    doc = _small_preset("event")
    assert doc["output"]["plot_windows"] == [[1000, 2000]]
    out = tmp_path / "ev"
    assert _run(tmp_path, doc, out) == 0
    lines = (out / "band_1000-2000.csv").read_text().splitlines()
    assert lines[0] == "t,lower,center,upper"
    assert lines[1].startswith("1000,") and lines[-1].startswith("2000,") and len(lines) == 1002
    svg = (out / "timeseries_1000-2000.svg").read_text()
    assert svg.startswith("<svg") and "polygon" in svg


def test_plot_window_out_of_range(tmp_path, capsys):
    doc = _small_preset("original")
    doc["output"]["plot_windows"] = [[2000, 2600]]
    assert _run(tmp_path, doc, tmp_path / "o") == 3


def test_report_and_plot_verbs(tmp_path):
    runs = []
    for name in ("original", "event", "trend"):
        out = tmp_path / name
        assert _run(tmp_path, _small_preset(name), out) == 0
        runs.append(str(out))
    table = tmp_path / "table1.csv"
    assert main(["report", *runs, "--out", str(table)]) == 0
    lines = table.read_text().splitlines()
    assert len(lines) == 4 and [l.split(",")[0] for l in lines[1:]] == ["original", "event", "trend"]
    for line in lines[1:]:
        assert abs(float(line.split(",")[5])) < 1e-3

    figs = tmp_path / "figs"
    assert main(["plot", *runs, "--window", "1", "1000", "--out", str(figs)]) == 0
    bias_plot = (figs / "bias_periodic_true.svg").read_text()
    assert bias_plot.count("<polyline") == 4  # zero line plus three scenarios
    for name in ("original", "event", "trend"):
        assert name in bias_plot
        assert (figs / f"{name}_timeseries_1-1000.svg").stat().st_size > 0
    assert (figs / "bias_periodic_sample.svg").exists()


def test_report_duplicates_and_single(tmp_path):
    out = tmp_path / "o"
    assert _run(tmp_path, _small_preset("original"), out) == 0
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        rows, notes = compare_scenarios([out])
    assert len(rows) == 1 and not notes
    rows, _ = compare_scenarios([out, out])
    assert rows[0] == rows[1]


def test_report_mismatch_warns(tmp_path):
    a = tmp_path / "a"
    assert _run(tmp_path, _small_preset("original"), a) == 0
    doc = _small_preset("original")
    doc["scenario"] = config.expand(doc)["scenario"]
    doc["scenario"]["length"] = 1000
    doc["output"]["plot_windows"] = []
    b = tmp_path / "b"
    assert _run(tmp_path, doc, b) == 0
    with pytest.warns(UserWarning, match="not directly comparable"):
        rows, notes = compare_scenarios([a, b])
    assert len(rows) == 2 and notes


def test_simulate_and_analyze_verbs(tmp_path):
    sim = tmp_path / "sim"
    assert main(["simulate", "--preset", "original", "--seed", "3", "--out", str(sim)]) == 0
    assert (sim / "observed.csv").exists() and (sim / "truth.csv").exists()
    an = tmp_path / "an"
    assert main(["analyze", "--input", str(sim / "observed.csv"), "--top-n", "3", "--out", str(an)]) == 0
    periods = (an / "periods.csv").read_text().splitlines()
    assert periods[0] == "rank,frequency,period,power,degenerate" and len(periods) == 4
    spec = (an / "spectrum.csv").read_text().splitlines()
    assert spec[0] == "frequency,period,power" and len(spec) == 1251


def test_auto_filter_snaps_to_supplied_period(tmp_path):
    doc = _small_preset("original")
    doc["filter"] = {"auto": {"top_n": 1, "periods": [25]}}
    out = tmp_path / "auto"
    assert _run(tmp_path, doc, out) == 0
    manifest, _ = load_manifest(out)
    assert manifest["targets"] == [{"frequency": 0.04, "window": 251, "iterations": 1}]


def test_dump_ensemble(tmp_path):
    doc = _small_preset("original")
    doc["output"]["dump_ensemble"] = True
    out = tmp_path / "d"
    assert _run(tmp_path, doc, out) == 0
    with np.load(out / "ensemble.npz") as z:
        assert z["replicates"].shape == (60, 2500) and int(z["P"]) == 25


def test_emit_plots_rejects_bad_window(tmp_path):
    out = tmp_path / "o"
    assert _run(tmp_path, _small_preset("original"), out) == 0
    from vbpbb.errors import RangeError

    with pytest.raises(RangeError):
        emit_plots([out], tmp_path / "f", [(0, 100)])


def test_shipped_configs_validate():
    root = Path(__file__).resolve().parent.parent / "configs"
    for path in root.glob("*.json"):
        cfg = config.parse(config.load_document(path))
        assert cfg.bootstrap.n_boot >= 1
