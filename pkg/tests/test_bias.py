import numpy as np
import pytest

from conftest import random_instance
from oracles import group_by_phase_mean
from vbpbb.bias import (
    CorrectionMode,
    bias,
    bias_report,
    correct,
    ensemble_means,
    overall_mean,
    periodic_mean,
    phase_counts,
)
from vbpbb.errors import ShapeError
from vbpbb.resample import BootstrapEnsemble, ci_band, pbb_resample
from vbpbb.series import TimeSeries
from vbpbb.simulate import PAPER_COMPONENT, ScenarioConfig, build_scenario, generate_signal, preset

from conftest import PAPER_TARGET
from vbpbb.resample import vbpbb_run

# Table 1 rows: (VBPBB overall mean, reference mean, reported bias)
TABLE1_ORIGINAL_TRUE = (-0.000505, 0.0, -0.000505)
TABLE1_EVENT_ESTIMATED = (-0.001340, -0.001288, -0.000052)


def test_overall_mean_examples():
    assert abs(overall_mean(generate_signal([PAPER_COMPONENT], 2500))) <= 1e-12
    assert overall_mean(TimeSeries(np.full(17, -2.5))) == -2.5
    obs = build_scenario(preset("original", 8)).observed
    assert overall_mean(obs) == pytest.approx(np.sum(obs.values.tolist()) / 2500, abs=1e-12)


def test_periodic_mean_examples():
    cycle = np.array([1.0, -2.0, 0.5, 4.0])
    s = TimeSeries(np.tile(cycle, 6))
    assert np.array_equal(periodic_mean(s, 4), cycle)
    paper = generate_signal([PAPER_COMPONENT], 2500)
    assert np.all(phase_counts(paper, 25) == 100)
    r = TimeSeries(np.random.default_rng(2).normal(size=103))
    expected, counts = group_by_phase_mean(r.values, 10)
    np.testing.assert_allclose(periodic_mean(r, 10), expected, rtol=0, atol=1e-12)
    assert counts.tolist() == [11, 11, 11] + [10] * 7
    assert phase_counts(r, 10).tolist() == counts.tolist()


def test_periodic_mean_uses_absolute_phase():
    s = TimeSeries([10.0, 20.0, 30.0, 40.0], start_index=2)  # t=2..5, P=2: phase 2 gets t=2,4
    assert periodic_mean(s, 2).tolist() == [30.0, 20.0]


def test_ensemble_means_examples():
    row = np.random.default_rng(4).normal(size=12)
    em = ensemble_means(BootstrapEnsemble(np.tile(row, (5, 1)), 3, 0), 3)
    assert em.overall == pytest.approx(overall_mean(TimeSeries(row)), abs=1e-14)
    np.testing.assert_allclose(em.pointwise.values, row, atol=1e-15)
    np.testing.assert_allclose(em.periodic, periodic_mean(TimeSeries(row), 3), atol=1e-15)

    em2 = ensemble_means(BootstrapEnsemble([[1.0] * 4, [3.0] * 4], 2, 0))
    assert em2.overall == 2.0
    assert em2.pointwise.values.tolist() == [2.0] * 4
    assert em2.periodic.tolist() == [2.0, 2.0]


def test_ensemble_overall_equals_mean_of_pointwise(paper_runs):
    _, result, _ = paper_runs["original"]
    em = ensemble_means(result.ensemble)
    # different reduction order: exact sum of column means
    alt = np.sum(np.sort(em.pointwise.values)) / em.pointwise.values.size
    assert em.overall == pytest.approx(alt, abs=1e-12)


def test_bias_examples():
    assert bias(1.25, 1.25) == 0.0
    s = TimeSeries([1.0, 2.0])
    assert np.all(bias(s, s).values == 0)
    v, ref, reported = TABLE1_ORIGINAL_TRUE
    assert bias(v, ref) == pytest.approx(reported, abs=1e-12)
    v, ref, reported = TABLE1_EVENT_ESTIMATED
    assert bias(v, ref) == pytest.approx(reported, abs=1e-12)
    with pytest.raises(ShapeError):
        bias(np.zeros(3), np.zeros(4))
    with pytest.raises(ShapeError):
        bias(s, TimeSeries([1.0, 2.0, 3.0]))


def test_correct_examples():
    s = TimeSeries([1.0, 1.0, 1.0, 1.0])
    assert correct(s, 0.0, "global").equals(s)
    out = correct(s, [0.1, -0.1], "periodic")
    np.testing.assert_allclose(out.values, [0.9, 1.1, 0.9, 1.1])
    np.testing.assert_allclose(correct(s, [1, 2, 3, 4], "pointwise").values, [0, -1, -2, -3])
    with pytest.raises(ShapeError):
        correct(s, [0.1, 0.2], "global")
    with pytest.raises(ShapeError):
        correct(s, [0.1, 0.2], "pointwise")
    with pytest.raises(ShapeError):
        correct(s, 0.3, "periodic")


def test_band_correction_preserves_width():
    ens = pbb_resample(TimeSeries(np.random.default_rng(1).normal(size=50)), 5, 30, 2)
    band = ci_band(ens, 0.9)
    shifted = correct(band, np.linspace(-1, 1, 5), CorrectionMode.PERIODIC)
    np.testing.assert_allclose(shifted.width, band.width, atol=1e-14)
    assert shifted.mode is band.mode and shifted.level == band.level


def test_global_correction_zeroes_estimated_bias(paper_runs):
    _, result, report = paper_runs["original"]
    corrected = correct(result.pointwise_mean, report.overall.estimated_bias, "global")
    assert abs(bias(overall_mean(corrected), report.overall.sample_mean)) <= 1e-10


def test_report_with_identical_references():
    data = build_scenario(preset("original", 4))
    result = vbpbb_run(data.observed, [PAPER_TARGET], 50, 4)
    rep = bias_report(data, result, true_reference=result.pc_sum)
    assert rep.overall.true_bias == rep.overall.estimated_bias
    np.testing.assert_array_equal(rep.periodic_true, rep.periodic_sample)
    assert rep.metadata["true_reference"] == "custom"


def test_noiseless_report_is_small():
    data = build_scenario(ScenarioConfig(2500, (PAPER_COMPONENT,), name="clean"))
    result = vbpbb_run(data.observed, [PAPER_TARGET], 1000, 1)
    rep = bias_report(data, result)
    o = rep.overall
    assert max(abs(o.true_bias), abs(o.estimated_bias)) <= 1e-2
    for arr in (rep.pointwise_true.values, rep.pointwise_sample.values, rep.periodic_true, rep.periodic_sample):
        assert np.abs(arr).max() <= 1e-2


def test_paper_table1_magnitudes(paper_runs):
    for name, (_, _, rep) in paper_runs.items():
        assert abs(rep.overall.true_mean) <= 1e-12  # standardized to the bare sine
        assert 1e-7 <= abs(rep.overall.estimated_bias) <= 1e-3
        assert rep.metadata["periodic_normalization"] == "1/(N_k*B)"


def test_event_and_trend_use_original_truth(paper_runs):
    orig = paper_runs["original"][0]
    for name in ("event", "trend"):
        data, result, rep = paper_runs[name]
        np.testing.assert_array_equal(
            rep.periodic_true, ensemble_means(result.ensemble).periodic - periodic_mean(orig.truth, 25)
        )


def _check_identities(data, result, rep):
    o = rep.overall
    p = rep.period
    assert o.true_bias == pytest.approx(o.vbpbb_mean - o.true_mean, abs=1e-12)
    assert o.estimated_bias == pytest.approx(o.vbpbb_mean - o.sample_mean, abs=1e-12)
    assert o.true_bias - o.estimated_bias == pytest.approx(o.sample_mean - o.true_mean, abs=1e-12)
    # aggregation consistency
    assert rep.pointwise_true.values.mean() == pytest.approx(o.true_bias, abs=1e-10)
    assert rep.pointwise_sample.values.mean() == pytest.approx(o.estimated_bias, abs=1e-10)
    if len(data.observed) % p == 0:
        assert rep.periodic_true.mean() == pytest.approx(o.true_bias, abs=1e-10)
        assert rep.periodic_sample.mean() == pytest.approx(o.estimated_bias, abs=1e-10)
    pw_by_phase, _ = group_by_phase_mean(rep.pointwise_true.values, p)
    np.testing.assert_allclose(rep.periodic_true, pw_by_phase, rtol=0, atol=1e-10)
    pw_by_phase, _ = group_by_phase_mean(rep.pointwise_sample.values, p)
    np.testing.assert_allclose(rep.periodic_sample, pw_by_phase, rtol=0, atol=1e-10)
    # correction idempotence and linearity, each mode
    em = ensemble_means(result.ensemble, p)
    truth = data.base_truth
    g = correct(em.pointwise, o.true_bias, "global")
    assert abs(overall_mean(g) - o.true_mean) <= 1e-10
    twice = correct(g, o.true_bias, "global")
    assert overall_mean(twice) - o.true_mean == pytest.approx(-o.true_bias, abs=1e-10)
    pw = correct(em.pointwise, rep.pointwise_true, "pointwise")
    np.testing.assert_allclose(bias(pw, truth).values, 0.0, atol=1e-10)
    np.testing.assert_allclose(
        bias(correct(pw, rep.pointwise_true, "pointwise"), truth).values, -rep.pointwise_true.values, atol=1e-10
    )
    per = correct(em.pointwise, rep.periodic_sample, "periodic")
    np.testing.assert_allclose(
        periodic_mean(per, p) - periodic_mean(result.pc_sum, p), 0.0, atol=1e-10
    )


@pytest.mark.parametrize("seed", range(25))
def test_identities_random(seed):
    _check_identities(*random_instance(seed))


@pytest.mark.parametrize("name", ["original", "event", "trend"])
def test_identities_presets(paper_runs, name):
    _check_identities(*paper_runs[name])


def test_report_csvs(paper_runs, tmp_path):
    rep = paper_runs["event"][2]
    rep.to_table1_csv(tmp_path / "t.csv")
    rep.to_periodic_csv(tmp_path / "p.csv")
    rep.to_pointwise_csv(tmp_path / "w.csv")
    t = (tmp_path / "t.csv").read_text().splitlines()
    assert t[0].split(",") == [
        "scenario", "true_overall_mean", "sample_overall_mean", "vbpbb_overall_mean",
        "true_overall_mean_bias", "estimated_overall_mean_bias",
    ]
    assert t[1].startswith("event,") and float(t[1].split(",")[5]) == rep.overall.estimated_bias
    p = (tmp_path / "p.csv").read_text().splitlines()
    assert p[0] == "k,true_ref_bias,sample_ref_bias" and len(p) == 26
    assert len((tmp_path / "w.csv").read_text().splitlines()) == 2501
