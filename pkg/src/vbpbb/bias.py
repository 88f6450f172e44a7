"""Overall, pointwise and periodic mean bias, and the matching corrections.

All reductions use numpy's pairwise summation. Phases follow absolute time:
position ``k`` (1-based) collects every ``t`` with ``(t - 1) mod P == k - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ParameterError, ShapeError
from .resample import BandEstimate, BootstrapEnsemble, VbpbbResult, _grouped_mean, phase_index
from .series import TimeSeries, write_table
from .simulate import ScenarioData

PERIODIC_NORMALIZATION = "1/(N_k*B)"

TABLE1_COLUMNS = (
    "scenario",
    "true_overall_mean",
    "sample_overall_mean",
    "vbpbb_overall_mean",
    "true_overall_mean_bias",
    "estimated_overall_mean_bias",
)


def overall_mean(series: TimeSeries) -> float:
    return float(series.values.mean())


def phase_counts(series: TimeSeries, period: int) -> np.ndarray:
    """``N_k`` for ``k = 1..P``."""
    return np.bincount(phase_index(series.times, period), minlength=period)


def periodic_mean(series: TimeSeries, period: int) -> np.ndarray:
    """Mean of the values at each cycle position; entry ``k-1`` is position ``k``."""
    period = int(period)
    if period < 1:
        raise ParameterError(f"period must be >= 1, got {period}", "period")
    if len(series) < period:
        raise ParameterError(f"series length {len(series)} is shorter than period {period}", "period")
    return _grouped_mean(series.values, phase_index(series.times, period), period)


@dataclass(frozen=True, eq=False)
class EnsembleMeans:
    overall: float
    pointwise: TimeSeries
    periodic: np.ndarray


def ensemble_means(ensemble: BootstrapEnsemble, period: int | None = None) -> EnsembleMeans:
    """Grand, per-time and per-position means of a bootstrap ensemble.

    The periodic entry for position ``k`` averages all ``N_k * B`` cells in
    that position, so a constant ensemble maps to the same constant.
    """
    period = int(period or ensemble.block_length)
    reps = ensemble.replicates
    times = np.arange(ensemble.start_index, ensemble.start_index + ensemble.length)
    phases = phase_index(times, period)
    counts = np.bincount(phases, minlength=period)
    col_sums = reps.sum(axis=0)
    periodic = np.bincount(phases, weights=col_sums, minlength=period) / (counts * reps.shape[0])
    return EnsembleMeans(
        overall=float(reps.mean()),
        pointwise=TimeSeries(reps.mean(axis=0), ensemble.start_index),
        periodic=periodic,
    )


def _as_array(x):
    if isinstance(x, TimeSeries):
        return x.values
    return np.asarray(x, dtype=float)


def bias(estimate, reference):
    """``estimate - reference`` for scalars, series or periodic vectors."""
    if np.isscalar(estimate) and np.isscalar(reference):
        return float(estimate) - float(reference)
    if isinstance(estimate, TimeSeries) and isinstance(reference, TimeSeries):
        estimate.check_aligned(reference, "estimate and reference")
        return estimate.with_values(estimate.values - reference.values)
    e, r = _as_array(estimate), _as_array(reference)
    if e.shape != r.shape:
        raise ShapeError(f"estimate shape {e.shape} does not match reference shape {r.shape}")
    out = e - r
    return out if out.ndim else float(out)


class CorrectionMode(str, Enum):
    GLOBAL = "global"
    POINTWISE = "pointwise"
    PERIODIC = "periodic"


def _offset_for(times: np.ndarray, bias_value, mode: CorrectionMode) -> np.ndarray | float:
    if mode is CorrectionMode.GLOBAL:
        b = np.asarray(bias_value, dtype=float)
        if b.ndim != 0:
            raise ShapeError("global correction takes a scalar bias", "bias")
        return float(b)
    b = _as_array(bias_value)
    if b.ndim != 1:
        raise ShapeError(f"{mode.value} correction takes a 1-D bias, got shape {b.shape}", "bias")
    if mode is CorrectionMode.POINTWISE:
        if b.size != times.size:
            raise ShapeError(f"pointwise bias has length {b.size}, series has {times.size}", "bias")
        return b
    return b[phase_index(times, b.size)]


def correct(estimate, bias_value, mode: CorrectionMode | str = CorrectionMode.GLOBAL):
    """Subtract a bias from a series or from every edge of a band.

    ``global`` takes a scalar, ``pointwise`` a length-``T`` vector and
    ``periodic`` a length-``P`` vector tiled across time by cycle position.
    Bands are shifted as a whole, so their width is unchanged.
    """
    mode = CorrectionMode(mode)
    if isinstance(estimate, BandEstimate):
        off = _offset_for(estimate.center.times, bias_value, mode)
        shift = lambda s: s.with_values(s.values - off)  # noqa: E731
        return BandEstimate(
            shift(estimate.lower), shift(estimate.center), shift(estimate.upper),
            estimate.level, estimate.mode,
        )
    if isinstance(estimate, TimeSeries):
        off = _offset_for(estimate.times, bias_value, mode)
        return estimate.with_values(estimate.values - off)
    raise TypeError(f"cannot correct object of type {type(estimate).__name__}")


@dataclass(frozen=True)
class OverallBias:
    true_mean: float
    sample_mean: float
    vbpbb_mean: float
    true_bias: float
    estimated_bias: float


@dataclass(frozen=True, eq=False)
class BiasReport:
    scenario: str
    overall: OverallBias
    pointwise_true: TimeSeries
    pointwise_sample: TimeSeries
    periodic_true: np.ndarray
    periodic_sample: np.ndarray
    period: int
    n_boot: int
    metadata: dict = field(default_factory=dict)

    def table1_row(self) -> list:
        o = self.overall
        return [self.scenario, o.true_mean, o.sample_mean, o.vbpbb_mean, o.true_bias, o.estimated_bias]

    def to_table1_csv(self, path) -> None:
        write_table(path, TABLE1_COLUMNS, [self.table1_row()])

    def to_periodic_csv(self, path) -> None:
        write_table(
            path,
            ["k", "true_ref_bias", "sample_ref_bias"],
            zip(range(1, self.period + 1), self.periodic_true.tolist(), self.periodic_sample.tolist()),
        )

    def to_pointwise_csv(self, path) -> None:
        write_table(
            path,
            ["t", "true_ref_bias", "sample_ref_bias"],
            zip(
                self.pointwise_true.times.tolist(),
                self.pointwise_true.values.tolist(),
                self.pointwise_sample.values.tolist(),
            ),
        )


def bias_report(
    scenario: ScenarioData,
    result: VbpbbResult,
    true_reference: TimeSeries | None = None,
) -> BiasReport:
    """Both reference variants of every bias metric for one pipeline run.

    The true reference defaults to the scenario's bare sine signal, so event
    and trend scenarios are scored against the unmodified periodic truth.
    The sample reference is the summed PC component.
    """
    truth = true_reference if true_reference is not None else scenario.base_truth
    sample = result.pc_sum
    truth.check_aligned(sample, "true reference and PC sum")
    p = result.block_length
    em = ensemble_means(result.ensemble, p)

    true_mean = overall_mean(truth)
    sample_mean = overall_mean(sample)
    overall = OverallBias(
        true_mean=true_mean,
        sample_mean=sample_mean,
        vbpbb_mean=em.overall,
        true_bias=bias(em.overall, true_mean),
        estimated_bias=bias(em.overall, sample_mean),
    )
    return BiasReport(
        scenario=scenario.config.name,
        overall=overall,
        pointwise_true=bias(em.pointwise, truth),
        pointwise_sample=bias(em.pointwise, sample),
        periodic_true=bias(em.periodic, periodic_mean(truth, p)),
        periodic_sample=bias(em.periodic, periodic_mean(sample, p)),
        period=p,
        n_boot=result.ensemble.n_replicates,
        metadata={
            "seed": result.ensemble.seed,
            "filters": [
                {"frequency": c.params.frequency, "window": c.params.window, "iterations": c.params.iterations}
                for c in result.components
            ],
            "periodic_normalization": PERIODIC_NORMALIZATION,
            "true_reference": "base_truth" if true_reference is None else "custom",
        },
    )
