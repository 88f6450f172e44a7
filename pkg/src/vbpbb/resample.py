"""Period-aligned block bootstrap and the VBPBB pipeline.

Blocks are the non-overlapping length-``P`` segments starting at the first
sample. A replicate draws ``T // P`` block indices uniformly with
replacement and concatenates the blocks in drawn order. When ``P`` does not
divide ``T`` the trailing ``T % P`` samples are left out of the pool and
each replicate is completed with the head of one extra drawn block, so every
cell keeps the phase of its source sample.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from functools import reduce

import numpy as np

from . import rng as _rng
from .errors import ConfigurationError, InsufficientReplicatesError, ParameterError
from .series import TimeSeries, write_table
from .spectral import KzftParams, PcComponent, extract_pc, sum_pc


@dataclass(frozen=True, eq=False)
class BootstrapEnsemble:
    """``B x T`` matrix of resampled series; row ``b`` is replicate ``b``."""

    replicates: np.ndarray
    block_length: int
    seed: int
    start_index: int = 1
    source: str = ""
    warnings: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        arr = np.asarray(self.replicates, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1:
            raise ParameterError(f"replicates must be a non-empty B x T matrix, got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "replicates", arr)

    @property
    def n_replicates(self) -> int:
        return self.replicates.shape[0]

    @property
    def length(self) -> int:
        return self.replicates.shape[1]

    def save(self, path) -> None:
        """Binary dump (``.npz``) carrying B, T, P and seed alongside the matrix."""
        np.savez(
            path,
            replicates=self.replicates,
            B=self.n_replicates,
            T=self.length,
            P=self.block_length,
            seed=np.uint64(self.seed),
            start_index=self.start_index,
        )

    @classmethod
    def load(cls, path) -> "BootstrapEnsemble":
        with np.load(path) as data:
            return cls(
                replicates=data["replicates"],
                block_length=int(data["P"]),
                seed=int(data["seed"]),
                start_index=int(data["start_index"]),
            )

    def to_csv(self, path) -> None:
        """Row-major CSV with a ``B,T,P,seed`` header line followed by one row per replicate."""
        rows = [[self.n_replicates, self.length, self.block_length, self.seed]]
        rows += [r.tolist() for r in self.replicates]
        write_table(path, ["B", "T", "P", "seed"], rows)


class BandMode(str, Enum):
    PERIODIC_MEAN = "periodic_mean_band"
    POINTWISE_ENSEMBLE = "pointwise_ensemble_band"


DEFAULT_BAND_MODE = BandMode.POINTWISE_ENSEMBLE


@dataclass(frozen=True, eq=False)
class BandEstimate:
    lower: TimeSeries
    center: TimeSeries
    upper: TimeSeries
    level: float
    mode: BandMode

    @property
    def width(self) -> np.ndarray:
        return self.upper.values - self.lower.values

    def to_csv(self, path) -> None:
        write_table(
            path,
            ["t", "lower", "center", "upper"],
            zip(
                self.center.times.tolist(),
                self.lower.values.tolist(),
                self.center.values.tolist(),
                self.upper.values.tolist(),
            ),
        )


def _block_pool(n: int, period: int, exclude_edges: int) -> np.ndarray:
    n_blocks = n // period
    starts = np.arange(n_blocks) * period
    keep = (starts >= exclude_edges) & (starts + period <= n - exclude_edges)
    return np.flatnonzero(keep)


def _draw_rows(
    blocks: np.ndarray, pool: np.ndarray, n_draw: int, length: int, seed: int, rows: range
) -> np.ndarray:
    out = np.empty((len(rows), length))
    for i, b in enumerate(rows):
        gen = _rng.stream(seed, _rng.BOOTSTRAP_ROW, b)
        idx = pool[gen.integers(0, pool.size, size=n_draw)]
        out[i] = blocks[idx].reshape(-1)[:length]
    return out


def pbb_resample(
    series: TimeSeries,
    period: int,
    n_boot: int,
    seed: int,
    *,
    exclude_edges: int = 0,
    workers: int = 1,
    source: str = "",
) -> BootstrapEnsemble:
    """Periodic block bootstrap of ``series`` with block length ``period``.

    Row ``b`` depends only on ``(seed, b)``, so ``workers > 1`` produces the
    same matrix as a serial run. ``exclude_edges`` drops from the pool every
    block that overlaps the first or last ``exclude_edges`` samples.
    """
    n = len(series)
    if isinstance(period, float):
        if not period.is_integer():
            raise ParameterError(f"block length must be an integer, got {period}", "block_length")
        period = int(period)
    if period < 1:
        raise ParameterError(f"block length must be >= 1, got {period}", "block_length")
    if n < period:
        raise ParameterError(f"series length {n} is shorter than block length {period}", "block_length")
    if n_boot < 1:
        raise ParameterError(f"number of replicates must be >= 1, got {n_boot}", "B")
    seed = _rng.check_seed(seed)

    n_blocks, remainder = divmod(n, period)
    notes = []
    if remainder:
        msg = (
            f"block length {period} does not divide length {n}: last {remainder} samples "
            "are excluded from the block pool"
        )
        warnings.warn(msg, stacklevel=2)
        notes.append(msg)
    pool = _block_pool(n, period, exclude_edges)
    if pool.size == 0:
        raise ParameterError(
            f"no complete block of length {period} lies outside the {exclude_edges}-sample edges",
            "block_length",
        )
    blocks = series.values[: n_blocks * period].reshape(n_blocks, period)
    n_draw = n_blocks + (1 if remainder else 0)

    workers = max(1, int(workers))
    if workers == 1 or n_boot < 2 * workers:
        reps = _draw_rows(blocks, pool, n_draw, n, seed, range(n_boot))
    else:
        edges = np.linspace(0, n_boot, workers + 1).astype(int)
        chunks = [range(a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a]
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(lambda r: _draw_rows(blocks, pool, n_draw, n, seed, r), chunks))
        reps = np.concatenate(parts, axis=0)
    return BootstrapEnsemble(
        replicates=reps,
        block_length=period,
        seed=seed,
        start_index=series.start_index,
        source=source,
        warnings=tuple(notes),
    )


def phase_index(times: np.ndarray, period: int) -> np.ndarray:
    """0-based phase ``(t - 1) mod P``; phase 0 is the first position of every cycle."""
    return (np.asarray(times) - 1) % period


def _grouped_mean(values: np.ndarray, phases: np.ndarray, period: int) -> np.ndarray:
    """Mean of the last axis grouped by phase; works on 1-D or stacked 2-D input."""
    counts = np.bincount(phases, minlength=period).astype(float)
    if values.ndim == 1:
        return np.bincount(phases, weights=values, minlength=period) / counts
    sums = np.zeros((values.shape[0], period))
    for k in range(period):
        sums[:, k] = values[:, phases == k].sum(axis=1)
    return sums / counts


def pointwise_mean(ensemble: BootstrapEnsemble) -> TimeSeries:
    return TimeSeries(ensemble.replicates.mean(axis=0), ensemble.start_index)


def ci_band(
    ensemble: BootstrapEnsemble,
    level: float = 0.95,
    mode: BandMode | str = DEFAULT_BAND_MODE,
) -> BandEstimate:
    """Empirical quantile band across replicates.

    Quantiles use linear interpolation between order statistics (Hyndman and
    Fan type 7). ``pointwise_ensemble_band`` takes them over the raw values at
    each ``t``; ``periodic_mean_band`` takes them over each replicate's
    length-``P`` periodic-mean curve and tiles the result by phase. The
    center is the replicate mean, clipped into ``[lower, upper]`` to absorb
    summation rounding on degenerate columns.
    """
    mode = BandMode(mode)
    if not 0 < level < 1:
        raise ParameterError(f"level must lie in (0, 1), got {level}", "level")
    if ensemble.n_replicates < 2:
        raise InsufficientReplicatesError(
            f"a band needs at least 2 replicates, got {ensemble.n_replicates}", "B"
        )
    probs = [(1 - level) / 2, (1 + level) / 2]
    reps = ensemble.replicates
    if mode is BandMode.POINTWISE_ENSEMBLE:
        lo, hi = np.quantile(reps, probs, axis=0, method="linear")
        center = reps.mean(axis=0)
    else:
        p = ensemble.block_length
        times = np.arange(ensemble.start_index, ensemble.start_index + ensemble.length)
        phases = phase_index(times, p)
        curves = _grouped_mean(reps, phases, p)
        lo, hi = np.quantile(curves, probs, axis=0, method="linear")
        center = curves.mean(axis=0)
        lo, hi, center = lo[phases], hi[phases], center[phases]
    center = np.clip(center, lo, hi)
    mk = lambda v: TimeSeries(v, ensemble.start_index)  # noqa: E731
    return BandEstimate(mk(lo), mk(center), mk(hi), float(level), mode)


@dataclass(frozen=True, eq=False)
class VbpbbResult:
    components: tuple[PcComponent, ...]
    pc_sum: TimeSeries
    ensemble: BootstrapEnsemble
    band: BandEstimate
    pointwise_mean: TimeSeries
    block_length: int
    notes: tuple[str, ...] = field(default=())

    @property
    def margin(self) -> int:
        return max(c.margin for c in self.components)

    def interior_mask(self) -> np.ndarray:
        n, m = len(self.pc_sum), self.margin
        i = np.arange(n)
        return (i >= m) & (i < n - m)


def resolve_block_length(targets, length: int, override: int | None = None) -> tuple[int, list[str]]:
    """Single block length for a set of targets.

    Equal rounded periods give that period. Otherwise their least common
    multiple is used if it is at most ``length / 3``; beyond that an explicit
    ``override`` is required.
    """
    if override is not None:
        return int(override), []
    periods = sorted({max(1, round(1.0 / t.frequency)) for t in targets})
    if len(periods) == 1:
        return periods[0], []
    lcm = reduce(math.lcm, periods)
    if lcm > length / 3:
        raise ConfigurationError(
            f"targets have periods {periods} whose least common multiple {lcm} exceeds "
            f"length/3 = {length / 3:g}; set an explicit block length",
            "bootstrap.block_length",
        )
    return lcm, [f"block length {lcm} is the least common multiple of periods {periods}"]


def vbpbb_run(
    observed: TimeSeries,
    targets,
    n_boot: int = 1000,
    seed: int = 0,
    level: float = 0.95,
    *,
    mode: BandMode | str = DEFAULT_BAND_MODE,
    block_length: int | None = None,
    exclude_margin: bool = False,
    workers: int = 1,
) -> VbpbbResult:
    """Extract each target with KZFT, sum the components and bootstrap the sum.

    With ``exclude_margin`` the bootstrap draws only blocks lying entirely
    outside the filter's truncated-window margin.
    """
    targets = list(targets)
    if not targets:
        raise ConfigurationError("at least one filter target is required", "filter")
    components = tuple(extract_pc(observed, t) for t in targets)
    pc_sum = sum_pc(components)
    period, notes = resolve_block_length(targets, len(observed), block_length)
    margin = max(c.margin for c in components)
    ensemble = pbb_resample(
        pc_sum,
        period,
        n_boot,
        seed,
        exclude_edges=margin if exclude_margin else 0,
        workers=workers,
        source="+".join(f"f={t.frequency:g}" for t in targets),
    )
    return VbpbbResult(
        components=components,
        pc_sum=pc_sum,
        ensemble=ensemble,
        band=ci_band(ensemble, level, mode),
        pointwise_mean=pointwise_mean(ensemble),
        block_length=period,
        notes=tuple(notes) + ensemble.warnings,
    )
