"""Periodogram period detection and KZFT bandpass extraction of periodic components."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ShapeError
from .series import TimeSeries, write_table


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Periodogram at the Fourier frequencies ``j/T``, ``j = 1..T//2``.

    Power is ``|sum_t (y_t - mean) exp(-2 pi i j t / T)|**2 / T`` so that the
    powers sum to ``T * var(y)`` (population variance) over the full
    two-sided set of frequencies.
    """

    frequencies: np.ndarray
    powers: np.ndarray
    series_length: int

    @property
    def periods(self) -> np.ndarray:
        return 1.0 / self.frequencies

    def to_csv(self, path) -> None:
        write_table(
            path,
            ["frequency", "period", "power"],
            zip(self.frequencies.tolist(), self.periods.tolist(), self.powers.tolist()),
        )


@dataclass(frozen=True)
class PeriodCandidate:
    frequency: float
    period: float
    power: float

    @property
    def degenerate(self) -> bool:
        """True when the bin carries no power, i.e. nothing was actually detected."""
        return self.power <= 0.0


def periodogram(series: TimeSeries) -> Spectrum:
    n = len(series)
    if n < 4:
        raise ParameterError(f"periodogram needs at least 4 points, got {n}", "length")
    y = series.values - series.values.mean()
    coef = np.fft.rfft(y)
    j = np.arange(1, n // 2 + 1)
    power = np.abs(coef[j]) ** 2 / n
    return Spectrum(frequencies=j / n, powers=power, series_length=n)


def detect_periods(spectrum: Spectrum, top_n: int = 1) -> list[PeriodCandidate]:
    """Strongest ``top_n`` bins, by descending power; ties go to the lower frequency."""
    if not 1 <= top_n <= spectrum.frequencies.size:
        raise ParameterError(
            f"top_n must lie in [1, {spectrum.frequencies.size}], got {top_n}", "top_n"
        )
    order = np.lexsort((spectrum.frequencies, -spectrum.powers))[:top_n]
    return [
        PeriodCandidate(
            float(spectrum.frequencies[i]),
            float(1.0 / spectrum.frequencies[i]),
            float(spectrum.powers[i]),
        )
        for i in order
    ]


def round_to_odd(x: float) -> int:
    """Nearest odd integer to ``x`` (ties go up)."""
    return 2 * math.floor((x - 1) / 2 + 0.5) + 1


def default_window(period: float, factor: int = 10) -> int:
    """``factor * period + 1`` rounded to odd, e.g. 251 for a period of 25."""
    return max(3, round_to_odd(factor * period + 1))


@dataclass(frozen=True)
class KzftParams:
    """Target frequency ``f`` (cycles/sample), odd window ``m`` and iteration count ``k``."""

    frequency: float
    window: int
    iterations: int = 1

    def __post_init__(self) -> None:
        f = float(self.frequency)
        if not (math.isfinite(f) and 0 < f <= 0.5):
            raise ParameterError(f"frequency must lie in (0, 0.5], got {f}", "frequency")
        if self.window < 3 or self.window % 2 == 0:
            raise ParameterError(f"window must be an odd integer >= 3, got {self.window}", "window")
        if self.iterations < 1:
            raise ParameterError(f"iterations must be >= 1, got {self.iterations}", "iterations")

    @classmethod
    def for_period(cls, period: float, window: int | None = None, iterations: int = 1) -> "KzftParams":
        return cls(1.0 / period, window if window is not None else default_window(period), iterations)

    @property
    def period(self) -> float:
        return 1.0 / self.frequency

    @property
    def support(self) -> int:
        return self.iterations * (self.window - 1) + 1

    @property
    def margin(self) -> int:
        return self.iterations * (self.window - 1) // 2


@dataclass(frozen=True, eq=False)
class PcComponent:
    values: TimeSeries
    frequency: float
    params: KzftParams
    margin: int

    def in_margin(self) -> np.ndarray:
        """Boolean mask of samples computed with a truncated window."""
        n = len(self.values)
        i = np.arange(n)
        return (i < self.margin) | (i >= n - self.margin)

    def to_csv(self, path) -> None:
        write_table(
            path,
            ["t", "value", "in_margin"],
            zip(
                self.values.times.tolist(),
                self.values.values.tolist(),
                self.in_margin().astype(int).tolist(),
            ),
        )


def _check_support(n: int, params: KzftParams) -> None:
    if params.support > n:
        raise ParameterError(
            f"filter support k*(m-1)+1 = {params.support} exceeds series length {n} "
            f"(m={params.window}, k={params.iterations})",
            "window",
        )


def _moving_mean(z: np.ndarray, m: int) -> np.ndarray:
    """Centered length-``m`` mean; truncated windows at the ends are renormalized."""
    kernel = np.ones(m)
    h = (m - 1) // 2
    total = np.convolve(z, kernel)[h : h + z.size]
    count = np.convolve(np.ones(z.size), kernel)[h : h + z.size]
    return total / count


def kzft_demodulate(series: TimeSeries, params: KzftParams) -> np.ndarray:
    """Complex KZFT coefficient ``Z(t)``.

    The series is demodulated in absolute time, ``y(t) exp(-2 pi i f t)``, and
    smoothed ``k`` times by a centered uniform window of length ``m``.
    Near the ends each pass averages only the samples that exist.
    """
    _check_support(len(series), params)
    t = series.times.astype(float)
    z = series.values * np.exp(-2j * np.pi * params.frequency * t)
    for _ in range(params.iterations):
        z = _moving_mean(z, params.window)
    return z


def extract_pc(series: TimeSeries, params: KzftParams) -> PcComponent:
    """Real periodic component ``2 Re(Z(t) exp(2 pi i f t))`` around ``f``."""
    z = kzft_demodulate(series, params)
    t = series.times.astype(float)
    y = 2.0 * np.real(z * np.exp(2j * np.pi * params.frequency * t))
    return PcComponent(
        values=series.with_values(y),
        frequency=params.frequency,
        params=params,
        margin=params.margin,
    )


def sum_pc(components, length: int | None = None, start_index: int = 1) -> TimeSeries:
    """Elementwise sum of extracted components; an empty list gives zeros of ``length``."""
    components = list(components)
    if not components:
        if length is None:
            raise ShapeError("length is required when summing no components", "length")
        return TimeSeries.zeros(length, start_index)
    first = components[0].values
    total = first.values.copy()
    for c in components[1:]:
        first.check_aligned(c.values, "PC components")
        total += c.values.values
    return first.with_values(total)
