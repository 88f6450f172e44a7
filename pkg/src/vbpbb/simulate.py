"""Synthetic periodically correlated series: sine sums, mixed noise, events, trends."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Union

import numpy as np

from . import rng as _rng
from .errors import ParameterError, RangeError
from .series import TimeSeries


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ParameterError(f"{name} must be finite, got {value}", name)
    return value


@dataclass(frozen=True)
class SineComponent:
    """``amplitude * sin(2*pi*t/period + phase)``; phase in radians."""

    amplitude: float
    period: float
    phase: float = 0.0

    def __post_init__(self) -> None:
        a = _finite("amplitude", self.amplitude)
        p = _finite("period", self.period)
        _finite("phase", self.phase)
        if a < 0:
            raise ParameterError(f"amplitude must be >= 0, got {a}", "amplitude")
        if p <= 1:
            raise ParameterError(f"period must be > 1, got {p}", "period")
        if p <= 2:
            warnings.warn(f"period {p} is at or beyond the Nyquist limit", stacklevel=3)


@dataclass(frozen=True)
class Normal:
    mean: float = 0.0
    sd: float = 1.0

    def __post_init__(self) -> None:
        _finite("mean", self.mean)
        if not _finite("sd", self.sd) > 0:
            raise ParameterError(f"sd must be > 0, got {self.sd}", "sd")

    def draw(self, gen: np.random.Generator, n: int) -> np.ndarray:
        return gen.normal(self.mean, self.sd, n)

    @property
    def variance(self) -> float:
        return self.sd**2


@dataclass(frozen=True)
class GammaShifted:
    """Gamma(shape, scale) draw plus a constant offset."""

    shape: float
    scale: float
    offset: float = 0.0

    def __post_init__(self) -> None:
        if not _finite("shape", self.shape) > 0:
            raise ParameterError(f"shape must be > 0, got {self.shape}", "shape")
        if not _finite("scale", self.scale) > 0:
            raise ParameterError(f"scale must be > 0, got {self.scale}", "scale")
        _finite("offset", self.offset)

    def draw(self, gen: np.random.Generator, n: int) -> np.ndarray:
        return gen.gamma(self.shape, self.scale, n) + self.offset


NoiseDistribution = Union[Normal, GammaShifted]


class CombineMode(str, Enum):
    COEFFICIENT_SUM = "coefficient_sum"
    PROBABILISTIC_MIXTURE = "probabilistic_mixture"


@dataclass(frozen=True)
class NoiseSpec:
    """Additive noise built from independent terms.

    In ``coefficient_sum`` mode every term is drawn at every time point and
    ``eps_t = sum_i c_i * draw_i(t)``. In ``probabilistic_mixture`` mode the
    coefficients are selection probabilities and each ``eps_t`` is one draw
    from the selected term.
    """

    terms: tuple[tuple[float, NoiseDistribution], ...] = ()
    combine_mode: CombineMode = CombineMode.COEFFICIENT_SUM

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple((float(c), d) for c, d in self.terms))
        object.__setattr__(self, "combine_mode", CombineMode(self.combine_mode))
        for c, _ in self.terms:
            _finite("coefficient", c)
        if self.combine_mode is CombineMode.PROBABILISTIC_MIXTURE and self.terms:
            w = np.array([c for c, _ in self.terms])
            if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
                raise ParameterError(
                    f"mixture weights must be non-negative and sum to 1, got {w.tolist()}",
                    "noise.terms",
                )


@dataclass(frozen=True)
class EventSpec:
    """Additive shift on the closed window ``[start, end]``."""

    start: int
    end: int
    shift: float

    def __post_init__(self) -> None:
        if self.start < 1:
            raise RangeError(f"event start must be >= 1, got {self.start}", "event.start")
        if self.end < self.start:
            raise RangeError(f"event end {self.end} precedes start {self.start}", "event.end")
        _finite("shift", self.shift)


@dataclass(frozen=True)
class TrendSpec:
    slope: float

    def __post_init__(self) -> None:
        _finite("slope", self.slope)


class ApplyTo(str, Enum):
    TRUTH_AND_OBSERVED = "truth_and_observed"


@dataclass(frozen=True)
class ScenarioConfig:
    length: int
    components: tuple[SineComponent, ...]
    noise: NoiseSpec | None = None
    event: EventSpec | None = None
    trend: TrendSpec | None = None
    seed: int = 0
    name: str = "custom"
    apply_event_to: ApplyTo = ApplyTo.TRUTH_AND_OBSERVED
    apply_trend_to: ApplyTo = ApplyTo.TRUTH_AND_OBSERVED

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "apply_event_to", ApplyTo(self.apply_event_to))
        object.__setattr__(self, "apply_trend_to", ApplyTo(self.apply_trend_to))
        _rng.check_seed(self.seed)
        if self.length < 2:
            raise ParameterError(f"length must be >= 2, got {self.length}", "length")
        longest = max((c.period for c in self.components), default=0)
        if self.length < longest:
            raise ParameterError(
                f"length {self.length} is shorter than the longest period {longest}", "length"
            )
        if self.event is not None and self.event.end > self.length:
            raise RangeError(
                f"event window [{self.event.start}, {self.event.end}] exceeds length {self.length}",
                "event.end",
            )


@dataclass(frozen=True, eq=False)
class ScenarioData:
    """Realized scenario.

    ``truth`` carries the event and trend; ``base_truth`` is the bare sine
    sum, used as the standardized true reference in bias reports.
    """

    truth: TimeSeries
    observed: TimeSeries
    base_truth: TimeSeries
    config: ScenarioConfig
    metadata: dict = field(default_factory=dict)


def generate_signal(components, length: int, start_index: int = 1) -> TimeSeries:
    """Sum of sines evaluated at ``t = start_index, ..., start_index + length - 1``."""
    if length < 1:
        raise ParameterError(f"length must be >= 1, got {length}", "length")
    t = np.arange(start_index, start_index + length, dtype=float)
    y = np.zeros(length)
    for c in components:
        y += c.amplitude * np.sin(2.0 * np.pi * t / c.period + c.phase)
    return TimeSeries(y, start_index)


def generate_noise(spec: NoiseSpec, length: int, seed: int, start_index: int = 1) -> TimeSeries:
    if length < 1:
        raise ParameterError(f"length must be >= 1, got {length}", "length")
    if not spec.terms:
        return TimeSeries.zeros(length, start_index)
    draws = [
        dist.draw(_rng.stream(seed, _rng.NOISE_TERM, i), length)
        for i, (_, dist) in enumerate(spec.terms)
    ]
    if spec.combine_mode is CombineMode.COEFFICIENT_SUM:
        eps = np.zeros(length)
        for (c, _), d in zip(spec.terms, draws):
            eps += c * d
    else:
        weights = np.array([c for c, _ in spec.terms])
        pick = _rng.stream(seed, _rng.NOISE_SELECT).choice(len(draws), size=length, p=weights)
        eps = np.stack(draws)[pick, np.arange(length)]
    return TimeSeries(eps, start_index)


def apply_event(series: TimeSeries, event: EventSpec) -> TimeSeries:
    lo = event.start - series.start_index
    hi = event.end - series.start_index
    if lo < 0 or hi >= len(series):
        raise RangeError(
            f"event window [{event.start}, {event.end}] outside series times "
            f"[{series.start_index}, {series.start_index + len(series) - 1}]",
            "event",
        )
    if event.shift == 0:
        return series
    y = series.values.copy()
    y[lo : hi + 1] += event.shift
    return series.with_values(y)


def apply_trend(series: TimeSeries, trend: TrendSpec) -> TimeSeries:
    if trend.slope == 0:
        return series
    return series.with_values(series.values + trend.slope * series.times.astype(float))


def build_scenario(cfg: ScenarioConfig) -> ScenarioData:
    base = generate_signal(cfg.components, cfg.length)
    truth = base
    if cfg.event is not None:
        truth = apply_event(truth, cfg.event)
    if cfg.trend is not None:
        truth = apply_trend(truth, cfg.trend)
    if cfg.noise is None:
        observed = truth
    else:
        observed = truth.with_values(
            truth.values + generate_noise(cfg.noise, cfg.length, cfg.seed).values
        )
    meta = {
        "scenario": cfg.name,
        "event_window": "closed" if cfg.event is not None else None,
        "event_points": (cfg.event.end - cfg.event.start + 1) if cfg.event is not None else 0,
        "noise_mode": cfg.noise.combine_mode.value if cfg.noise is not None else None,
        "seed": cfg.seed,
    }
    return ScenarioData(truth=truth, observed=observed, base_truth=base, config=cfg, metadata=meta)


# Paper scenario parameterization.
PAPER_LENGTH = 2500
PAPER_COMPONENT = SineComponent(amplitude=0.8, period=25.0, phase=100.0)
PAPER_NOISE = NoiseSpec(
    terms=((0.5, Normal(0.0, 3.0)), (0.5, GammaShifted(2.0, 5.0, -10.0))),
    combine_mode=CombineMode.COEFFICIENT_SUM,
)
PAPER_EVENT = EventSpec(start=1500, end=1600, shift=-4.0)
PAPER_TREND = TrendSpec(slope=0.001)
PRESET_NAMES = ("original", "event", "trend")


def preset(name: str, seed: int = 0) -> ScenarioConfig:
    """One of the three paper scenarios: ``original``, ``event`` or ``trend``."""
    if name not in PRESET_NAMES:
        raise ParameterError(f"unknown preset {name!r}; choose from {PRESET_NAMES}", "preset")
    cfg = ScenarioConfig(
        length=PAPER_LENGTH,
        components=(PAPER_COMPONENT,),
        noise=PAPER_NOISE,
        seed=seed,
        name=name,
    )
    if name == "event":
        cfg = replace(cfg, event=PAPER_EVENT)
    elif name == "trend":
        cfg = replace(cfg, trend=PAPER_TREND)
    return cfg
