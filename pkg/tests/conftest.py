import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from vbpbb.bias import bias_report  # noqa: E402
from vbpbb.resample import vbpbb_run  # noqa: E402
from vbpbb.simulate import build_scenario, preset  # noqa: E402
from vbpbb.spectral import KzftParams  # noqa: E402

PAPER_TARGET = KzftParams(1 / 25, 251, 1)
PAPER_SEED = 20250101

_acceptance_lines: list[str] = []


def record_acceptance(line: str) -> None:
    _acceptance_lines.append(line)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def paper_runs():
    """Scenario data, pipeline result and bias report for each preset at the paper's settings."""
    out = {}
    for name in ("original", "event", "trend"):
        data = build_scenario(preset(name, PAPER_SEED))
        result = vbpbb_run(data.observed, [PAPER_TARGET], 1000, PAPER_SEED, 0.95)
        out[name] = (data, result, bias_report(data, result))
    return out


def random_instance(seed: int):
    """A small randomized scenario plus pipeline run, for algebraic identity checks."""
    import numpy as np

    from vbpbb.simulate import NoiseSpec, Normal, ScenarioConfig, SineComponent

    rng = np.random.default_rng(seed)
    period = int(rng.integers(3, 20))
    length = int(period * rng.integers(8, 30) + (rng.integers(0, period) if seed % 3 == 0 else 0))
    comps = tuple(
        SineComponent(float(rng.uniform(0, 2)), float(rng.uniform(2.5, 40)), float(rng.uniform(-5, 5)))
        for _ in range(rng.integers(1, 4))
    )
    comps = tuple(c for c in comps if c.period <= length)
    cfg = ScenarioConfig(
        length=length,
        components=comps,
        noise=NoiseSpec(((1.0, Normal(float(rng.normal()), float(rng.uniform(0.1, 2)))),)),
        seed=seed,
        name=f"random{seed}",
    )
    data = build_scenario(cfg)
    half = int(rng.integers(1, max(2, length // 4)))
    target = KzftParams(1.0 / period, 2 * half + 1, 1)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        result = vbpbb_run(data.observed, [target], int(rng.integers(2, 60)), seed, 0.9)
    return data, result, bias_report(data, result)
