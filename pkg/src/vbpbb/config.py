"""JSON run configuration: schema, embedded paper presets and parsing.

A config document looks like::

    {
      "scenario": "original",              # preset name, or an explicit object
      "filter": [{"period": 25, "window": 251, "iterations": 1}],
      "bootstrap": {"B": 1000, "level": 0.95},
      "output": {"directory": "runs/original", "formats": ["csv", "svg"],
                 "plot_windows": [[1, 1000]]},
      "seed": 20250101
    }

``filter`` may instead be ``{"auto": {"top_n": 1, "periods": [25]}}`` to
pick targets from the periodogram. Presets expand to explicit documents via
:func:`expand`, and the expanded form is what gets echoed in run manifests.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from .errors import VbpbbError
from .resample import DEFAULT_BAND_MODE, BandMode
from .simulate import (
    PRESET_NAMES,
    CombineMode,
    EventSpec,
    GammaShifted,
    NoiseSpec,
    Normal,
    ScenarioConfig,
    SineComponent,
    TrendSpec,
)
from .spectral import KzftParams, default_window

DEFAULT_SEED = 20250101

_number = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}

_distribution = {
    "oneOf": [
        {
            "type": "object",
            "properties": {"kind": {"const": "normal"}, "mean": _number, "sd": _pos},
            "required": ["kind", "sd"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "kind": {"const": "gamma_shifted"},
                "shape": _pos,
                "scale": _pos,
                "offset": _number,
            },
            "required": ["kind", "shape", "scale"],
            "additionalProperties": False,
        },
    ]
}

_scenario_obj = {
    "type": "object",
    "properties": {
        "name": {"type": "string"},
        "length": {"type": "integer", "minimum": 2},
        "components": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "amplitude": {"type": "number", "minimum": 0},
                    "period": {"type": "number", "exclusiveMinimum": 1},
                    "phase": _number,
                },
                "required": ["amplitude", "period"],
                "additionalProperties": False,
            },
        },
        "noise": {
            "type": ["object", "null"],
            "properties": {
                "combine_mode": {"enum": [m.value for m in CombineMode]},
                "terms": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "properties": {"coefficient": _number, "distribution": _distribution},
                        "required": ["coefficient", "distribution"],
                        "additionalProperties": False,
                    },
                },
            },
            "required": ["terms"],
            "additionalProperties": False,
        },
        "event": {
            "type": ["object", "null"],
            "properties": {
                "start": {"type": "integer", "minimum": 1},
                "end": {"type": "integer", "minimum": 1},
                "shift": _number,
            },
            "required": ["start", "end", "shift"],
            "additionalProperties": False,
        },
        "trend": {
            "type": ["object", "null"],
            "properties": {"slope": _number},
            "required": ["slope"],
            "additionalProperties": False,
        },
        "seed": {"type": "integer", "minimum": 0},
        "apply_event_to": {"const": "truth_and_observed"},
        "apply_trend_to": {"const": "truth_and_observed"},
    },
    "required": ["length", "components"],
    "additionalProperties": False,
}

_target = {
    "type": "object",
    "properties": {
        "frequency": {"type": "number", "exclusiveMinimum": 0, "maximum": 0.5},
        "period": {"type": "number", "minimum": 2},
        "window": {"type": "integer", "minimum": 3},
        "iterations": {"type": "integer", "minimum": 1},
    },
    "oneOf": [{"required": ["frequency"]}, {"required": ["period"]}],
    "additionalProperties": False,
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "vbpbb run configuration",
    "type": "object",
    "properties": {
        "scenario": {"oneOf": [{"enum": list(PRESET_NAMES)}, _scenario_obj]},
        "filter": {
            "oneOf": [
                {"type": "array", "items": _target, "minItems": 1},
                {
                    "type": "object",
                    "properties": {
                        "auto": {
                            "type": "object",
                            "properties": {
                                "top_n": {"type": "integer", "minimum": 1},
                                "periods": {"type": "array", "items": {"type": "number", "minimum": 2}},
                                "window_factor": {"type": "integer", "minimum": 1},
                                "iterations": {"type": "integer", "minimum": 1},
                            },
                            "additionalProperties": False,
                        }
                    },
                    "required": ["auto"],
                    "additionalProperties": False,
                },
            ]
        },
        "bootstrap": {
            "type": "object",
            "properties": {
                "B": {"type": "integer", "minimum": 1},
                "level": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "mode": {"enum": [m.value for m in BandMode]},
                "block_length": {"type": ["integer", "null"], "minimum": 1},
                "exclude_margin": {"type": "boolean"},
            },
            "additionalProperties": False,
        },
        "output": {
            "type": "object",
            "properties": {
                "directory": {"type": "string"},
                "formats": {
                    "type": "array",
                    "items": {"enum": ["csv", "svg"]},
                    "uniqueItems": True,
                },
                "plot_windows": {
                    "type": "array",
                    "items": {
                        "type": "array",
                        "items": {"type": "integer", "minimum": 1},
                        "minItems": 2,
                        "maxItems": 2,
                    },
                },
                "dump_ensemble": {"type": "boolean"},
            },
            "additionalProperties": False,
        },
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
    },
    "required": ["scenario"],
    "additionalProperties": False,
}


class ConfigSchemaError(VbpbbError):
    """Config file is unreadable or violates the schema; ``problems`` lists each issue."""

    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


def _scenario_doc(name: str) -> dict:
    doc = {
        "name": name,
        "length": 2500,
        "components": [{"amplitude": 0.8, "period": 25, "phase": 100}],
        "noise": {
            "combine_mode": "coefficient_sum",
            "terms": [
                {"coefficient": 0.5, "distribution": {"kind": "normal", "mean": 0, "sd": 3}},
                {
                    "coefficient": 0.5,
                    "distribution": {"kind": "gamma_shifted", "shape": 2, "scale": 5, "offset": -10},
                },
            ],
        },
        "event": None,
        "trend": None,
    }
    if name == "event":
        doc["event"] = {"start": 1500, "end": 1600, "shift": -4}
    elif name == "trend":
        doc["trend"] = {"slope": 0.001}
    return doc


PRESET_WINDOWS = {"original": [[1, 1000]], "event": [[1000, 2000]], "trend": [[1, 1000]]}


def preset_document(name: str, seed: int = DEFAULT_SEED) -> dict:
    """Full explicit config for one of the paper's scenarios."""
    if name not in PRESET_NAMES:
        raise ConfigSchemaError([f"scenario: unknown preset {name!r}"])
    return {
        "scenario": name,
        "filter": [{"period": 25, "window": 251, "iterations": 1}],
        "bootstrap": {"B": 1000, "level": 0.95},
        "output": {"directory": f"runs/{name}", "formats": ["csv", "svg"], "plot_windows": PRESET_WINDOWS[name]},
        "seed": seed,
    }


def _path(err: jsonschema.ValidationError) -> str:
    parts = []
    for p in err.absolute_path:
        if isinstance(p, int):
            parts.append(f"[{p}]")
        else:
            parts.append(("." if parts else "") + str(p))
    return "".join(parts) or "<root>"


def validate(doc: dict) -> None:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        problems = []
        for e in errors:
            # oneOf failures are clearer when reported through the best sub-error
            best = jsonschema.exceptions.best_match([e]) if e.context else e
            problems.append(f"{_path(best)}: {best.message}")
        raise ConfigSchemaError(problems)


def load_document(path) -> dict:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigSchemaError([f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}"]) from exc
    validate(doc)
    return doc


def expand(doc: dict) -> dict:
    """Resolve preset names and fill defaults, giving a fully explicit document."""
    doc = copy.deepcopy(doc)
    validate(doc)
    if isinstance(doc["scenario"], str):
        doc["scenario"] = _scenario_doc(doc["scenario"])
    doc.setdefault("seed", DEFAULT_SEED)
    doc.setdefault("filter", [{"period": 25, "window": 251, "iterations": 1}])
    b = doc.setdefault("bootstrap", {})
    b.setdefault("B", 1000)
    b.setdefault("level", 0.95)
    b.setdefault("mode", DEFAULT_BAND_MODE.value)
    b.setdefault("block_length", None)
    b.setdefault("exclude_margin", False)
    o = doc.setdefault("output", {})
    o.setdefault("directory", "runs/out")
    o.setdefault("formats", ["csv", "svg"])
    o.setdefault("plot_windows", [])
    o.setdefault("dump_ensemble", False)
    validate(doc)
    return doc


@dataclass(frozen=True)
class AutoFilter:
    top_n: int = 1
    periods: tuple[float, ...] = ()
    window_factor: int = 10
    iterations: int = 1


@dataclass(frozen=True)
class BootstrapSettings:
    n_boot: int = 1000
    level: float = 0.95
    mode: BandMode = DEFAULT_BAND_MODE
    block_length: int | None = None
    exclude_margin: bool = False


@dataclass(frozen=True)
class OutputSettings:
    directory: str = "runs/out"
    formats: tuple[str, ...] = ("csv", "svg")
    plot_windows: tuple[tuple[int, int], ...] = ()
    dump_ensemble: bool = False


@dataclass(frozen=True)
class RunConfig:
    scenario: ScenarioConfig
    filter: tuple[KzftParams, ...] | AutoFilter
    bootstrap: BootstrapSettings
    output: OutputSettings
    seed: int
    document: dict = field(compare=False, default_factory=dict)


def _distribution(d: dict):
    if d["kind"] == "normal":
        return Normal(d.get("mean", 0.0), d["sd"])
    return GammaShifted(d["shape"], d["scale"], d.get("offset", 0.0))


def _scenario(doc: dict, seed: int) -> ScenarioConfig:
    noise = doc.get("noise")
    event = doc.get("event")
    trend = doc.get("trend")
    return ScenarioConfig(
        length=doc["length"],
        components=tuple(
            SineComponent(c["amplitude"], c["period"], c.get("phase", 0.0)) for c in doc["components"]
        ),
        noise=None
        if noise is None
        else NoiseSpec(
            terms=tuple((t["coefficient"], _distribution(t["distribution"])) for t in noise["terms"]),
            combine_mode=noise.get("combine_mode", "coefficient_sum"),
        ),
        event=None if event is None else EventSpec(event["start"], event["end"], event["shift"]),
        trend=None if trend is None else TrendSpec(trend["slope"]),
        seed=doc.get("seed", seed),
        name=doc.get("name", "custom"),
    )


def _target(t: dict) -> KzftParams:
    if "period" in t:
        period = float(t["period"])
        freq = 1.0 / period
    else:
        freq = float(t["frequency"])
        period = 1.0 / freq
    return KzftParams(freq, t.get("window", default_window(period)), t.get("iterations", 1))


def parse(doc: dict) -> RunConfig:
    """Build a :class:`RunConfig` from a (possibly preset-based) document."""
    doc = expand(doc)
    seed = doc["seed"]
    f = doc["filter"]
    if isinstance(f, dict):
        a = f["auto"]
        filt = AutoFilter(
            a.get("top_n", 1), tuple(a.get("periods", ())), a.get("window_factor", 10), a.get("iterations", 1)
        )
    else:
        filt = tuple(_target(t) for t in f)
    b, o = doc["bootstrap"], doc["output"]
    return RunConfig(
        scenario=_scenario(doc["scenario"], seed),
        filter=filt,
        bootstrap=BootstrapSettings(b["B"], b["level"], BandMode(b["mode"]), b["block_length"], b["exclude_margin"]),
        output=OutputSettings(
            o["directory"], tuple(o["formats"]), tuple(tuple(w) for w in o["plot_windows"]), o["dump_ensemble"]
        ),
        seed=seed,
        document=doc,
    )
