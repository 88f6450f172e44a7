"""Command-line interface.

    vbpbb run --preset original --out runs/original
    vbpbb run --config my_run.json --threads 4
    vbpbb simulate --preset event --out sims/event
    vbpbb analyze --input sims/event/observed.csv --top-n 3 --out spec/
    vbpbb report runs/original runs/event runs/trend --out table1.csv
    vbpbb plot runs/original runs/event runs/trend --window 1 1000 --out figures/

Exit status: 0 on success, 2 for an invalid or unreadable configuration,
3 when a parameter is numerically unusable (for example a filter window
longer than the series).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import config as _config
from .errors import ParameterError, RangeError
from .pipeline import analyze_series, compare_scenarios, emit_plots, run_pipeline, simulate_only
from .series import read_series_csv
from .simulate import PRESET_NAMES, build_scenario

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _scenario_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--config", metavar="PATH", help="JSON run configuration")
    src.add_argument("--preset", choices=PRESET_NAMES, help="paper scenario preset")
    p.add_argument("--seed", type=int, help="master seed (overrides the config)")
    p.add_argument("--out", metavar="DIR", help="output directory (overrides the config)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vbpbb", description="Variable bandpass periodic block bootstrap with bias reports."
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="full pipeline: simulate, filter, bootstrap, bias report")
    _scenario_args(p)
    p.add_argument("--threads", type=int, default=1, help="bootstrap worker threads (0 = auto)")

    p = sub.add_parser("simulate", help="write truth/observed series CSVs")
    _scenario_args(p)

    p = sub.add_parser("analyze", help="periodogram and dominant periods of a series")
    _scenario_args(p)
    p.add_argument("--input", metavar="CSV", help="series CSV with columns t,value")
    p.add_argument("--top-n", type=int, default=3)

    p = sub.add_parser("report", help="combine run manifests into a Table-1 CSV")
    p.add_argument("manifests", nargs="+", help="run directories or manifest.json files")
    p.add_argument("--out", metavar="PATH", required=True, help="CSV file to write")

    p = sub.add_parser("plot", help="figures from run artifacts")
    p.add_argument("manifests", nargs="+", help="run directories or manifest.json files")
    p.add_argument("--window", nargs=2, type=int, action="append", metavar=("FROM", "TO"))
    p.add_argument("--format", default="svg", choices=["svg"])
    p.add_argument("--out", metavar="DIR", required=True)
    return parser


def _load_config(args) -> _config.RunConfig:
    if args.config:
        doc = _config.load_document(args.config)
    else:
        doc = _config.preset_document(args.preset or "original")
    if args.seed is not None:
        doc["seed"] = args.seed
    try:
        return _config.parse(doc)
    except ParameterError as exc:
        if exc.parameter and not exc.parameter.startswith(("scenario.", "filter", "bootstrap.")):
            exc.parameter = f"scenario.{exc.parameter}"
        raise


def _out_dir(args, cfg: _config.RunConfig) -> str:
    return args.out or cfg.output.directory


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s"
    )
    try:
        if args.command == "run":
            cfg = _load_config(args)
            threads = args.threads if args.threads > 0 else (os.cpu_count() or 1)
            manifest, report = run_pipeline(cfg, _out_dir(args, cfg), workers=threads)
            o = report.overall
            print(f"{report.scenario}: vbpbb mean {o.vbpbb_mean:.6g}, true bias {o.true_bias:.6g}, "
                  f"estimated bias {o.estimated_bias:.6g}")
            print(f"manifest: {manifest}")
        elif args.command == "simulate":
            cfg = _load_config(args)
            print(simulate_only(cfg, _out_dir(args, cfg)))
        elif args.command == "analyze":
            if args.input:
                series = read_series_csv(args.input)
                out = args.out or "analysis"
            else:
                cfg = _load_config(args)
                series = build_scenario(cfg.scenario).observed
                out = args.out or os.path.join(cfg.output.directory, "analysis")
            print(analyze_series(series, out, args.top_n))
        elif args.command == "report":
            rows, notes = compare_scenarios(args.manifests, args.out)
            for n in notes:
                print(f"warning: {n}", file=sys.stderr)
            print(f"wrote {len(rows)} rows to {args.out}")
        elif args.command == "plot":
            for path in emit_plots(args.manifests, args.out, [tuple(w) for w in args.window or []], args.format):
                print(path)
    except _config.ConfigSchemaError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return EXIT_CONFIG
    except (ParameterError, RangeError) as exc:
        where = f"{exc.parameter}: " if exc.parameter else ""
        print(f"parameter error: {where}{exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
