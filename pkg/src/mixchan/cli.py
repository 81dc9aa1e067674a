"""Command-line front end.

Subcommands: ``run <config>`` executes a scenario file, ``verify <suite>``
runs a named verification suite, ``reproduce-paper [preset]`` executes the
compiled-in preset scenarios, ``list-presets`` enumerates them. Exit codes:
0 success, 2 usage or config error, 3 numerical or assertion failure.
The default output directory comes from $MIXCHAN_OUT_DIR when set.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from ._version import __version__
from .presets import PRESETS, get_preset, list_presets
from .runner import run_scenario
from .scenario import ConfigError, load_scenario
from .suites import DEFAULT_SEED, SUITE_NAMES, run_suite

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def _default_out_dir() -> str:
    return os.environ.get("MIXCHAN_OUT_DIR", ".")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mixchan",
        description="Convex mixtures of quantum dynamical maps: distinguishability, "
        "backflow measures, and information flow.",
    )
    parser.add_argument("--version", action="version", version=f"mixchan {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a scenario config file")
    run_p.add_argument("config", type=Path, help="path to a YAML scenario config")
    run_p.add_argument("--out-dir", type=Path, default=None, help="output directory")
    run_p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    run_p.add_argument(
        "--grid-step", type=float, default=None, help="override the scenario grid step"
    )
    run_p.add_argument(
        "--format", choices=("csv", "json", "both"), default=None, dest="output_format",
        help="csv/both write the time series, json writes the summary only",
    )

    verify_p = sub.add_parser("verify", help="run a verification suite")
    verify_p.add_argument("suite", choices=(*SUITE_NAMES, "all"))
    verify_p.add_argument("--seed", type=int, default=DEFAULT_SEED)

    repro_p = sub.add_parser(
        "reproduce-paper", help="run the built-in preset scenarios"
    )
    repro_p.add_argument(
        "preset", nargs="?", default=None, choices=(*sorted(PRESETS), None),
        help="a single preset (default: all)",
    )
    repro_p.add_argument("--out-dir", type=Path, default=None)
    repro_p.add_argument("--seed", type=int, default=None)
    repro_p.add_argument("--grid-step", type=float, default=None)
    repro_p.add_argument(
        "--format", choices=("csv", "json", "both"), default=None, dest="output_format"
    )

    sub.add_parser("list-presets", help="list the built-in preset scenarios")
    return parser


def _apply_overrides(scenario, seed, grid_step):
    if seed is not None:
        scenario = replace(scenario, seed=int(seed))
    if grid_step is not None:
        scenario = replace(scenario, grid_step=float(grid_step))
    return scenario


def _execute(scenario, out_dir, output_format) -> int:
    result = run_scenario(scenario, out_dir=out_dir, output_format=output_format)
    verdicts = result.summary["verdicts"]
    for name in sorted(verdicts):
        status = "PASS" if verdicts[name]["ok"] else "FAIL"
        print(f"{status} {scenario.name}/{name}")
    print(f"wrote {result.json_path}" + (f" and {result.csv_path}" if result.csv_path else ""))
    return EXIT_OK if result.ok else EXIT_NUMERICAL


def cmd_run(args) -> int:
    try:
        scenario = load_scenario(args.config)
    except FileNotFoundError:
        print(f"error: config file not found: {args.config}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    scenario = _apply_overrides(scenario, args.seed, args.grid_step)
    out_dir = args.out_dir if args.out_dir is not None else _default_out_dir()
    return _execute(scenario, out_dir, args.output_format)


def cmd_verify(args) -> int:
    results = run_suite(args.suite, seed=args.seed)
    passed = failed = 0
    for result in results:
        for check in result.checks:
            status = "PASS" if check.ok else "FAIL"
            print(f"{status} {check.name}: {check.detail}")
        passed += result.n_passed
        failed += result.n_failed
    print(f"{passed} passed, {failed} failed")
    return EXIT_OK if failed == 0 else EXIT_NUMERICAL


def cmd_reproduce(args) -> int:
    names = [args.preset] if args.preset else sorted(PRESETS)
    out_dir = args.out_dir if args.out_dir is not None else _default_out_dir()
    worst = EXIT_OK
    for name in names:
        scenario = _apply_overrides(get_preset(name), args.seed, args.grid_step)
        code = _execute(scenario, out_dir, args.output_format)
        worst = max(worst, code)
    return worst


def cmd_list_presets(_args) -> int:
    for name, describes in list_presets():
        print(f"{name}: {describes}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    handlers = {
        "run": cmd_run,
        "verify": cmd_verify,
        "reproduce-paper": cmd_reproduce,
        "list-presets": cmd_list_presets,
    }
    return handlers[args.command](args)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
