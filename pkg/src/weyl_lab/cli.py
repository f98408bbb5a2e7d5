"""Batch command line entry point: ``lab <suite> --config <path>``.

Exit codes: 0 when every case passes, 1 when any case fails, 2 for usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .numerics import load_config
from .reports import SET_KEYS, SUITES, emit, load_sets, run_suite

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 already; keep the message short
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"lab: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lab", description="Run numerical verification suites and emit a report.")
    p.add_argument("suite", choices=[*SUITES, "all"], help="suite to run")
    p.add_argument("--config", required=True, help="key = value config file")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--timing", action="store_true", help="record wall_time (makes output non-deterministic)")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    path = Path(args.config)
    try:
        cfg, extras = load_config(path)
        if args.seed is not None:
            cfg = cfg.replace(seed=args.seed)
        unknown = sorted(set(extras) - SET_KEYS)
        if unknown:
            raise KeyError(f"unknown config key(s): {', '.join(unknown)}")
        for key in SET_KEYS & set(extras):
            sets = load_sets(extras[key], path.parent)
            if not sets:
                raise ValueError(f"{key} names no set files")
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"lab: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = run_suite(args.suite, cfg, extras, base_dir=path.parent, timing=args.timing)
    text = emit(report, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
