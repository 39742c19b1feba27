"""Command line entry point: ``nl4s <experiment> --config FILE --out DIR``."""
from __future__ import annotations

import argparse
import logging
import os
import sys

import scipy.fft

from .config import KINDS, ConfigError, load_config, parse_config
from .dynamics import BlowUpError
from .harness import emit, run_experiment

EXIT_OK, EXIT_CONFIG, EXIT_GUARD, EXIT_IO = 0, 2, 3, 4


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nl4s", description="NL4S pseudospectral experiments")
    ap.add_argument("experiment", choices=KINDS)
    ap.add_argument("--config", help="TOML configuration file (optional for 'check')")
    ap.add_argument("--out", help="output directory (default: config 'out' or ./out/<experiment>)")
    ap.add_argument("--threads", type=int, default=1, help="FFT worker threads")
    ap.add_argument("--quiet", action="store_true", help="only print errors")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.config:
            cfg = load_config(args.config, args.experiment)
        elif args.experiment == "check":
            cfg = parse_config("", "check")
        else:
            raise ConfigError([f"experiment '{args.experiment}' needs --config"])
        if args.threads < 1:
            raise ConfigError(["--threads must be >= 1"])
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO

    out = args.out or cfg.out or os.path.join("out", args.experiment)
    try:
        with scipy.fft.set_workers(args.threads):
            record = run_experiment(cfg)
    except BlowUpError as exc:
        print(f"solver guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except ValueError as exc:
        print(f"invalid experiment: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        rpath, spath = emit(record, out)
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    if not args.quiet:
        print(f"wrote {rpath} and {spath}")
        for key, value in record.scalars.items():
            if not isinstance(value, (dict, list)):
                print(f"  {key}: {value}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
