"""Command-line entry point.

Subcommands: mesh, steklov, frequency, decay, verify, penetration, oracle,
plot.  Every subcommand takes --config <path> plus optional --out <dir> and
--quiet; exit code 0 on success, 2 when a verification bound fails, 1 on
any computational error.
"""

from __future__ import annotations

import argparse
import sys

from .config import parse_config
from .errors import ConfigError
from .runner import EXIT_ERROR, run

_SUBCOMMANDS = ("mesh", "steklov", "frequency", "decay", "verify",
                "penetration", "oracle", "plot")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="freqdecay",
        description="Steklov spectra, boundary-datum frequencies and interior "
                    "decay profiles for 2D elliptic problems.")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in _SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="experiment config file")
        p.add_argument("--out", default="", help="output directory "
                       "(default: config `out` key or current directory)")
        p.add_argument("--quiet", action="store_true")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        with open(args.config) as f:
            text = f.read()
    except OSError as exc:
        print(f"error [config]: {exc}")
        return EXIT_ERROR
    try:
        cfg = parse_config(text)
    except ConfigError as exc:
        print(f"error [config]: {exc}")
        return EXIT_ERROR
    out_dir = args.out or cfg.out or "."
    return run(cfg, args.subcommand, out_dir, quiet=args.quiet)


if __name__ == "__main__":
    sys.exit(main())
