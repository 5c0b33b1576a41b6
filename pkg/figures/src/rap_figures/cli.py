"""figures <kind> --in <csv> [--in <csv> ...] --out <png>

Renders dicke-rap output files into the five figure kinds: levels,
populations, qfi, scaling, sphere.  Schema mismatches exit with code 2 and
a column diagnostic on stderr.
"""
from __future__ import annotations

import argparse
import sys

from .io import SchemaError
from .render import KINDS, FigureSpec, render_to_file


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="figures")
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--in", dest="inputs", action="append", required=True,
                        help="input CSV (repeatable for the qfi kind)")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--meta", default=None,
                        help="sidecar JSON (levels crossings/alpha)")
    parser.add_argument("--xlim", nargs=2, type=float, default=None,
                        metavar=("LO", "HI"))
    parser.add_argument("--ylim", nargs=2, type=float, default=None,
                        metavar=("LO", "HI"))
    parser.add_argument("--dpi", type=int, default=150)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(kind=args.kind, inputs=tuple(args.inputs),
                      output=args.out, meta=args.meta,
                      xlim=tuple(args.xlim) if args.xlim else None,
                      ylim=tuple(args.ylim) if args.ylim else None,
                      dpi=args.dpi)
    try:
        render_to_file(spec)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
