"""Command-line entry point: ``figscripts render --csv PATH --out DIR [--logy]``."""

from __future__ import annotations

import argparse
import sys

from .plots import PlotSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figscripts",
        description="Render strategy-comparison figures from experiment CSV output.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("render", help="one PNG per (p, metric) group")
    sp.add_argument("--csv", required=True, help="experiment CSV file")
    sp.add_argument("--out", required=True, help="output directory")
    sp.add_argument("--logy", action="store_true", help="logarithmic y axis")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = PlotSpec(csv_path=args.csv, out_dir=args.out, logy=args.logy)
    try:
        written = render(spec)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
