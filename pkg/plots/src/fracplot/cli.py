"""Command-line figure renderer: fracplot <kind> --in CSV [--in CSV ...] --out IMG."""

from __future__ import annotations

import argparse
import sys

from .errors import PlotError
from .render import KINDS, PlotSpec, render

USAGE_EXIT = 1
INPUT_EXIT = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; the CSV-contract errors own that code
    def error(self, message):
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fracplot", description=__doc__)
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument(
        "--in", dest="inputs", action="append", required=True, metavar="CSV",
        help="input CSV; repeat to overlay several files",
    )
    parser.add_argument("--out", required=True, metavar="IMG")
    parser.add_argument("--xlabel")
    parser.add_argument("--ylabel")
    parser.add_argument("--title")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        spec = PlotSpec(
            kind=args.kind,
            inputs=tuple(args.inputs),
            out=args.out,
            xlabel=args.xlabel,
            ylabel=args.ylabel,
            title=args.title,
        )
        out = render(spec)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except PlotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_EXIT
    print(f"fracplot: wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
