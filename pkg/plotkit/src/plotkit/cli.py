"""Command-line entry: render one plot job from CSV inputs.

Exit codes: 0 success (including empty-data warnings), 2 schema or input
errors.
"""

from __future__ import annotations

import argparse
import sys

from .jobs import KINDS, PlotJob, SchemaError
from .render import render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dualgraph-plot",
        description="Render dualgraph experiment CSVs as figures",
    )
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--in", dest="inputs", required=True, nargs="+",
                        help="input CSV file(s)")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--fit", help="fit CSV for the overlay line")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = PlotJob(kind=args.kind, inputs=tuple(args.inputs),
                      output=args.out, fit=args.fit)
        report = render(job)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(
        f"{report.output}: {report.points_plotted} points in "
        f"{report.series} series"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
