"""The ``wcsim-plot`` command line entry point."""

from __future__ import annotations

import argparse
import sys

from wcsim_plot.figures import AGGREGATIONS, FIGURES, FigureSpec, PlotDataError, render_figure


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wcsim-plot")
    parser.add_argument("--csv", action="append", required=True,
                        help="sweep CSV path (repeatable)")
    parser.add_argument("--figure", choices=FIGURES, required=True)
    parser.add_argument("--out", required=True,
                        help="output image path (.png or .svg)")
    parser.add_argument("--agg", choices=AGGREGATIONS, default="median")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        spec = FigureSpec(csv_paths=tuple(args.csv), figure=args.figure,
                          out=args.out, agg=args.agg)
        report = render_figure(spec)
    except PlotDataError as exc:
        print(f"wcsim-plot: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"wcsim-plot: cannot write output: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out} and {args.out}.slopes.txt "
          f"({len(report['series'])} series entries)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
