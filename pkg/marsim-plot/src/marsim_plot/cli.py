"""marsim-plot --csv results.csv --figure rician_k --out fig4.png"""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURE_KINDS, EmptyDataError, PlotSpec, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="marsim-plot",
                                     description="render simulator result CSVs")
    parser.add_argument("--csv", required=True, help="results file")
    parser.add_argument("--figure", required=True, choices=FIGURE_KINDS)
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--group-key", default=None,
                        help="override the figure's default grouping column")
    parser.add_argument("--dpi", type=int, default=120)
    args = parser.parse_args(argv)
    spec = PlotSpec(input_csv=args.csv, figure=args.figure, output=args.out,
                    group_key=args.group_key, dpi=args.dpi)
    try:
        render(spec)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except (EmptyDataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
