"""Command line front end: one invocation draws one figure.

Exit codes: 0 success, 2 for bad arguments, schema mismatches, missing
or empty inputs.
"""

from __future__ import annotations

import argparse
import sys

EXIT_OK = 0
EXIT_USAGE = 2


def _build_parser() -> argparse.ArgumentParser:
    from trotterplots import KINDS, __version__

    parser = argparse.ArgumentParser(
        prog="trotterplots",
        description="Render figures from the simulation toolkit's CSV "
                    "output. Plotting never recomputes physics; the CSVs "
                    "are the whole input.")
    parser.add_argument("kind", choices=KINDS,
                        help="which figure to draw")
    parser.add_argument("--csv", dest="csv_paths", action="append",
                        required=True, metavar="PATH",
                        help="input CSV; repeat to concatenate several")
    parser.add_argument("--out", required=True,
                        help="output image path (.svg or .png)")
    parser.add_argument("--title", default=None)
    parser.add_argument("--legend-loc", default="best")
    parser.add_argument("--fit-min-n", type=int, default=6,
                        help="smallest size admitted into fits (default 6)")
    parser.add_argument("--no-fits", action="store_true",
                        help="suppress extrapolation lines and caption")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    from trotterplots import FigureSpec, render

    spec = FigureSpec(csv_paths=tuple(args.csv_paths), kind=args.kind,
                      out_path=args.out, title=args.title,
                      legend_loc=args.legend_loc, fit_min_n=args.fit_min_n,
                      fits=not args.no_fits)
    try:
        render(spec)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
