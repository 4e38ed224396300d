"""Command line entry point.

Usage::

    zmap-plot --kind <spin-map|spin-osc|band-sweep|bias-sweep>
              --in <csv> [--in2 <csv>] --out <png|svg>
              [--title T] [--dpi N] [--no-crossing-markers]

Exit codes: 0 success, 2 bad input (unreadable file, schema mismatch,
unsupported output format).
"""

from __future__ import annotations

import argparse
import sys

from .errors import PlotError
from .figures import FigureSpec, render
from .reader import KIND_COLUMNS

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zmap-plot",
        description="Render figures from zmap-lab CSV artifacts.",
    )
    parser.add_argument("--kind", required=True, choices=tuple(KIND_COLUMNS))
    parser.add_argument("--in", dest="in_path", required=True,
                        help="input CSV artifact")
    parser.add_argument("--in2", dest="in2_path", default=None,
                        help="second CSV to overlay (spin-osc only)")
    parser.add_argument("--out", required=True, help="output image (.png or .svg)")
    parser.add_argument("--title", default=None)
    parser.add_argument("--dpi", type=int, default=150)
    parser.add_argument("--no-crossing-markers", action="store_true",
                        help="suppress phase-crossing lines on band sweeps")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        spec = FigureSpec(
            kind=args.kind,
            in_path=args.in_path,
            in2_path=args.in2_path,
            out_path=args.out,
            title=args.title,
            dpi=args.dpi,
            crossing_markers=not args.no_crossing_markers,
        )
        path = render(spec)
    except (PlotError, ValueError, OSError) as exc:
        print(f"zmap-plot: error: {exc}", file=sys.stderr)
        return 2
    print(f"zmap-plot: wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
