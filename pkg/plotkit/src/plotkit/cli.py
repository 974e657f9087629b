"""Figure rendering entry point.

    possim-render <figure-id> --in <csv...> --out <path> [--mark X]
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import FIGURE_IDS, FigureSpec, RenderError, render


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="possim-render",
                                description="render possim figures from CSV datasets")
    p.add_argument("figure_id", choices=FIGURE_IDS)
    p.add_argument("--in", dest="inputs", nargs="+", required=True,
                   help="input CSV path(s)")
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument("--xlabel", default="")
    p.add_argument("--ylabel", default="")
    p.add_argument("--mark", type=float, default=None,
                   help="x-position of the data marker (fig2); defaults to the contour peak")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(
        figure_id=args.figure_id,
        inputs=tuple(Path(x) for x in args.inputs),
        output=Path(args.out),
        xlabel=args.xlabel,
        ylabel=args.ylabel,
        mark=args.mark,
    )
    try:
        out = render(spec)
    except RenderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    print(f"render {args.figure_id} out={out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
