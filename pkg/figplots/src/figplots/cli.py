"""figplots <figure_id> --data <dir> --out <path>"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .io import FigplotsError
from .panels import FIGURE_CLASSES, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="figplots",
        description="Render scully-lamb figure classes from CSV run artifacts.",
    )
    parser.add_argument("figure_id", choices=sorted(FIGURE_CLASSES))
    parser.add_argument("--data", required=True, type=Path, help="run artifact directory")
    parser.add_argument("--out", required=True, type=Path, help="output image path")
    args = parser.parse_args(argv)
    try:
        fig = render(args.figure_id, args.data)
    except FigplotsError as exc:
        print(f"figplots error: {exc}", file=sys.stderr)
        return 2
    args.out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(args.out, dpi=150)
    print(f"{args.figure_id} -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
