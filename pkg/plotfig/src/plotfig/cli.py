"""plotfig <curve.csv> --mode loglog --out fig.png"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import FigureSpec, SchemaError, render


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="plotfig",
        description="Render a correlation-decay figure from a curve CSV.")
    ap.add_argument("csv", type=Path, help="curve CSV with embedded config header")
    ap.add_argument("--mode", choices=("loglog", "linear"), default="loglog")
    ap.add_argument("--out", type=Path, required=True, help="output image (png/svg)")
    ap.add_argument("--caption", default=None, help="override the auto caption")
    args = ap.parse_args(argv)
    try:
        result = render(FigureSpec(csv_path=args.csv, out_path=args.out,
                                   mode=args.mode, caption=args.caption))
    except (SchemaError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {result.out_path} (fitted slope {result.slope:.3f}, "
          f"{result.n_points} points)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
