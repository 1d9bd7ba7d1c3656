"""Script entry point: render one figure kind from a run directory."""

import argparse
import sys
from pathlib import Path

from .render import KINDS, FigureSpec, render
from .schemas import SchemaError


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pulseplots",
        description="Render figures from an eopulse run directory")
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("run_dir", type=Path)
    parser.add_argument("output", type=Path)
    parser.add_argument("--ma-window", type=int, default=5,
                        help="moving-average window for the noise figure")
    parser.add_argument("--marker-step", type=int, default=1,
                        help="draw a marker every k-th weight setting")
    parser.add_argument("--row", type=int, default=0,
                        help="which row's pulses/trajectory to draw")
    args = parser.parse_args(argv)
    try:
        out = render(FigureSpec(args.kind, args.run_dir, args.output,
                                ma_window=args.ma_window,
                                marker_step=args.marker_step, row=args.row))
    except (SchemaError, ValueError, OSError) as exc:
        print(f"pulseplots: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
