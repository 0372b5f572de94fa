"""CLI: ``plot --kind <kind> --in <csv> --out <img> [--force]``."""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, PlotError, PlotSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="buoyquad-plot",
        description="Render figures from buoyquad trace/summary CSVs",
    )
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--in", dest="input_path", required=True, metavar="CSV")
    parser.add_argument("--out", dest="output_path", required=True, metavar="IMG")
    parser.add_argument("--force", action="store_true",
                        help="overwrite an existing output file")
    parser.add_argument("--title", default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = PlotSpec(
            kind=args.kind,
            input_path=args.input_path,
            output_path=args.output_path,
            force=args.force,
            title=args.title,
        )
        out = render(spec)
    except (PlotError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
