"""Command line: `plots render --spec <figure-spec.json>`."""
from __future__ import annotations

import argparse
import sys

from .render import FigureSpec, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plots")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render")
    p.add_argument("--spec", required=True, help="JSON figure specification")
    args = parser.parse_args(argv)
    try:
        spec = FigureSpec.from_json(args.spec)
        annotations = render(spec)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {spec.output_image} and {spec.annotations_path()} "
          f"({len(annotations['curves'])} curves)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
