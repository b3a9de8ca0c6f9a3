"""figures <kind> --in FILE [FILE ...] --out IMAGE [--label ...]"""

import argparse
import sys

from .render import KINDS, FigureSpec, render
from .schemas import SchemaError


def build_parser():
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Regenerate figures from entropydg output files")
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        p = sub.add_parser(kind)
        p.add_argument("--in", dest="inputs", nargs="+", required=True,
                       help="input table(s) in the documented schema")
        p.add_argument("--out", required=True, help="output image path")
        p.add_argument("--label", action="append", default=[],
                       help="series label (repeatable)")
        p.add_argument("--title", default="")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    spec = FigureSpec(kind=args.kind, inputs=args.inputs, output=args.out,
                      labels=args.label, title=args.title)
    try:
        render(spec)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
