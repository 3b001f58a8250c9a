"""Command line for figure rendering: render --kind vehicle --in run.csv --out fig.png"""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, PlotJob, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hal-render",
                                 description="render figures from hal run CSVs")
    ap.add_argument("--kind", required=True, choices=KINDS)
    ap.add_argument("--in", dest="inputs", required=True, action="append",
                    help="input trajectory CSV (repeatable)")
    ap.add_argument("--out", required=True, help="output image path")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    job = PlotJob(kind=args.kind, inputs=args.inputs, output=args.out)
    try:
        out = render(job)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
