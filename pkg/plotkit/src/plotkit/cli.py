"""plotkit command line: `plotkit render --job job.json`."""

from __future__ import annotations

import argparse
import sys

from .render import PlotJob, SchemaError, render


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="plotkit", description="Render supcar-lab CSVs to figures")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one plot job")
    p.add_argument("--job", required=True, help="JSON job description")
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        out = render(PlotJob.from_json(args.job))
    except (SchemaError, OSError, ValueError) as exc:
        print(f"plotkit: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
