"""Report entry point: `report --in DIR --out DIR --format svg|png`.

Reads a fairsched output directory (compare + export-cdf artifacts) and
renders the normalized-delay CDF figure and the summary tables. Strictly
read-only on the input directory.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .inputs import SchemaError, load_input
from .plots import plot_cdf
from .tables import render_tables


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="report",
        description="Render figures and tables from fairsched outputs")
    parser.add_argument("--in", dest="in_dir", type=Path, required=True,
                        help="directory with cdf.csv / compare.csv / summary*.json")
    parser.add_argument("--out", dest="out_dir", type=Path, required=True)
    parser.add_argument("--format", choices=("svg", "png"), default="svg")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        data = load_input(args.in_dir)
        args.out_dir.mkdir(parents=True, exist_ok=True)
        written = []
        written += plot_cdf(data, args.out_dir, args.format)
        written += render_tables(data, args.out_dir)
    except (OSError, SchemaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
