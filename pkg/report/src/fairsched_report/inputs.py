"""Schema-checked loading of fairsched output directories.

Consumed files (all produced by the simulator CLI):
  cdf.csv            columns w, F, policy; includes the `requirement`
                     pseudo-policies alongside real policy curves
  compare.csv        columns policy, avg_delay_ms, max_user_delay_ms,
                     ff_pct, uf_pct, of_pct
  summary*.json      schema_version 1 aggregate blocks
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

REQUIREMENT_POLICIES = ("requirement", "requirement+xi", "requirement-xi")

CDF_COLUMNS = {"w", "F", "policy"}
COMPARE_COLUMNS = {"policy", "avg_delay_ms", "max_user_delay_ms",
                   "ff_pct", "uf_pct", "of_pct"}
SUMMARY_SCHEMA_VERSION = 1


class SchemaError(ValueError):
    pass


@dataclass
class ReportInput:
    """Parsed contents of one simulation output directory."""

    in_dir: Path
    cdf_curves: dict[str, list[tuple[float, float]]] = field(default_factory=dict)
    compare_rows: list[dict] = field(default_factory=list)
    summaries: list[dict] = field(default_factory=list)

    @property
    def policies(self) -> list[str]:
        return [p for p in self.cdf_curves if p not in REQUIREMENT_POLICIES]

    def fairness_params(self) -> tuple[float, float, float]:
        """(lambda, psi, xi) from the first summary; paper defaults if the
        directory has no summaries."""
        for s in self.summaries:
            return (float(s.get("lambda", 0.2)), float(s.get("psi", 0.1)),
                    float(s.get("xi", 0.1)))
        return 0.2, 0.1, 0.1


def load_cdf(path: Path) -> dict[str, list[tuple[float, float]]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or set(reader.fieldnames) != CDF_COLUMNS:
            raise SchemaError(f"{path}: expected columns {sorted(CDF_COLUMNS)}, "
                              f"got {reader.fieldnames}")
        curves: dict[str, list[tuple[float, float]]] = {}
        for row in reader:
            curves.setdefault(row["policy"], []).append(
                (float(row["w"]), float(row["F"])))
    for pts in curves.values():
        pts.sort()
    return curves


def load_compare(path: Path) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or set(reader.fieldnames) != COMPARE_COLUMNS:
            raise SchemaError(f"{path}: expected columns {sorted(COMPARE_COLUMNS)}, "
                              f"got {reader.fieldnames}")
        rows = []
        for row in reader:
            rows.append({"policy": row["policy"],
                         **{k: float(row[k]) for k in COMPARE_COLUMNS
                            if k != "policy"}})
        return rows


def load_summary(path: Path) -> dict:
    data = json.loads(path.read_text())
    if data.get("schema_version") != SUMMARY_SCHEMA_VERSION:
        raise SchemaError(f"{path}: unsupported schema_version "
                          f"{data.get('schema_version')!r}")
    return data


def load_input(in_dir) -> ReportInput:
    """Gather whatever recognized files the directory holds; at least one
    of cdf.csv / compare.csv / summary*.json must parse."""
    in_dir = Path(in_dir)
    if not in_dir.is_dir():
        raise FileNotFoundError(f"input directory {in_dir} does not exist")
    out = ReportInput(in_dir=in_dir)
    cdf_path = in_dir / "cdf.csv"
    if cdf_path.exists():
        out.cdf_curves = load_cdf(cdf_path)
    compare_path = in_dir / "compare.csv"
    if compare_path.exists():
        out.compare_rows = load_compare(compare_path)
    for path in sorted(in_dir.glob("summary*.json")):
        out.summaries.append(load_summary(path))
    if not (out.cdf_curves or out.compare_rows or out.summaries):
        raise FileNotFoundError(
            f"{in_dir}: no cdf.csv, compare.csv or summary*.json found")
    return out
