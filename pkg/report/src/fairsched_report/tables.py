"""Text/markdown tables in the reference layouts: the per-policy delay
table and the fairness-case time-percentage table."""

from __future__ import annotations

from .inputs import ReportInput


def delay_table_rows(data: ReportInput) -> list[dict]:
    if data.compare_rows:
        return [{"label": r["policy"], "avg": r["avg_delay_ms"],
                 "max": r["max_user_delay_ms"]} for r in data.compare_rows]
    return [{"label": s.get("policy", "run"), "avg": s["avg_delay_ms"],
             "max": s["max_user_delay_ms"]} for s in data.summaries]


def case_table_rows(data: ReportInput) -> tuple[str, list[dict]]:
    """Rows keyed by psi when sweeping outlier fractions, else by policy."""
    if data.compare_rows:
        rows = data.compare_rows
        return "policy", [{"label": r["policy"], "avg": r["avg_delay_ms"],
                           "ff": r["ff_pct"], "uf": r["uf_pct"],
                           "of": r["of_pct"]} for r in rows]
    psis = {s.get("psi") for s in data.summaries}
    key = "psi" if len(psis) > 1 else "policy"
    out = []
    for s in data.summaries:
        label = (f"{100 * s['psi']:.0f}%" if key == "psi"
                 else s.get("policy", "run"))
        out.append({"label": label, "avg": s["avg_delay_ms"],
                    "ff": s["ff_pct"], "uf": s["uf_pct"], "of": s["of_pct"]})
    return key, out


def render_delay_table(rows: list[dict]) -> str:
    lines = ["| Algorithm | Average delay (ms) | Max. average delay (ms) |",
             "|---|---|---|"]
    for r in rows:
        lines.append(f"| {r['label']} | {r['avg']:.1f} | {r['max']:.1f} |")
    return "\n".join(lines) + "\n"


def render_case_table(key: str, rows: list[dict]) -> str:
    header = "psi" if key == "psi" else "Policy"
    lines = [f"| {header} | Av. delay (ms) | FF time (%) | UF time (%) "
             f"| OF time (%) |",
             "|---|---|---|---|---|"]
    for r in rows:
        lines.append(f"| {r['label']} | {r['avg']:.1f} | {r['ff']:.2f} "
                     f"| {r['uf']:.2f} | {r['of']:.2f} |")
    return "\n".join(lines) + "\n"


def render_tables(data: ReportInput, out_dir) -> list:
    """Write tables.md with both tables; returns the created paths."""
    parts = []
    delay_rows = delay_table_rows(data)
    if delay_rows:
        parts.append("## Average delay\n\n" + render_delay_table(delay_rows))
    key, case_rows = case_table_rows(data)
    if case_rows:
        parts.append("## Time in fairness cases\n\n"
                     + render_case_table(key, case_rows))
    if not parts:
        raise ValueError("nothing to tabulate: no compare.csv or summaries")
    path = out_dir / "tables.md"
    path.write_text("\n".join(parts))
    return [path]
