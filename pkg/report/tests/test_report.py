import json
import subprocess
import sys
from pathlib import Path

import pytest

from fairsched_report.cli import main
from fairsched_report.inputs import (ReportInput, SchemaError, load_input)
from fairsched_report.plots import build_cdf_figure
from fairsched_report.tables import case_table_rows, render_case_table


def write_synthetic_dir(tmp_path: Path) -> Path:
    """A minimal directory conforming to the documented file formats."""
    d = tmp_path / "run"
    d.mkdir()
    cdf_lines = ["w,F,policy"]
    for i in range(11):
        w = 0.5 + i / 10.0
        cdf_lines.append(f"{w},{w - 0.5},requirement")
    for i in range(5):
        cdf_lines.append(f"{0.4 + 0.3 * i},{(i + 1) / 5},pf")
        cdf_lines.append(f"{0.6 + 0.2 * i},{(i + 1) / 5},mlwdf")
    (d / "cdf.csv").write_text("\n".join(cdf_lines) + "\n")
    (d / "compare.csv").write_text(
        "policy,avg_delay_ms,max_user_delay_ms,ff_pct,uf_pct,of_pct\n"
        "pf,1228.3,3964.5,10.0,90.0,0.0\n"
        "mlwdf,37.3,134.0,55.25,44.5,0.25\n")
    (d / "summary_pf.json").write_text(json.dumps({
        "schema_version": 1, "policy": "pf", "lambda": 0.2, "psi": 0.1,
        "xi": 0.1, "avg_delay_ms": 1228.3, "max_user_delay_ms": 3964.5,
        "ff_pct": 10.0, "uf_pct": 90.0, "of_pct": 0.0}))
    return d


class TestInputs:
    def test_load_synthetic(self, tmp_path):
        data = load_input(write_synthetic_dir(tmp_path))
        assert set(data.policies) == {"pf", "mlwdf"}
        assert data.fairness_params() == (0.2, 0.1, 0.1)
        assert len(data.compare_rows) == 2

    def test_missing_dir(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_input(tmp_path / "nope")

    def test_empty_dir(self, tmp_path):
        (tmp_path / "empty").mkdir()
        with pytest.raises(FileNotFoundError):
            load_input(tmp_path / "empty")

    def test_bad_cdf_schema(self, tmp_path):
        d = tmp_path / "bad"
        d.mkdir()
        (d / "cdf.csv").write_text("a,b\n1,2\n")
        with pytest.raises(SchemaError):
            load_input(d)

    def test_bad_summary_version(self, tmp_path):
        d = tmp_path / "bad2"
        d.mkdir()
        (d / "summary.json").write_text('{"schema_version": 99}')
        with pytest.raises(SchemaError):
            load_input(d)


class TestFigure:
    def test_requirement_line_and_policy_curves(self, tmp_path):
        data = load_input(write_synthetic_dir(tmp_path))
        fig = build_cdf_figure(data)
        labels = [line.get_label() for line in fig.axes[0].lines]
        assert "requirement" in labels
        for policy in data.policies:
            assert policy in labels
        req = next(line for line in fig.axes[0].lines
                   if line.get_label() == "requirement")
        xs, ys = req.get_xdata(), req.get_ydata()
        pts = set(zip(map(float, xs), map(float, ys)))
        assert (0.5, 0.0) in pts and (1.5, 1.0) in pts

    def test_empty_policy_list_renders_requirement_only(self, tmp_path):
        d = tmp_path / "req_only"
        d.mkdir()
        lines = ["w,F,policy"] + [f"{0.5 + i / 10},{i / 10},requirement"
                                  for i in range(11)]
        (d / "cdf.csv").write_text("\n".join(lines) + "\n")
        data = load_input(d)
        fig = build_cdf_figure(data)
        labels = [line.get_label() for line in fig.axes[0].lines]
        assert "requirement" in labels


class TestTables:
    def test_case_rows_from_compare(self, tmp_path):
        data = load_input(write_synthetic_dir(tmp_path))
        key, rows = case_table_rows(data)
        assert key == "policy"
        for r in rows:
            assert abs(r["ff"] + r["uf"] + r["of"] - 100.0) <= 0.1

    def test_psi_sweep_layout(self):
        summaries = [
            {"schema_version": 1, "psi": 0.1, "avg_delay_ms": 53.6,
             "max_user_delay_ms": 95.0, "ff_pct": 90.47, "uf_pct": 6.60,
             "of_pct": 2.93},
            {"schema_version": 1, "psi": 0.15, "avg_delay_ms": 47.03,
             "max_user_delay_ms": 90.0, "ff_pct": 86.68, "uf_pct": 12.91,
             "of_pct": 0.41},
        ]
        data = ReportInput(in_dir=Path("."), summaries=summaries)
        key, rows = case_table_rows(data)
        assert key == "psi"
        text = render_case_table(key, rows)
        assert "| psi |" in text
        assert "| 10% | 53.6 | 90.47 | 6.60 | 2.93 |" in text


class TestCli:
    def test_renders_synthetic_dir(self, tmp_path):
        in_dir = write_synthetic_dir(tmp_path)
        out_dir = tmp_path / "out"
        rc = main(["--in", str(in_dir), "--out", str(out_dir),
                   "--format", "svg"])
        assert rc == 0
        assert (out_dir / "cdf_comparison.svg").exists()
        assert (out_dir / "tables.md").exists()

    def test_read_only_on_inputs(self, tmp_path):
        in_dir = write_synthetic_dir(tmp_path)
        before = {p.name: p.read_bytes() for p in in_dir.iterdir()}
        main(["--in", str(in_dir), "--out", str(tmp_path / "o")])
        after = {p.name: p.read_bytes() for p in in_dir.iterdir()}
        assert before == after

    def test_deterministic_svg(self, tmp_path):
        in_dir = write_synthetic_dir(tmp_path)
        blobs = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert main(["--in", str(in_dir), "--out", str(out)]) == 0
            blobs.append((out / "cdf_comparison.svg").read_bytes())
        assert blobs[0] == blobs[1]

    def test_missing_input_fails(self, tmp_path, capsys):
        rc = main(["--in", str(tmp_path / "nope"), "--out",
                   str(tmp_path / "o")])
        assert rc == 1
        assert "error" in capsys.readouterr().err


TINY_CFG = """
n_users = 4
n_rbs = 6
s_cbr_bytes = 150
steps = 150
warmup_ttis = 10
subsample_every = 5
seed = 3
replay_capacity = 500
batch_size = 8
"""


def run_fairsched(args, cwd):
    cmd = [sys.executable, "-m", "fairsched.cli", *args]
    return subprocess.run(cmd, cwd=cwd, capture_output=True, text=True)


class TestAcceptanceSecondary:
    def test_end_to_end_report_from_simulator_outputs(self, tmp_path):
        """Consume a real compare + export-cdf directory: the figure must
        carry the requirement line through (0.5,0)-(1.5,1) and one curve
        per policy; the case table rows must sum to 100 +- 0.1."""
        pytest.importorskip("fairsched")
        cfg = tmp_path / "tiny.cfg"
        cfg.write_text(TINY_CFG)
        train_dir = tmp_path / "train"
        cmp_dir = tmp_path / "cmp"
        for args in (
            ["train", "--config", str(cfg), "--out", str(train_dir)],
            ["compare", "--config", str(cfg), "--checkpoint",
             str(train_dir / "checkpoint.json"), "--out", str(cmp_dir)],
            ["export-cdf", "--config", str(cfg), "--out", str(cmp_dir)],
        ):
            proc = run_fairsched(args, tmp_path)
            assert proc.returncode == 0, proc.stderr

        out_dir = tmp_path / "report"
        rc = main(["--in", str(cmp_dir), "--out", str(out_dir),
                   "--format", "svg"])
        assert rc == 0

        data = load_input(cmp_dir)
        fig = build_cdf_figure(data)
        labels = [line.get_label() for line in fig.axes[0].lines]
        assert "requirement" in labels
        req = next(line for line in fig.axes[0].lines
                   if line.get_label() == "requirement")
        pts = set(zip(map(float, req.get_xdata()), map(float, req.get_ydata())))
        assert (0.5, 0.0) in pts and (1.5, 1.0) in pts
        for policy in ("pf", "ldf", "mlwdf", "beta-mlwdf"):
            assert policy in labels

        table = (out_dir / "tables.md").read_text()
        case_lines = [ln for ln in table.splitlines()
                      if ln.startswith("|") and "time" not in ln
                      and "---" not in ln and "Av. delay" not in ln]
        policy_rows = [ln for ln in case_lines
                       if any(p in ln for p in ("pf", "ldf", "mlwdf"))
                       and ln.count("|") == 6]
        assert len(policy_rows) >= 4
        for ln in policy_rows:
            cells = [c.strip() for c in ln.strip("|").split("|")]
            ff, uf, of = map(float, cells[2:5])
            assert abs(ff + uf + of - 100.0) <= 0.1
        print("ACCEPTANCE report end-to-end: PASS "
              f"({len(policy_rows)} policy rows, figure + tables rendered)")
