"""Command-line entry point.

Subcommands:
  train       train the beta controller, write checkpoint + metrics
  eval        run one policy (greedy agent for beta-mlwdf) and log metrics
  compare     run all four policies on identical derived seeds
  export-cdf  turn logged normalized-delay samples into CDF curves

The FAIRSCHED_LOG environment variable sets log verbosity (DEBUG, INFO,
WARNING, ...).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .agent import AgentCore, load_checkpoint, save_checkpoint
from .config import SimConfig, load_config
from .sched import POLICIES
from .sim import run

log = logging.getLogger("fairsched.cli")

COMPARE_COLUMNS = ("policy", "avg_delay_ms", "max_user_delay_ms",
                   "ff_pct", "uf_pct", "of_pct")


def _setup_logging() -> None:
    level = os.environ.get("FAIRSCHED_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _load_config(args) -> SimConfig:
    overrides: dict = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if getattr(args, "steps", None) is not None:
        overrides["steps"] = args.steps
    if getattr(args, "policy", None) is not None:
        overrides["policy"] = args.policy
    if args.config is None:
        from .config import config_from_text
        return config_from_text("", overrides)
    return load_config(args.config, overrides)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_run_outputs(out: Path, metrics, sim, suffix: str = "") -> None:
    metrics.write_metrics_csv(out / f"metrics{suffix}.csv")
    metrics.write_samples_csv(out / f"samples{suffix}.csv")
    metrics.write_summary_json(out / f"summary{suffix}.json",
                               sim.summary_meta())


def cmd_train(args) -> int:
    config = _load_config(args)
    if config.scheduler.policy != "beta-mlwdf" or not config.agent_enabled:
        raise ValueError("train requires policy = beta-mlwdf with the agent enabled")
    out = _out_dir(args)
    metrics, sim = run(config, training=True)
    save_checkpoint(sim.agent, out / "checkpoint.json")
    _write_run_outputs(out, metrics, sim)
    return 0


def cmd_eval(args) -> int:
    config = _load_config(args)
    out = _out_dir(args)
    agent_core: AgentCore | None = None
    if config.scheduler.policy == "beta-mlwdf" and config.agent_enabled:
        if args.checkpoint is None:
            raise ValueError("eval of beta-mlwdf needs --checkpoint")
        agent_core = load_checkpoint(args.checkpoint)
    metrics, sim = run(config, training=False, agent_core=agent_core)
    _write_run_outputs(out, metrics, sim)
    return 0


def _with_policy(config: SimConfig, policy: str) -> SimConfig:
    scheduler = dataclasses.replace(config.scheduler, policy=policy)
    return dataclasses.replace(config, scheduler=scheduler)


def cmd_compare(args) -> int:
    """Evaluate all four policies on the same master seed (hence identical
    channel/traffic/error realizations) and tabulate the results."""
    config = _load_config(args)
    if args.checkpoint is None:
        raise ValueError("compare needs --checkpoint for the beta-mlwdf row")
    out = _out_dir(args)
    rows = []
    for policy in POLICIES:
        cfg = _with_policy(config, policy)
        agent_core = (load_checkpoint(args.checkpoint)
                      if policy == "beta-mlwdf" else None)
        metrics, sim = run(cfg, training=False, agent_core=agent_core)
        _write_run_outputs(out, metrics, sim, suffix=f"_{policy}")
        summary = metrics.summarize(sim.summary_meta())
        rows.append({
            "policy": policy,
            "avg_delay_ms": summary["avg_delay_ms"],
            "max_user_delay_ms": summary["max_user_delay_ms"],
            "ff_pct": summary["ff_pct"],
            "uf_pct": summary["uf_pct"],
            "of_pct": summary["of_pct"],
        })
    with open(out / "compare.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=COMPARE_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v)
                             for k, v in row.items()})
    text = _compare_text(rows)
    (out / "compare.txt").write_text(text)
    sys.stdout.write(text)
    return 0


def _compare_text(rows: list[dict]) -> str:
    header = (f"{'policy':<12} {'avg delay (ms)':>15} {'max delay (ms)':>15} "
              f"{'FF %':>7} {'UF %':>7} {'OF %':>7}")
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(
            f"{r['policy']:<12} {r['avg_delay_ms']:>15.1f} "
            f"{r['max_user_delay_ms']:>15.1f} {r['ff_pct']:>7.2f} "
            f"{r['uf_pct']:>7.2f} {r['of_pct']:>7.2f}")
    return "\n".join(lines) + "\n"


def _requirement_grid() -> np.ndarray:
    # integer-divided grid so w = 1.0 is hit exactly
    return np.arange(0, 101) / 100.0 + 0.5


def cmd_export_cdf(args) -> int:
    """Aggregate samples_*.csv in --out into per-policy CDF curves plus the
    requirement line and its +-xi bands (cdf.csv: w, F, policy)."""
    config = _load_config(args)
    out = _out_dir(args)
    sample_files = sorted(out.glob("samples*.csv"))
    if not sample_files:
        raise FileNotFoundError(f"no samples*.csv files under {out}")
    rows: list[tuple[float, float, str]] = []
    for path in sample_files:
        stem = path.stem
        policy = stem[len("samples_"):] if stem.startswith("samples_") else \
            stem[len("samples"):].lstrip("_") or "run"
        values = _read_samples(path)
        if values.size == 0:
            log.warning("no samples in %s; skipping", path)
            continue
        for w, f in _cdf_points(values):
            rows.append((w, f, policy))
    xi = config.fairness.xi
    grid = _requirement_grid()
    for w in grid:
        rows.append((float(w), float(w - 0.5), "requirement"))
    for w in grid:
        rows.append((float(w + xi), float(w - 0.5), "requirement+xi"))
    for w in grid:
        rows.append((float(w - xi), float(w - 0.5), "requirement-xi"))
    with open(out / "cdf.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["w", "F", "policy"])
        for w, f, policy in rows:
            writer.writerow([repr(w), repr(f), policy])
    return 0


def _read_samples(path: Path) -> np.ndarray:
    values = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            values.append(float(row["norm_delay"]))
    return np.asarray(values)


def _cdf_points(values: np.ndarray, max_points: int = 400):
    """Empirical CDF of the pooled samples, thinned to max_points."""
    ordered = np.sort(values)
    n = ordered.size
    idx = np.unique(np.linspace(0, n - 1, min(max_points, n)).astype(int))
    return [(float(ordered[i]), float((i + 1) / n)) for i in idx]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairsched",
        description="OFDMA downlink scheduler simulator with a DQL-tuned "
                    "beta-M-LWDF policy")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, steps=True, policy=False,
               checkpoint=False):
        p.add_argument("--config", type=Path, default=None,
                       help="key=value config file (defaults: reference cell)")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", type=Path, required=True,
                       help="output directory")
        if steps:
            p.add_argument("--steps", type=int, default=None,
                           help="override run length in TTIs")
        if policy:
            p.add_argument("--policy", choices=POLICIES, default=None)
        if checkpoint:
            p.add_argument("--checkpoint", type=Path, default=None,
                           help="agent checkpoint (JSON)")

    p_train = sub.add_parser("train", help="train the beta controller")
    common(p_train)
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("eval", help="evaluate one policy")
    common(p_eval, policy=True, checkpoint=True)
    p_eval.set_defaults(func=cmd_eval)

    p_cmp = sub.add_parser("compare", help="run all four policies")
    common(p_cmp, checkpoint=True)
    p_cmp.set_defaults(func=cmd_compare)

    p_cdf = sub.add_parser("export-cdf",
                           help="export CDF curves from logged samples")
    common(p_cdf, steps=False)
    p_cdf.set_defaults(func=cmd_export_cdf)
    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
