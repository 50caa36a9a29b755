#!/usr/bin/env python3
"""Sweep fixed beta values on the desk-scale cell and report the fairness
case mix and delays per beta. Useful for locating the feasible-fair window
of a given seed/load before training.

Usage:
  python scripts/beta_sweep.py [--seed 1] [--betas 0.5 1 2 3 5] [--rho 0.95]
"""

import argparse

from fairsched.sim import run
from fairsched.study import (LEARN_SIGMA_DB, calibrated_s_cbr, desk_config,
                             probe_capacity)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--betas", type=float, nargs="+",
                        default=[0.5, 1.0, 2.0, 3.0, 5.0])
    parser.add_argument("--rho", type=float, default=0.95,
                        help="offered load relative to probed capacity")
    parser.add_argument("--steps", type=int, default=10_000)
    parser.add_argument("--sigma", type=float, default=LEARN_SIGMA_DB)
    args = parser.parse_args()

    cap = probe_capacity(args.seed, "mlwdf", args.sigma)
    s_cbr = calibrated_s_cbr(cap, args.rho)
    print(f"seed={args.seed} probed capacity={cap:.0f} bits/TTI -> "
          f"s_cbr={s_cbr}B at rho={args.rho}")
    for beta in args.betas:
        cfg = desk_config(args.seed, "beta-mlwdf", s_cbr, args.steps,
                          args.sigma, agent_enabled=False, beta=beta)
        metrics, sim = run(cfg)
        pct = metrics.case_percentages()
        summary = metrics.summarize(sim.summary_meta())
        print(f"  beta={beta:5.2f}  FF={pct['FF']:6.2f}%  UF={pct['UF']:6.2f}%  "
              f"OF={pct['OF']:6.2f}%  avg delay={summary['avg_delay_ms']:8.1f} ms")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
