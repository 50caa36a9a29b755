#!/usr/bin/env python3
"""Run the two desk-scale experiments (20 users, 25 RBs) and print the
results: the learning study (trained controller vs fixed beta=1 on
held-out fading) and the policy-ordering study (Table-II-style delay
comparison across PF / LDF / M-LWDF / beta-M-LWDF).

Usage:
  python scripts/desk_study.py [--seeds 1 2 3] [--eval-steps 50000]
"""

import argparse

from fairsched.study import (ordering_seeds, run_learning_study,
                             run_ordering_study)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, nargs="+", default=[1, 2, 3],
                        help="seeds for the learning study")
    parser.add_argument("--train-steps", type=int, default=20_000)
    parser.add_argument("--eval-steps", type=int, default=50_000,
                        help="evaluation horizon of the ordering study")
    parser.add_argument("--skip-ordering", action="store_true")
    args = parser.parse_args()

    print("== learning study (near-capacity cell, sigma=3 dB) ==")
    for seed in args.seeds:
        res = run_learning_study(seed, train_steps=args.train_steps)
        verdict = ("PASS" if res.trained_ff_pct >= 60.0
                   and res.trained_ff_pct > res.fixed_beta1_ff_pct else "FAIL")
        print(f"  seed {seed}: s_cbr={res.s_cbr}B  "
              f"trained FF={res.trained_ff_pct:6.2f}%  "
              f"fixed beta=1 FF={res.fixed_beta1_ff_pct:6.2f}%  [{verdict}]")

    if args.skip_ordering:
        return 0

    print("== ordering study (LDF-stable cell, sigma=8 dB) ==")
    for seed in ordering_seeds(3):
        res = run_ordering_study(seed, eval_steps=args.eval_steps,
                                 train_steps=args.train_steps)
        a, mx = res.avg_delay_ms, res.max_user_delay_ms
        verdict = ("PASS" if res.ordering_holds() and res.max_user_improves()
                   else "MISS")
        print(f"  seed {seed}: s_cbr={res.s_cbr}B  avg delay (ms): "
              f"pf={a['pf']:.1f} ldf={a['ldf']:.1f} "
              f"beta-mlwdf={a['beta-mlwdf']:.1f} mlwdf={a['mlwdf']:.1f}  "
              f"max-user: beta={mx['beta-mlwdf']:.1f} vs "
              f"mlwdf={mx['mlwdf']:.1f}  [{verdict}]")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
