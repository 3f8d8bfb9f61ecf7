#!/usr/bin/env python3
"""Fixed-budget balance study: oversampling versus power iterations.

With a budget of budget_factor * k matrix-vector products, every feasible
power count q corresponds to a sample size l = floor(budget / (2q+1)). The
script evaluates the budget curve and the realized largest canonical sines
on step-spectrum matrices for a small and a large spectral gap, writing one
CSV and one SVG per gap.
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from rsvdangles.harness import (BalanceConfig, balance_panel, balance_sweep,
                                emit_balance_csv, emit_svg)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="results/balance")
    parser.add_argument("--k", type=int, default=10)
    parser.add_argument("--budget", type=float, default=16.0)
    parser.add_argument("--size-factor", type=float, default=32.0)
    parser.add_argument("--oversample", type=float, default=1.05)
    parser.add_argument("--gaps", type=float, nargs="+", default=[1.01, 1.5])
    parser.add_argument("--trials", type=int, default=5)
    parser.add_argument("--seed", type=int, default=3)
    args = parser.parse_args()

    os.makedirs(args.outdir, exist_ok=True)
    for gap in args.gaps:
        cfg = BalanceConfig(k=args.k, budget_factor=args.budget,
                            tail_factor=args.size_factor,
                            oversample_factor=args.oversample, gap=gap,
                            trials=args.trials, seed=args.seed)
        rows = balance_sweep(cfg)
        tag = f"balance_k{cfg.k}_gap{gap:g}"
        emit_balance_csv(rows, os.path.join(args.outdir, f"{tag}.csv"))
        emit_svg(balance_panel(rows), os.path.join(args.outdir, f"{tag}.svg"))
        best = min({r["q"]: r["phi"] for r in rows}.items(), key=lambda kv: kv[1])
        print(f"gap {gap:g}: best q = {best[0]} (curve value {best[1]:.4g})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
