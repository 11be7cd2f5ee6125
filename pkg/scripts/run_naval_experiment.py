#!/usr/bin/env python3
"""Cross-validated maritime experiment over a range of ensemble sizes.

Generates a synthetic maritime-surveillance dataset and prints one report
row per ensemble size, in the same column layout the CLI uses.

Example:
    python scripts/run_naval_experiment.py --count-per-class 100 --noise 0 \
        --trees 1 2 3 --seed 7
"""

import argparse
import sys
import time

import numpy as np

from stlboost import NavalConfig, PsoConfig, TreeConfig, generate_naval
from stlboost.cli import _fmt_duration, run_cross_validation


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count-per-class", type=int, default=100)
    parser.add_argument("--noise", type=float, default=0.0)
    parser.add_argument("--trees", type=int, nargs="+", default=[1, 2, 3])
    parser.add_argument("--max-depth", type=int, default=3)
    parser.add_argument("--folds", type=int, default=5)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--pso-swarm", type=int, default=24)
    parser.add_argument("--pso-iters", type=int, default=30)
    args = parser.parse_args()

    dataset = generate_naval(
        NavalConfig(count_per_class=args.count_per_class, noise=args.noise, seed=args.seed)
    )
    config = TreeConfig(
        max_depth=args.max_depth,
        pso=PsoConfig(swarm_size=args.pso_swarm, iterations=args.pso_iters),
    )
    print(f"dataset: {len(dataset)} signals, T={dataset.horizon}, noise={args.noise}")
    print("K, TR-M, TR-S, TE-M, TE-S, R, CT")
    for trees in args.trees:
        started = time.perf_counter()
        outcomes, _ = run_cross_validation(
            dataset, trees=trees, config=config, m_weight=100.0,
            folds=args.folds, seed=args.seed,
        )
        runtime = time.perf_counter() - started
        tr = 100 * np.mean([o.train_mcr for o in outcomes])
        tr_s = 100 * np.std([o.train_mcr for o in outcomes])
        te = 100 * np.mean([o.test_mcr for o in outcomes])
        te_s = 100 * np.std([o.test_mcr for o in outcomes])
        merges = sum(o.merges for o in outcomes)
        print(f"{trees}, {tr:.2f}, {tr_s:.2f}, {te:.2f}, {te_s:.2f}, "
              f"{_fmt_duration(runtime)}, {merges}")
        for outcome in outcomes:
            print(f"    fold {outcome.fold}: {outcome.final_formula}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
