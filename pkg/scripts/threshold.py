"""Median per-interval info loss with every path at 1% and at 3% loss.

    python scripts/threshold.py --seeds 5 --out-dir results/threshold
"""

import argparse
from pathlib import Path

import numpy as np

from padme.evaluation import UNIFORM_1, UNIFORM_3, median_curve, run_seeds, settle_iteration
from padme.harness import ExperimentConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--iterations", type=int, default=150)
    ap.add_argument("--threshold", type=float, default=0.005)
    ap.add_argument("--out-dir", type=Path, default=Path("results/threshold"))
    args = ap.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    columns, header = [], ["iteration"]
    for name, plrs in (("uniform_1pct", UNIFORM_1), ("uniform_3pct", UNIFORM_3)):
        cfg = ExperimentConfig(loss_probs=plrs, iterations=args.iterations, threshold=args.threshold)
        curve = median_curve(run_seeds(cfg, range(args.seeds)), "info_loss_rate")
        columns.append(curve)
        header.append(name)
        print(f"{name}: median info loss stays within {args.threshold} from iteration "
              f"{settle_iteration(curve, args.threshold)}")
    table = np.column_stack([np.arange(1, args.iterations + 1), *columns])
    np.savetxt(args.out_dir / "median_info_loss.csv", table, delimiter=",", header=",".join(header),
               comments="", fmt=["%d"] + ["%.6f"] * len(columns))


if __name__ == "__main__":
    main()
