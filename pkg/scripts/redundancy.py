"""Chosen average redundancy over time against the analytic optimum.

    python scripts/redundancy.py --plrs 0.01,0.03,0.05 --seeds 5
"""

import argparse
from pathlib import Path

import numpy as np

from padme.evaluation import median_curve, redundancy_decay, run_seeds
from padme.harness import ExperimentConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--plrs", default="0.01,0.03,0.05")
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--iterations", type=int, default=150)
    ap.add_argument("--out-dir", type=Path, default=Path("results/redundancy"))
    args = ap.parse_args()
    plrs = [float(x) for x in args.plrs.split(",")]

    runs = run_seeds(ExperimentConfig(loss_probs=plrs, iterations=args.iterations), range(args.seeds))
    curve = median_curve(runs, "f_bar")
    args.out_dir.mkdir(parents=True, exist_ok=True)
    np.savetxt(args.out_dir / "median_f_bar.csv", np.column_stack([np.arange(1, len(curve) + 1), curve]),
               delimiter=",", header="iteration,median_f_bar", comments="", fmt=["%d", "%.4f"])
    d = redundancy_decay(runs, plrs)
    print(f"mean f_bar: first 10 {d.early:.3f}, last 50 {d.late:.3f}, optimum {d.optimal}")


if __name__ == "__main__":
    main()
