"""Multi-seed trend statistics for the learning-curve experiments.

Iterations are numbered from 1 in everything returned here.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from padme.harness import ExperimentConfig, IterationRecord, optimal_action, run_experiment

HETEROGENEOUS = [0.01, 0.03, 0.05]
UNIFORM_1 = [0.01, 0.01, 0.01]
UNIFORM_3 = [0.03, 0.03, 0.03]


def run_seeds(base: ExperimentConfig, seeds: Sequence[int]) -> list[list[IterationRecord]]:
    return [run_experiment(replace(base, seed=s, out=None)) for s in seeds]


def median_curve(runs: list[list[IterationRecord]], attr: str) -> np.ndarray:
    values = np.array([[getattr(r, attr) if hasattr(r, attr) else getattr(r.report, attr) for r in run]
                       for run in runs])
    return np.median(values, axis=0)


@dataclass
class ConvergenceResult:
    final_value: float
    target: float
    first_reach: int | None     # first iteration with curve >= target
    initial_value: float = 0.0

    @property
    def improved(self) -> bool:
        return self.final_value > self.initial_value

    def passed(self, by: int) -> bool:
        # a flat curve trivially "reaches" its own level; require actual learning
        return self.improved and self.first_reach is not None and self.first_reach <= by


def convergence(runs, final_span: int = 10, fraction: float = 0.9) -> ConvergenceResult:
    """When the median windowed return first reaches ``fraction`` of its final level.

    The final level is the mean of the median curve over the last ``final_span``
    iterations; the target is ``final - (1 - fraction) * |final|`` so negative
    levels are handled too. The initial level is the mean over the first
    ``final_span`` iterations; a run only passes if it ends above that.
    """
    curve = median_curve(runs, "windowed_return")
    final = float(curve[-final_span:].mean())
    target = final - (1.0 - fraction) * abs(final)
    hits = np.flatnonzero(curve >= target)
    initial = float(curve[:final_span].mean())
    return ConvergenceResult(final, target, int(hits[0]) + 1 if hits.size else None, initial)


def settle_iteration(curve: np.ndarray, threshold: float) -> int | None:
    """First iteration from which ``curve`` never exceeds ``threshold`` again.

    Same convention as the reward: a rate equal to the threshold meets it.
    """
    above = np.flatnonzero(curve > threshold)
    if above.size == 0:
        return 1
    last = int(above[-1]) + 1
    return last + 1 if last < len(curve) else None


def threshold_attainment(runs, threshold: float = 0.005) -> int | None:
    return settle_iteration(median_curve(runs, "info_loss_rate"), threshold)


@dataclass
class DecayResult:
    early: float
    late: float
    optimal: float

    @property
    def decays(self) -> bool:
        return self.late < self.early

    @property
    def gap(self) -> float:
        return abs(self.late - self.optimal)


def redundancy_decay(runs, true_plrs, threshold: float = 0.005, K: int = 100,
                     early: int = 10, late: int = 50) -> DecayResult:
    """Median over seeds of the mean chosen f_bar in the first and last iterations."""
    fb = np.array([[r.f_bar for r in run] for run in runs])
    opt = optimal_action(true_plrs, threshold, K).f_bar
    return DecayResult(float(np.median(fb[:, :early].mean(axis=1))),
                       float(np.median(fb[:, -late:].mean(axis=1))), opt)
