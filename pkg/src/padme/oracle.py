"""Exact expected information-packet loss of a cycle plan, and the best action under it."""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import numpy as np

from padme.wrr import PathWeights, SchedulingClass, build_cycle_plan


@lru_cache(maxsize=4096)
def plan_incidence(cls: SchedulingClass, weights: PathWeights, K: int) -> np.ndarray:
    inc = build_cycle_plan(cls, weights, K).incidence()
    inc.setflags(write=False)
    return inc


def analytic_info_loss(cls: SchedulingClass, weights: PathWeights, plrs: Sequence[float], K: int) -> float:
    """Mean over the plan's rounds of the product of loss probabilities of the paths used.

    Assumes losses are independent across paths.
    """
    p = np.asarray(plrs, dtype=np.float64)
    inc = plan_incidence(cls, weights, K)
    if p.shape != (inc.shape[1],):
        raise ValueError(f"expected {inc.shape[1]} loss rates, got {p.shape}")
    return float(np.prod(np.where(inc, p, 1.0), axis=1).mean())


def ordering_matches(omega: Sequence[int], plrs: Sequence[float], tol: float = 1e-6) -> bool:
    """True if every strictly lower-loss path carries a strictly higher weight."""
    m = len(omega)
    for i in range(m):
        for j in range(m):
            if plrs[i] < plrs[j] - tol and not omega[i] > omega[j]:
                return False
    return True
