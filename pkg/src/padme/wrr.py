"""Scheduling classes and the interleaved weighted round robin.

A cycle carries K information packets in K rounds. Each round sends one
packet plus its replicas over a subset of the m paths. A scheduling class
fixes how many rounds use 1, 2, ..., m replicas; the path weights decide
which paths carry them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class SchedulingClass:
    label: str
    ratios: tuple[float, ...]

    def __post_init__(self):
        if any(r < 0 or r > 1 for r in self.ratios):
            raise ConfigurationError(f"class {self.label}: ratios must lie in [0, 1]")
        if abs(sum(self.ratios) - 1.0) > 1e-12:
            raise ConfigurationError(f"class {self.label}: ratios must sum to 1")

    @property
    def m(self) -> int:
        return len(self.ratios)

    @property
    def f_bar(self) -> float:
        return avg_redundancy(self)


# Ordered by increasing redundancy; the index is the class component of an action.
SCHEDULING_CLASSES: tuple[SchedulingClass, ...] = (
    SchedulingClass("A", (1.0, 0.0, 0.0)),
    SchedulingClass("B", (0.75, 0.25, 0.0)),
    SchedulingClass("C", (0.25, 0.75, 0.0)),
    SchedulingClass("D", (0.0, 1.0, 0.0)),
    SchedulingClass("E", (0.0, 0.75, 0.25)),
    SchedulingClass("F", (0.0, 0.5, 0.5)),
    SchedulingClass("G", (0.0, 0.0, 1.0)),
)

_BY_LABEL = {c.label: c for c in SCHEDULING_CLASSES}


def get_class(label: str) -> SchedulingClass:
    try:
        return _BY_LABEL[label.upper()]
    except KeyError:
        raise ConfigurationError(f"unknown scheduling class {label!r}") from None


@dataclass(frozen=True)
class PathWeights:
    omega: tuple[int, ...]

    def __post_init__(self):
        if not self.omega or any(int(w) != w or w < 1 for w in self.omega):
            raise ConfigurationError(f"WRR weights must be positive integers, got {self.omega}")

    @property
    def m(self) -> int:
        return len(self.omega)


@dataclass(frozen=True)
class CyclePlan:
    """Per-round path subsets for one cycle; ``rounds[k]`` is ordered by descending credit."""

    rounds: tuple[tuple[int, ...], ...]
    m: int

    @property
    def K(self) -> int:
        return len(self.rounds)

    @property
    def replica_counts(self) -> list[int]:
        return [len(r) for r in self.rounds]

    @property
    def transmitted(self) -> int:
        return sum(len(r) for r in self.rounds)

    def path_usage(self) -> np.ndarray:
        counts = np.zeros(self.m, dtype=np.int64)
        for paths in self.rounds:
            counts[list(paths)] += 1
        return counts

    def incidence(self) -> np.ndarray:
        """Boolean K x m matrix, True where a round sends a replica on a path."""
        mat = np.zeros((self.K, self.m), dtype=bool)
        for k, paths in enumerate(self.rounds):
            mat[k, list(paths)] = True
        return mat


def avg_redundancy(cls: SchedulingClass) -> float:
    return float(sum((i + 1) * r for i, r in enumerate(cls.ratios)))


def _round_counts(cls: SchedulingClass, K: int) -> list[int]:
    if K < 1:
        raise ConfigurationError(f"K must be >= 1, got {K}")
    counts = []
    for i, r in enumerate(cls.ratios):
        n = Fraction(r).limit_denominator(10**6) * K
        if n.denominator != 1:
            raise ConfigurationError(
                f"class {cls.label}: r_{i + 1}={r} gives {float(n)} rounds for K={K}; "
                f"K must make every r_i*K integral"
            )
        counts.append(int(n))
    return counts


def replica_sequence(cls: SchedulingClass, K: int) -> list[int]:
    """Spread the class's replica counts evenly over K rounds.

    Smooth weighted round robin over the replica values: every round each
    value earns its multiplicity as credit, the richest value is emitted
    and pays K. Ties go to the larger replica count.
    """
    mult = _round_counts(cls, K)
    credit = [0] * len(mult)
    seq = []
    for _ in range(K):
        for i, n in enumerate(mult):
            credit[i] += n
        best = max((i for i in range(len(mult)) if mult[i]), key=lambda i: (credit[i], i))
        credit[best] -= K
        seq.append(best + 1)
    return seq


def weights_from_permutation(perm: Sequence[int]) -> PathWeights:
    """Map a priority order (highest first) onto the template [m, m-1, ..., 1]."""
    m = len(perm)
    if sorted(perm) != list(range(m)):
        raise ConfigurationError(f"{tuple(perm)} is not a permutation of 0..{m - 1}")
    omega = [0] * m
    for rank, path in enumerate(perm):
        omega[path] = m - rank
    return PathWeights(tuple(omega))


def build_cycle_plan(cls: SchedulingClass, weights: PathWeights, K: int) -> CyclePlan:
    """Interleaved WRR: assign each round's replicas to the highest-credit paths.

    Each round every path earns its weight; the chosen paths then share the
    round's total earnings equally, so credit is conserved across a cycle.
    Ties are broken by lower path id.
    """
    m = weights.m
    if cls.m != m:
        raise ConfigurationError(f"class {cls.label} is defined for {cls.m} paths, weights for {m}")
    omega = [Fraction(w) for w in weights.omega]
    total = sum(omega)
    credit = [Fraction(0)] * m
    rounds = []
    for reps in replica_sequence(cls, K):
        for i in range(m):
            credit[i] += omega[i]
        chosen = sorted(range(m), key=lambda i: (-credit[i], i))[:reps]
        share = total / reps
        for i in chosen:
            credit[i] -= share
        rounds.append(tuple(chosen))
    return CyclePlan(tuple(rounds), m)


def used_bandwidth(cls: SchedulingClass, K: int) -> tuple[int, int]:
    """Packets sent per cycle ``N = f_bar * K`` and the redundancy ``R = N - K``."""
    N = sum((i + 1) * n for i, n in enumerate(_round_counts(cls, K)))
    return N, N - K
