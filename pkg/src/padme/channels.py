"""Independent lossy paths with per-path counters.

Every path draws from its own RNG stream seeded by ``(master_seed, path_id)``,
so adding or removing a path never changes another path's loss sequence.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from padme.wrr import ConfigurationError

# Spawn-key component reserved for channel streams (agent streams use others).
CHANNEL_STREAM = 0


@dataclass
class PathConfig:
    path_id: int
    loss_prob: float
    # optional stepwise schedule: [(start_time_s, loss_prob), ...]
    schedule: list[tuple[float, float]] = field(default_factory=list)

    def __post_init__(self):
        for p in [self.loss_prob] + [p for _, p in self.schedule]:
            if not 0.0 <= p <= 1.0:
                raise ConfigurationError(f"path {self.path_id}: loss probability {p} outside [0, 1]")
        self.schedule = sorted((float(t), float(p)) for t, p in self.schedule)

    def loss_at(self, t: float) -> float:
        if not self.schedule:
            return self.loss_prob
        i = bisect.bisect_right([s for s, _ in self.schedule], t) - 1
        return self.loss_prob if i < 0 else self.schedule[i][1]


@dataclass
class PathCounters:
    sent: int = 0
    lost: int = 0
    window_sent: int = 0
    window_lost: int = 0

    def add(self, sent: int, lost: int):
        self.sent += sent
        self.lost += lost
        self.window_sent += sent
        self.window_lost += lost


def reset_window(counters: PathCounters) -> PathCounters:
    counters.window_sent = 0
    counters.window_lost = 0
    return counters


def path_rng(master_seed: int, path_id: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(CHANNEL_STREAM, path_id)))


class ChannelSet:
    """The m paths of one simulation run."""

    def __init__(self, paths: Sequence[PathConfig], master_seed: int = 0):
        ids = [p.path_id for p in paths]
        if sorted(ids) != list(range(len(ids))):
            raise ConfigurationError(f"path ids must be unique and cover 0..m-1, got {ids}")
        self.paths = sorted(paths, key=lambda p: p.path_id)
        self.rngs = [path_rng(master_seed, p.path_id) for p in self.paths]
        self.counters = [PathCounters() for _ in self.paths]
        self.time = 0.0

    @property
    def m(self) -> int:
        return len(self.paths)

    def loss_probs(self) -> np.ndarray:
        return np.array([p.loss_at(self.time) for p in self.paths])

    def _check(self, path_ids: Iterable[int]) -> list[int]:
        path_ids = list(path_ids)
        if not path_ids:
            raise ConfigurationError("a round needs at least one path")
        for i in path_ids:
            if not 0 <= i < self.m:
                raise ConfigurationError(f"unknown path id {i}")
        if len(set(path_ids)) != len(path_ids):
            raise ConfigurationError(f"duplicate path in round {path_ids}")
        return path_ids

    def transmit_round(self, path_ids: Iterable[int]) -> dict[int, bool]:
        """Send one replica on each path; returns ``{path_id: delivered}``."""
        path_ids = self._check(path_ids)
        outcome = {}
        for i in path_ids:
            lost = self.rngs[i].random() < self.paths[i].loss_at(self.time)
            self.counters[i].add(1, int(lost))
            outcome[i] = not lost
        return outcome

    def transmit_rounds(self, incidence: np.ndarray) -> np.ndarray:
        """Vectorised ``transmit_round`` over a K x m incidence matrix.

        Returns a boolean K x m matrix marking lost replicas. Each path consumes
        its stream in round order, so the draws match repeated
        ``transmit_round`` calls exactly.
        """
        incidence = np.asarray(incidence, dtype=bool)
        if incidence.ndim != 2 or incidence.shape[1] != self.m:
            raise ConfigurationError(f"incidence must be K x {self.m}, got {incidence.shape}")
        if not incidence.any(axis=1).all():
            raise ConfigurationError("every round needs at least one path")
        lost = np.zeros_like(incidence)
        for i in range(self.m):
            rows = np.flatnonzero(incidence[:, i])
            draws = self.rngs[i].random(rows.size) < self.paths[i].loss_at(self.time)
            lost[rows, i] = draws
            self.counters[i].add(int(rows.size), int(draws.sum()))
        return lost

    def reset_windows(self):
        for c in self.counters:
            reset_window(c)

    def advance(self, dt: float):
        self.time += dt


def e2e_lost(outcome: dict[int, bool]) -> bool:
    """An information packet is lost only if every replica was lost."""
    return not any(outcome.values())
