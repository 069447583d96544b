"""Loss and bandwidth statistics packaged as per-interval reports.

A ``PathReport`` stands in for the receiver feedback of one report interval:
per-path sent/lost counts, the derived loss rates and the information-packet
loss after replication.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from padme.channels import PathCounters


def _ratio(num: float, den: float) -> float:
    # idle path or empty interval: no evidence of loss
    return float(num) / float(den) if den else 0.0


def path_plr(counters: PathCounters) -> float:
    return _ratio(counters.window_lost, counters.window_sent)


def e2e_plr(counters: Sequence[PathCounters]) -> float:
    """Replica-level loss ratio summed over all paths for the current window."""
    return _ratio(sum(c.window_lost for c in counters), sum(c.window_sent for c in counters))


def info_loss_rate(info_lost: int, info_packets: int) -> float:
    """Fraction of information packets whose replicas were all lost."""
    return _ratio(info_lost, info_packets)


@dataclass(frozen=True)
class PathReport:
    interval_index: int
    per_path_plr: tuple[float, ...]
    e2e_plr: float
    info_loss_rate: float
    per_path_sent: tuple[int, ...]
    per_path_lost: tuple[int, ...]
    info_packets: int
    transmitted: int

    @property
    def m(self) -> int:
        return len(self.per_path_plr)


def make_report(interval_index: int, counters: Sequence[PathCounters], info_packets: int = 0,
                info_lost: int = 0) -> PathReport:
    """Snapshot the window counters; the caller resets them afterwards."""
    return PathReport(
        interval_index=interval_index,
        per_path_plr=tuple(path_plr(c) for c in counters),
        e2e_plr=e2e_plr(counters),
        info_loss_rate=info_loss_rate(info_lost, info_packets),
        per_path_sent=tuple(c.window_sent for c in counters),
        per_path_lost=tuple(c.window_lost for c in counters),
        info_packets=info_packets,
        transmitted=sum(c.window_sent for c in counters),
    )


def empty_report(m: int, interval_index: int = -1) -> PathReport:
    return make_report(interval_index, [PathCounters() for _ in range(m)])


def info_losses(lost: np.ndarray, incidence: np.ndarray) -> int:
    """Count rounds where every used path lost its replica (K x m matrices)."""
    lost = np.asarray(lost, dtype=bool)
    incidence = np.asarray(incidence, dtype=bool)
    return int(np.all(lost | ~incidence, axis=1).sum())
