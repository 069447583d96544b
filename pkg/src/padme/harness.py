"""Experiment driver: channels, scheduler, reports and agent in one loop."""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import yaml

from padme.agent import (Action, ActionSpace, ActorCriticAgent, AgentConfig, RewardParams,
                         discounted_return, encode_state, reward)
from padme.channels import ChannelSet, PathConfig
from padme.metrics import PathReport, info_losses, make_report
from padme.oracle import plan_incidence, analytic_info_loss, ordering_matches
from padme.wrr import SCHEDULING_CLASSES, ConfigurationError

log = logging.getLogger(__name__)

TRACE_VERSION = 1


@dataclass
class ExperimentConfig:
    loss_probs: list[float] = field(default_factory=lambda: [0.01, 0.03, 0.05])
    # optional per-path stepwise schedules: {path_id: [[time_s, loss_prob], ...]}
    schedules: dict[int, list[list[float]]] = field(default_factory=dict)
    K: int = 100
    cycles_per_interval: int = 10
    interval_s: float = 3.0
    threshold: float = 0.005
    iterations: int = 150
    seed: int = 0
    return_window: int = 20
    agent: AgentConfig = field(default_factory=AgentConfig)
    out: Optional[str] = None

    @property
    def m(self) -> int:
        return len(self.loss_probs)

    def validate(self):
        if self.m < 1:
            raise ConfigurationError("at least one path is required")
        if any(c.m != self.m for c in SCHEDULING_CLASSES):
            raise ConfigurationError(f"the scheduling classes are defined for 3 paths, config has {self.m}")
        if self.K < 4 or self.K % 4:
            raise ConfigurationError(f"K must be a positive multiple of 4, got {self.K}")
        if self.iterations < 1:
            raise ConfigurationError("iterations must be >= 1")
        if self.cycles_per_interval < 1:
            raise ConfigurationError("cycles_per_interval must be >= 1")
        if self.return_window < 1:
            raise ConfigurationError("return_window must be >= 1")
        for pid in self.schedules:
            if not 0 <= int(pid) < self.m:
                raise ConfigurationError(f"schedule given for unknown path {pid}")
        RewardParams(self.threshold, self.agent.gamma, self.K)
        self.path_configs()

    def path_configs(self) -> list[PathConfig]:
        scheds = {int(k): v for k, v in self.schedules.items()}
        return [PathConfig(i, float(p), [tuple(s) for s in scheds.get(i, [])])
                for i, p in enumerate(self.loss_probs)]

    def reward_params(self) -> RewardParams:
        return RewardParams(threshold=self.threshold, gamma=self.agent.gamma, K=self.K)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        agent = data.pop("agent", None) or {}
        agent_known = {f.name for f in fields(AgentConfig)}
        if set(agent) - agent_known:
            raise ConfigurationError(f"unknown agent keys: {sorted(set(agent) - agent_known)}")
        for key in ("hidden", "actor_hidden"):
            if agent.get(key) is not None:
                agent[key] = tuple(agent[key])
        return cls(agent=AgentConfig(**agent), **data)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        """Read a YAML (or JSON) mapping of config fields."""
        with open(path) as fh:
            data = yaml.safe_load(fh) or {}
        if not isinstance(data, dict):
            raise ConfigurationError(f"{path}: expected a mapping of config fields")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("hidden", "actor_hidden"):
            if d["agent"][key] is not None:
                d["agent"][key] = list(d["agent"][key])
        return d


@dataclass
class IterationRecord:
    iteration: int
    report: PathReport
    action: Action
    reward: int
    windowed_return: float
    td_error: float
    entropy: float
    status: str

    @property
    def f_bar(self) -> float:
        return self.action.f_bar


def optimal_action(true_plrs: Sequence[float], threshold: float = 0.005, K: int = 100,
                   space: Optional[ActionSpace] = None) -> Action:
    """Cheapest action whose exact expected info loss meets the threshold.

    Ties on f_bar prefer weights ordered against the loss rates, then the lower
    index. If nothing is feasible, the most redundant ordering-matched action.
    """
    space = space or ActionSpace(len(true_plrs))
    best_key, best = None, None
    for a in space:
        if analytic_info_loss(a.cls, a.weights, true_plrs, K) > threshold:
            continue
        key = (a.f_bar, not ordering_matches(a.weights.omega, true_plrs), a.index)
        if best_key is None or key < best_key:
            best_key, best = key, a
    if best is not None:
        return best
    top = max(space, key=lambda a: (a.f_bar, ordering_matches(a.weights.omega, true_plrs), -a.index))
    return top


def oracle_table(true_plrs: Sequence[float], K: int = 100, threshold: float = 0.005) -> list[dict]:
    space = ActionSpace(len(true_plrs))
    rows = []
    for a in space:
        loss = analytic_info_loss(a.cls, a.weights, true_plrs, K)
        rows.append({
            "index": a.index, "class": a.cls.label, "perm": a.perm, "omega": a.weights.omega,
            "f_bar": a.f_bar, "info_loss": loss, "feasible": loss <= threshold,
            "ordered": ordering_matches(a.weights.omega, true_plrs),
        })
    return rows


def windowed_return(rewards: Sequence[float], gamma: float, window: int) -> float:
    """Discounted sum over the last ``window`` rewards, most recent undiscounted."""
    return discounted_return(list(reversed(rewards[-window:])), gamma)


def run_experiment(config: ExperimentConfig) -> list[IterationRecord]:
    config.validate()
    m, K = config.m, config.K
    channels = ChannelSet(config.path_configs(), master_seed=config.seed)
    agent = ActorCriticAgent(m, config.agent, seed=config.seed)
    rparams = config.reward_params()
    info_packets = K * config.cycles_per_interval

    state = np.zeros(m)
    prev: Optional[Action] = None
    rewards: list[int] = []
    records: list[IterationRecord] = []
    for it in range(config.iterations):
        action, _ = agent.select_action(state)
        inc = np.tile(plan_incidence(action.cls, action.weights, K), (config.cycles_per_interval, 1))
        lost = channels.transmit_rounds(inc)
        report = make_report(it, channels.counters, info_packets, info_losses(lost, inc))
        r = reward(report, action, prev, rparams)
        next_state = encode_state(report)
        agent.observe(state, action.index, r, next_state)
        stats = agent.learn_step()
        channels.reset_windows()
        channels.advance(config.interval_s)

        rewards.append(r)
        records.append(IterationRecord(it, report, action, r,
                                       windowed_return(rewards, config.agent.gamma, config.return_window),
                                       stats.td_error, stats.entropy, stats.status))
        state, prev = next_state, action

    log.info("seed %d: %d iterations, last action %s%s, windowed return %.3f", config.seed, len(records),
             records[-1].action.cls.label, "".join(map(str, records[-1].action.perm)), records[-1].windowed_return)
    if config.out:
        write_trace(records, config, config.out)
    return records


def trace_columns(m: int) -> list[str]:
    return (["interval"] + [f"plr_{i + 1}" for i in range(m)]
            + ["e2e_plr", "info_loss_rate", "class_label", "f_bar", "reward",
               "windowed_return", "td_error", "entropy", "permutation", "status"])


def trace_text(records: Sequence[IterationRecord], config: ExperimentConfig) -> str:
    buf = io.StringIO()
    buf.write(f"# padme-trace v{TRACE_VERSION} seed={config.seed} K={config.K} "
              f"cycles_per_interval={config.cycles_per_interval} interval_s={config.interval_s} "
              f"threshold={config.threshold} gamma={config.agent.gamma} "
              f"return_window={config.return_window}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(trace_columns(config.m))
    for rec in records:
        rep = rec.report
        w.writerow([rec.iteration, *[repr(p) for p in rep.per_path_plr], repr(rep.e2e_plr),
                    repr(rep.info_loss_rate), rec.action.cls.label, repr(rec.f_bar), rec.reward,
                    repr(rec.windowed_return), repr(rec.td_error), repr(rec.entropy),
                    "".join(str(p) for p in rec.action.perm), rec.status])
    return buf.getvalue()


def write_trace(records: Sequence[IterationRecord], config: ExperimentConfig, path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(trace_text(records, config))
    except OSError as exc:
        raise OSError(f"could not write trace to {path}: {exc}") from exc
    return path


def read_trace(path) -> list[dict]:
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def config_json(config: ExperimentConfig) -> str:
    return json.dumps(config.to_dict(), sort_keys=True)
