"""Actor-critic decision core.

The action space is the product of the seven scheduling classes and the m!
priority orders of the paths. The actor is a softmax policy over that
space; the critic estimates Q(s, .) for every action at once and a target
copy of it supplies the TD targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations
from typing import Optional, Sequence

import numpy as np

from padme import neural
from padme.metrics import PathReport
from padme.oracle import analytic_info_loss, ordering_matches
from padme.wrr import SCHEDULING_CLASSES, PathWeights, SchedulingClass, weights_from_permutation


@dataclass(frozen=True)
class Action:
    index: int
    cls: SchedulingClass
    perm: tuple[int, ...]

    @property
    def weights(self) -> PathWeights:
        return weights_from_permutation(self.perm)

    @property
    def f_bar(self) -> float:
        return self.cls.f_bar

    def vector(self) -> list[float]:
        """The ``[f_bar, w_1, ..., w_m]`` view of the action."""
        return [self.f_bar, *map(float, self.weights.omega)]


class ActionSpace:
    def __init__(self, m: int = 3, classes: Sequence[SchedulingClass] = SCHEDULING_CLASSES):
        if any(c.m != m for c in classes):
            raise ValueError(f"all classes must be defined for m={m}")
        self.m = m
        self.classes = tuple(classes)
        self.perms = tuple(permutations(range(m)))
        self.n = len(self.classes) * len(self.perms)

    def __len__(self):
        return self.n

    def encode(self, class_index: int, perm: Sequence[int]) -> int:
        return class_index * len(self.perms) + self.perms.index(tuple(perm))

    def decode(self, index: int) -> Action:
        if not 0 <= index < self.n:
            raise IndexError(f"action index {index} outside [0, {self.n})")
        c, p = divmod(index, len(self.perms))
        return Action(index, self.classes[c], self.perms[p])

    def __iter__(self):
        return (self.decode(i) for i in range(self.n))


def encode_state(report: PathReport) -> np.ndarray:
    return np.array(report.per_path_plr, dtype=np.float64)


@dataclass
class RewardParams:
    threshold: float = 0.005
    gamma: float = 0.9
    # cycle length fed to the analytic oracle for the bandwidth-economy check
    K: int = 100
    tie_tol: float = 1e-6

    def __post_init__(self):
        if not 0.0 < self.threshold < 1.0:
            raise ValueError(f"threshold must be in (0, 1), got {self.threshold}")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError(f"gamma must be in [0, 1), got {self.gamma}")


def lower_class_feasible(action: Action, plrs: Sequence[float], params: RewardParams,
                         classes: Sequence[SchedulingClass] = SCHEDULING_CLASSES) -> bool:
    for cls in classes:
        if cls.f_bar < action.f_bar and analytic_info_loss(cls, action.weights, plrs, params.K) <= params.threshold:
            return True
    return False


def reward(report: PathReport, action: Action, prev_action: Optional[Action] = None,
           params: RewardParams = RewardParams()) -> int:
    """Binary reward for the interval ``report`` covers.

    ``prev_action`` is accepted for interface symmetry; the bandwidth penalty
    compares against the cheapest class predicted to meet the threshold
    rather than against the previous choice.
    """
    if report.info_loss_rate > params.threshold:
        return -1
    if not ordering_matches(action.weights.omega, report.per_path_plr, params.tie_tol):
        return -1
    if lower_class_feasible(action, report.per_path_plr, params):
        return -1
    return 1


def discounted_return(rewards: Sequence[float], gamma: float) -> float:
    total, scale = 0.0, 1.0
    for r in rewards:
        total += scale * r
        scale *= gamma
    return total


@dataclass
class Transition:
    state: np.ndarray
    action: int
    reward: float
    next_state: np.ndarray


class ReplayBuffer:
    """Fixed-capacity ring buffer; sampling is refused until it has filled once."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("replay buffer capacity must be >= 1")
        self.capacity = capacity
        self.items: list[Transition] = []
        self.cursor = 0

    def __len__(self):
        return len(self.items)

    @property
    def full(self) -> bool:
        return len(self.items) == self.capacity

    def add(self, t: Transition):
        if len(self.items) < self.capacity:
            self.items.append(t)
        else:
            self.items[self.cursor] = t
        self.cursor = (self.cursor + 1) % self.capacity

    def sample(self, n: int, rng: np.random.Generator) -> list[Transition]:
        if not self.full:
            raise RuntimeError("replay buffer is not full yet")
        return [self.items[i] for i in rng.integers(0, self.capacity, size=n)]


@dataclass
class AgentConfig:
    hidden: tuple[int, ...] = (64, 64)
    actor_hidden: Optional[tuple[int, ...]] = None   # defaults to ``hidden``
    gamma: float = 0.9
    alpha: float = 0.9           # target critic keeps this share of its old weights
    buffer_size: int = 16
    batch_size: int = 16
    actor_lr: float = 0.1
    critic_lr: float = 0.01
    adam_eps: float = 1e-2       # large eps damps ADAM's sign-like steps on rarely rewarded logits
    # "value": actor advantage r + g*V'(s') - V(s) with V = E_pi[Q_target];
    # "online": same with the online critic; "q": plain TD error r + g*V'(s') - Q(s, a)
    actor_baseline: str = "value"
    entropy_coef: float = 0.0
    center_advantage: bool = True    # subtract the minibatch mean from the actor advantage


@dataclass
class LearnStats:
    status: str                   # "warmup" or "updated"
    td_error: float = 0.0
    critic_loss: float = 0.0
    entropy: float = 0.0


class ActorCriticAgent:
    def __init__(self, m: int, config: AgentConfig, seed: int = 0, space: Optional[ActionSpace] = None):
        self.m = m
        self.config = config
        self.space = space or ActionSpace(m)
        ss = np.random.SeedSequence(seed, spawn_key=(1,))
        actor_ss, critic_ss, policy_ss, replay_ss = ss.spawn(4)
        sizes = (m, *config.hidden, self.space.n)
        actor_hidden = config.hidden if config.actor_hidden is None else config.actor_hidden
        self.actor = neural.init_mlp((m, *actor_hidden, self.space.n), np.random.default_rng(actor_ss),
                                     head="softmax")
        self.critic = neural.init_mlp(sizes, np.random.default_rng(critic_ss), head="linear")
        self.target = self.critic.copy()
        self.actor_opt = neural.AdamState.for_params(self.actor, lr=config.actor_lr, eps=config.adam_eps)
        self.critic_opt = neural.AdamState.for_params(self.critic, lr=config.critic_lr, eps=config.adam_eps)
        self.policy_rng = np.random.default_rng(policy_ss)
        self.replay_rng = np.random.default_rng(replay_ss)
        self.buffer = ReplayBuffer(config.buffer_size)

    def policy(self, state) -> np.ndarray:
        probs, _ = neural.forward(self.actor, state)
        return probs

    def select_action(self, state, rng: Optional[np.random.Generator] = None) -> tuple[Action, float]:
        """Sample from the softmax policy; returns the action and its log-probability."""
        probs = self.policy(state)
        rng = rng or self.policy_rng
        idx = int(rng.choice(len(probs), p=probs))
        return self.space.decode(idx), math.log(max(probs[idx], 1e-300))

    def observe(self, state, action: int, r: float, next_state):
        self.buffer.add(Transition(np.asarray(state, float), int(action), float(r), np.asarray(next_state, float)))

    def td_terms(self, batch: Sequence[Transition]) -> dict:
        """Forward passes and TD quantities for a minibatch, without touching parameters."""
        n = len(batch)
        S = np.stack([t.state for t in batch])
        A = np.array([t.action for t in batch])
        R = np.array([t.reward for t in batch])
        S2 = np.stack([t.next_state for t in batch])
        rows = np.arange(n)

        # TD target: expected target-critic value under the current policy at s'
        pi_next, _ = neural.forward(self.actor, S2)
        q_next, _ = neural.forward(self.target, S2)
        y = R + self.config.gamma * (pi_next * q_next).sum(axis=1)

        q, critic_cache = neural.forward(self.critic, S)
        delta = y - q[rows, A]
        pi, actor_cache = neural.forward(self.actor, S)
        base = self.config.actor_baseline
        if base == "value":
            q_targ, _ = neural.forward(self.target, S)
            adv = y - (pi * q_targ).sum(axis=1)
        elif base == "online":
            q_next_online, _ = neural.forward(self.critic, S2)
            adv = R + self.config.gamma * (pi_next * q_next_online).sum(axis=1) - (pi * q).sum(axis=1)
        elif base == "q":
            adv = delta
        else:
            raise ValueError(f"unknown actor_baseline {base!r}")
        if self.config.center_advantage:
            adv = adv - adv.mean()
        return dict(A=A, rows=rows, y=y, q=q, delta=delta, adv=adv, pi=pi,
                    critic_cache=critic_cache, actor_cache=actor_cache)

    def critic_gradients(self, terms: dict) -> list[np.ndarray]:
        """Gradient of the mean squared TD error, with y held fixed."""
        q, delta, rows = terms["q"], terms["delta"], terms["rows"]
        g_q = np.zeros_like(q)
        g_q[rows, terms["A"]] = -2.0 * delta / len(rows)
        return neural.backward(self.critic, terms["critic_cache"], g_q)

    def actor_gradients(self, terms: dict) -> list[np.ndarray]:
        """Gradient of mean(-adv * log pi(a|s)) minus the entropy bonus; adv held fixed."""
        pi, adv, rows = terms["pi"], terms["adv"], terms["rows"]
        n = len(rows)
        onehot = np.zeros_like(pi)
        onehot[rows, terms["A"]] = 1.0
        g_logits = -(adv[:, None] * (onehot - pi)) / n
        if self.config.entropy_coef:
            logp = np.log(np.clip(pi, 1e-300, None))
            ent = -(pi * logp).sum(axis=1, keepdims=True)
            g_logits += self.config.entropy_coef * pi * (logp + ent) / n
        return neural.backward(self.actor, terms["actor_cache"], g_logits, wrt_logits=True)

    def learn_step(self, batch: Optional[Sequence[Transition]] = None) -> LearnStats:
        if batch is None:
            if not self.buffer.full:
                return LearnStats("warmup")
            batch = self.buffer.sample(self.config.batch_size, self.replay_rng)
        terms = self.td_terms(batch)
        critic_grads = self.critic_gradients(terms)
        actor_grads = self.actor_gradients(terms)
        neural.adam_step(self.critic, self.critic_opt, critic_grads)
        neural.adam_step(self.actor, self.actor_opt, actor_grads)
        neural.soft_update(self.target, self.critic, self.config.alpha)

        pi, delta = terms["pi"], terms["delta"]
        entropy = float(-(pi * np.log(np.clip(pi, 1e-300, None))).sum(axis=1).mean())
        return LearnStats("updated", float(delta.mean()), float((delta ** 2).mean()), entropy)
