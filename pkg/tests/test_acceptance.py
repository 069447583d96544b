"""Acceptance runs. Each criterion prints one PASS/FAIL line; run with ``-s`` to see them.

The learning-curve criteria use seeds 0..4 and the default agent configuration.
"""

import math
import time
from functools import lru_cache

import numpy as np

from padme.agent import ActorCriticAgent, AgentConfig
from padme.channels import ChannelSet, PathConfig
from padme.evaluation import (HETEROGENEOUS, UNIFORM_1, UNIFORM_3, convergence, redundancy_decay,
                              threshold_attainment)
from padme.harness import ExperimentConfig, run_experiment, trace_text
from padme.metrics import info_losses
from padme.neural import backward, forward, init_mlp, soft_update
from padme.oracle import analytic_info_loss, plan_incidence
from padme.wrr import SCHEDULING_CLASSES, PathWeights, avg_redundancy, get_class, replica_sequence

SEEDS = range(5)

# Expected replica counts of the first four rounds of each class.
TABLE_REPS = {"G": [3, 3, 3, 3], "F": [3, 2, 3, 2], "E": [3, 2, 2, 3], "D": [2, 2, 2, 2],
              "C": [2, 2, 1, 2], "B": [2, 1, 1, 2], "A": [1, 1, 1, 1]}
TABLE_FBAR = {"A": 1, "B": 1.25, "C": 1.75, "D": 2, "E": 2.25, "F": 2.5, "G": 3}


def report(capsys, n, ok, detail):
    with capsys.disabled():
        print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")


@lru_cache(maxsize=None)
def runs(loss_probs):
    out, times = [], []
    for s in SEEDS:
        t0 = time.perf_counter()
        out.append(run_experiment(ExperimentConfig(loss_probs=list(loss_probs), seed=s)))
        times.append(time.perf_counter() - t0)
    return out, max(times)


def test_criterion_1_convergence(capsys):
    het, slowest = runs(tuple(HETEROGENEOUS))
    c = convergence(het)
    ok = c.passed(60) and slowest < 10.0
    report(capsys, 1, ok, f"median windowed return reaches 90% of final {c.final_value:.2f} "
                          f"(start {c.initial_value:.2f}) at iteration {c.first_reach} (need <= 60); "
                          f"slowest run {slowest:.2f}s")
    assert ok


def test_criterion_2_threshold(capsys):
    t1 = threshold_attainment(runs(tuple(UNIFORM_1))[0])
    t3 = threshold_attainment(runs(tuple(UNIFORM_3))[0])
    ok = t1 is not None and t1 <= 40 and t3 is not None and t3 <= 60
    report(capsys, 2, ok, f"median info loss settles under 0.005 at iteration {t1} for 1% (need <= 40), "
                          f"{t3} for 3% (need <= 60)")
    assert ok


def test_criterion_3_redundancy_decay(capsys):
    d = redundancy_decay(runs(tuple(HETEROGENEOUS))[0], HETEROGENEOUS)
    ok = d.decays and d.gap <= 0.25
    report(capsys, 3, ok, f"mean f_bar first 10 {d.early:.3f} -> last 50 {d.late:.3f}, "
                          f"optimum {d.optimal} (gap {d.gap:.3f}, need <= 0.25)")
    assert ok


def test_criterion_4_oracle_matches_monte_carlo(capsys):
    vectors = [[0.01, 0.03, 0.05], [0.1, 0.1, 0.1], [0.3, 0.2, 0.4]]
    w = PathWeights((3, 2, 1))
    K, cycles = 100, 1000          # 10^5 rounds
    worst, failures = 0.0, []
    for vi, plrs in enumerate(vectors):
        for cls in SCHEDULING_CLASSES:
            inc = np.tile(plan_incidence(cls, w, K), (cycles, 1))
            ch = ChannelSet([PathConfig(i, p) for i, p in enumerate(plrs)], master_seed=1000 + vi)
            rate = info_losses(ch.transmit_rounds(inc), inc) / len(inc)
            p = analytic_info_loss(cls, w, plrs, K)
            sigma = math.sqrt(p * (1 - p) / len(inc))
            z = abs(rate - p) / sigma if sigma else (0.0 if rate == p else math.inf)
            worst = max(worst, z)
            if z > 3:
                failures.append((cls.label, plrs, rate, p))
    ok = not failures
    report(capsys, 4, ok, f"21 cases, worst deviation {worst:.2f} sigma; failures {failures}")
    assert ok


def test_criterion_5_class_table(capsys):
    fbar_ok = all(avg_redundancy(get_class(k)) == v for k, v in TABLE_FBAR.items())
    mismatched = {}
    for label, reps in TABLE_REPS.items():
        for K in (4, 8, 100):
            got = replica_sequence(get_class(label), K)[:4]
            if got != reps:
                mismatched[label] = (got, reps)
                break
    ok = fbar_ok and not mismatched
    report(capsys, 5, ok, f"f_bar values {'all match' if fbar_ok else 'MISMATCH'}; "
                          f"replica rows differing (got, table): {mismatched}")
    assert ok


def test_criterion_6_learning_machinery(capsys):
    rng = np.random.default_rng(7)
    worst = 0.0
    h = 1e-5
    for head in ("linear", "softmax"):
        for _ in range(25):
            sizes = [int(x) for x in rng.integers(1, 6, size=int(rng.integers(2, 5)))]
            net = init_mlp(sizes, rng, head=head)
            # random biases keep pre-activations off the ReLU kink at exactly 0
            for b in net.biases:
                b[:] = rng.normal(scale=0.5, size=b.shape)
            x = rng.normal(size=(2, sizes[0]))
            c = rng.normal(size=(2, sizes[-1]))

            def loss():
                return float((c * forward(net, x)[0]).sum())

            out, cache = forward(net, x)
            for g, a in zip(backward(net, cache, c), net.arrays()):
                for idx in np.ndindex(a.shape):
                    old = a[idx]
                    a[idx] = old + h
                    up = loss()
                    a[idx] = old - h
                    down = loss()
                    a[idx] = old
                    num = (up - down) / (2 * h)
                    worst = max(worst, abs(g[idx] - num) / max(1e-6, abs(g[idx]) + abs(num)))
    grads_ok = worst < 1e-4

    online, target = init_mlp((3, 4, 2), rng), init_mlp((3, 4, 2), rng)
    t0 = target.copy()
    soft_ok = True
    for alpha in (0.0, 0.5, 1.0):
        t = t0.copy()
        soft_update(t, online, alpha)
        soft_ok &= all(np.array_equal(a, alpha * b + (1 - alpha) * o)
                       for a, b, o in zip(t.arrays(), t0.arrays(), online.arrays()))

    agent = ActorCriticAgent(3, AgentConfig(buffer_size=16), seed=0)
    before = [a.copy() for n in (agent.actor, agent.critic, agent.target) for a in n.arrays()]
    s = np.zeros(3)
    statuses = []
    for k in range(15):
        agent.observe(s, k, -1.0, s)
        statuses.append(agent.learn_step().status)
    after = [a for n in (agent.actor, agent.critic, agent.target) for a in n.arrays()]
    warm_ok = (set(statuses) == {"warmup"} and all(np.array_equal(a, b) for a, b in zip(before, after))
               and agent.actor_opt.step == agent.critic_opt.step == 0)
    ok = grads_ok and soft_ok and warm_ok
    report(capsys, 6, ok, f"worst gradient rel. error {worst:.2e}; soft update exact {soft_ok}; "
                          f"no updates before buffer full {warm_ok}")
    assert ok


def test_criterion_7_determinism(capsys):
    cfg = ExperimentConfig(seed=11)
    a = trace_text(run_experiment(cfg), cfg).encode()
    b = trace_text(run_experiment(cfg), cfg).encode()
    ok = a == b
    report(capsys, 7, ok, f"two traces of {len(a)} bytes identical: {ok}")
    assert ok
