import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from padme.channels import ChannelSet, PathConfig, PathCounters, e2e_lost, reset_window
from padme.wrr import ConfigurationError


def make(probs, seed=0):
    return ChannelSet([PathConfig(i, p) for i, p in enumerate(probs)], master_seed=seed)


def binomial_sigma(p, n):
    return math.sqrt(p * (1 - p) / n)


def test_zero_loss_delivers_everything():
    ch = make([0.0, 0.0, 0.0])
    for paths in ([0], [1, 2], [0, 1, 2]):
        out = ch.transmit_round(paths)
        assert all(out.values())
        assert not e2e_lost(out)


def test_certain_loss():
    ch = make([1.0, 1.0, 1.0])
    out = ch.transmit_round([0, 1, 2])
    assert not any(out.values())
    assert e2e_lost(out)
    assert [c.window_lost for c in ch.counters] == [1, 1, 1]


def test_unknown_or_empty_path_set():
    ch = make([0.1, 0.1])
    with pytest.raises(ConfigurationError):
        ch.transmit_round([2])
    with pytest.raises(ConfigurationError):
        ch.transmit_round([])
    with pytest.raises(ConfigurationError):
        ch.transmit_round([0, 0])


def test_config_validation():
    with pytest.raises(ConfigurationError):
        PathConfig(0, 1.5)
    with pytest.raises(ConfigurationError):
        ChannelSet([PathConfig(0, 0.1), PathConfig(0, 0.2)])


def test_two_path_replication_monte_carlo():
    # analytic: a packet is lost only when both copies are lost, p0 * p1
    n = 100_000
    ch = make([0.1, 0.1], seed=7)
    lost = ch.transmit_rounds(np.ones((n, 2), dtype=bool))
    frac = lost.all(axis=1).mean()
    assert abs(frac - 0.01) <= 3 * binomial_sigma(0.01, n)


def test_reset_window_examples():
    c = PathCounters(sent=10, lost=2, window_sent=10, window_lost=2)
    assert reset_window(c) == PathCounters(10, 2, 0, 0)
    assert reset_window(c) == PathCounters(10, 2, 0, 0)

    ch = ChannelSet([PathConfig(0, 1.0)])
    ch.counters[0] = PathCounters(10, 2, 10, 2)
    ch.reset_windows()
    ch.transmit_round([0])
    assert ch.counters[0] == PathCounters(sent=11, lost=3, window_sent=1, window_lost=1)


@pytest.mark.parametrize("p", [0.01, 0.05, 0.3])
def test_window_loss_converges(p):
    n = 100_000
    ch = make([p], seed=3)
    ch.transmit_rounds(np.ones((n, 1), dtype=bool))
    c = ch.counters[0]
    assert c.window_sent == n
    assert abs(c.window_lost / n - p) <= 3 * binomial_sigma(p, n)


def test_paths_independent():
    n = 100_000
    ch = make([0.2, 0.3], seed=11)
    lost = ch.transmit_rounds(np.ones((n, 2), dtype=bool))
    p0, p1 = lost.mean(axis=0)
    joint = (lost[:, 0] & lost[:, 1]).mean()
    assert abs(joint - p0 * p1) <= 3 * binomial_sigma(p0 * p1, n)


def test_same_seed_same_outcomes():
    a, b = make([0.1, 0.2, 0.3], seed=5), make([0.1, 0.2, 0.3], seed=5)
    rounds = [[0], [1, 2], [0, 1, 2], [2]] * 50
    assert [a.transmit_round(r) for r in rounds] == [b.transmit_round(r) for r in rounds]
    c = make([0.1, 0.2, 0.3], seed=6)
    assert [make([0.1, 0.2, 0.3], seed=5).transmit_round(r) for r in rounds] != [c.transmit_round(r) for r in rounds]


def test_adding_a_path_leaves_others_untouched():
    inc2 = np.ones((500, 2), dtype=bool)
    inc3 = np.ones((500, 3), dtype=bool)
    two = make([0.3, 0.3], seed=9).transmit_rounds(inc2)
    three = make([0.3, 0.3, 0.5], seed=9).transmit_rounds(inc3)
    assert (two == three[:, :2]).all()


@settings(max_examples=30, deadline=None)
@given(st.lists(st.lists(st.booleans(), min_size=3, max_size=3).filter(any), min_size=1, max_size=40),
       st.integers(0, 2**16))
def test_vectorised_matches_round_by_round(rows, seed):
    inc = np.array(rows, dtype=bool)
    vec = make([0.4, 0.5, 0.6], seed)
    lost = vec.transmit_rounds(inc)
    single = make([0.4, 0.5, 0.6], seed)
    for k, row in enumerate(inc):
        out = single.transmit_round(np.flatnonzero(row).tolist())
        for i, delivered in out.items():
            assert lost[k, i] == (not delivered)
    assert vec.counters == single.counters


def test_loss_schedule_steps():
    cfg = PathConfig(0, 0.0, schedule=[(6.0, 1.0), (12.0, 0.0)])
    assert [cfg.loss_at(t) for t in (0, 3, 6, 9, 12, 15)] == [0, 0, 1, 1, 0, 0]
    ch = ChannelSet([cfg])
    assert ch.transmit_round([0])[0]
    ch.advance(6.0)
    assert not ch.transmit_round([0])[0]
