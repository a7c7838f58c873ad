import math

import numpy as np
import pytest

from suphist import (
    ExactDistribution,
    NonReplayableSource,
    OneShotStream,
    TwoPassConfig,
    generate_synthetic,
    median_tail_check,
    optimal_histogram_exact,
    stream_from_counts,
    support_error,
    twopass_run,
)
from suphist.twopass import default_q

from conftest import random_dist


def test_requires_replayable():
    s = OneShotStream(10, [(1, 1)])
    with pytest.raises(NonReplayableSource):
        twopass_run(s, TwoPassConfig(10, 1, 0.25))


@pytest.mark.parametrize("mode", ["exact", "stream"])
def test_single_item(mode):
    s = stream_from_counts(1000, {321: 9})
    out = twopass_run(s, TwoPassConfig(1000, 1, 0.25, hhh_mode=mode, seed=1))
    assert out.info["partition"].H == (321,)
    assert out.hist(321) == 1.0
    assert all(v == 0 for a, b, v in out.hist.pieces() if a != 321)
    assert support_error(ExactDistribution.from_stream(s), out.hist) == 0


def test_uniform_interval_exact_mode():
    n = 4096
    s = stream_from_counts(n, {i: 2 for i in range(100, 4000, 7)}, seed=0)
    P = ExactDistribution.from_stream(s)
    out = twopass_run(s, TwoPassConfig(n, 1, 0.25, hhh_mode="exact", seed=0))
    assert support_error(P, out.hist) == pytest.approx(0, abs=1e-12)


@pytest.mark.parametrize("mode", ["exact", "stream"])
def test_randomized_within_bound(mode):
    eps, wins = 0.25, 0
    for t in range(20):
        rng = np.random.default_rng(100 + t)
        n = int(rng.integers(256, 1 << 14))
        P = random_dist(rng, n, int(rng.integers(20, min(n, 1 << 10))), max_count=50)
        k = int(rng.integers(1, 5))
        s = stream_from_counts(n, P.counts, seed=t)
        out = twopass_run(s, TwoPassConfig(n, k, eps, hhh_mode=mode, seed=t))
        _, opt = optimal_histogram_exact(P, k)
        wins += support_error(P, out.hist) <= opt + eps
        assert out.hist.num_pieces <= 20 * math.ceil(k / eps) + 2
    assert wins >= 18


def test_partition_invariants_exact(rng):
    eps = 0.25
    for t in range(20):
        n = int(rng.integers(64, 1 << 12))
        P = random_dist(rng, n, int(rng.integers(1, min(n, 300))))
        k = int(rng.integers(1, 5))
        out = twopass_run(stream_from_counts(n, P.counts), TwoPassConfig(n, k, eps, hhh_mode="exact", seed=t))
        part = out.info["partition"]
        assert part.is_tiling()
        assert len(part.H) <= math.ceil(2 * k / eps)
        assert all(P.interval_count(a, b) < eps / (2 * k) * P.total for a, b in part.L)


def test_space_budget_mode():
    n = 20000
    s = generate_synthetic("zipf", n, seed=2, length=50000)
    cfg = TwoPassConfig(n, 4, 0.25, space=300, seed=1)
    assert cfg.phi == pytest.approx(math.log2(n) / 300)
    out = twopass_run(s, cfg)
    assert out.info["H"] <= 300


def test_default_q():
    assert default_q(1, 0.5) == math.ceil(16 * 4 * max(1, math.log(2)))
    assert default_q(4, 0.25) == math.ceil(16 * 16 * math.log(16))


def test_median_tail_equal_masses():
    assert median_tail_check([0.1] * 50, 5, 0.1, 2000) == 0.0


def test_median_tail_single_draw():
    masses = np.r_[np.zeros(33), np.ones(67)] / 67
    rate = median_tail_check(masses, 1, 0.5, 20000, seed=1)
    assert rate <= 2 * math.exp(-0.25 / 8) + 0.015


def test_median_tail_deterministic():
    m = np.random.default_rng(0).random(100)
    assert median_tail_check(m, 16, 0.2, 3000, seed=4) == median_tail_check(m, 16, 0.2, 3000, seed=4)
