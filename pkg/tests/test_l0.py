import numpy as np
import pytest

from suphist import EMPTY_SUPPORT, BadParams, L0Sampler, L0SamplerBank, StreamUpdate, l0_sample, l0_update
from suphist.l0 import REP_FAILURE, reps_for


def _draws(n, support_items, counts, samplers, seed):
    bank = L0SamplerBank(n, [(1, n)], samplers, seed=seed)
    bank.update(support_items, counts)
    status, item, _ = bank.recover()
    return status, item


def test_outside_restriction_unchanged():
    s = L0Sampler(100, (10, 20), seed=1)
    before = s.state()
    l0_update(s, StreamUpdate(5, 3))
    l0_update(s, StreamUpdate(21, 1))
    assert all(np.array_equal(a, b) for a, b in zip(before, s.state()))


def test_insert_delete_returns_to_zero():
    s = L0Sampler(100, seed=2)
    l0_update(s, StreamUpdate(42, 1))
    assert any(a.any() for a in s.state())
    l0_update(s, StreamUpdate(42, -1))
    assert not any(a.any() for a in s.state())


def test_level_units_nested():
    s = L0Sampler(1 << 10, seed=3)
    s.update_many(np.arange(1, 200), np.ones(199, dtype=np.int64))
    cnt, _, _ = s.level_units()
    assert np.all(cnt[:, 0] == 199)
    assert np.all(np.diff(cnt, axis=1) <= 0)


def test_two_items_half_each():
    status, item = _draws(1000, [3, 700], [1, 5], 100_000, seed=4)
    ok = item[status == 1]
    frac = np.mean(ok == 3)
    assert abs(frac - 0.5) <= 0.02


def test_singleton_support():
    for seed in range(20):
        s = L0Sampler(100, (1, 10), seed=seed)
        s.update_many([5], [7])
        s.update_many([50], [63])  # outside the restriction
        assert l0_sample(s, 70) == (5, 0.1)


def test_empty_support():
    s = L0Sampler(100, (1, 10), seed=0)
    assert l0_sample(s, 10) is EMPTY_SUPPORT
    s.update_many([4], [2])
    s.update_many([4], [-2])
    assert l0_sample(s, 10) is EMPTY_SUPPORT


def test_uniform_sixteen():
    items = np.arange(1, 1 << 14, 1000)[:16]
    counts = np.arange(1, 17)
    status, item = _draws(1 << 14, items, counts, 100_000, seed=5)
    ok = item[status == 1]
    freq = np.array([np.mean(ok == x) for x in items])
    assert 0.5 * np.abs(freq - 1 / 16).sum() <= 0.02
    assert np.mean(status == 0) <= REP_FAILURE ** reps_for(0.01) + 0.01


def test_recovered_mass_exact():
    bank = L0SamplerBank(500, [(1, 250), (251, 500)], [50, 50], seed=6)
    bank.update([3, 3, 100, 300], [2, 1, 4, 9])
    left, right = bank.successes(16)
    assert set(left) <= {(3, 3 / 16), (100, 4 / 16)}
    assert set(right) == {(300, 9 / 16)}


def test_bank_validation():
    with pytest.raises(BadParams):
        L0SamplerBank(10, [(1, 5), (5, 8)], 1)
    with pytest.raises(BadParams):
        L0SamplerBank(10, [(0, 5)], 1)
    with pytest.raises(BadParams):
        reps_for(1.5)
