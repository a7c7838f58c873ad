import math

import numpy as np
import pytest

from suphist import (
    ArrayStream,
    DyadicCountMin,
    ExactDistribution,
    NegativeDeltaUnsupported,
    SpaceSaving,
    StreamUpdate,
    generate_synthetic,
    hh_query,
    hh_update,
    make_hh_sketch,
)
from suphist.heavy_hitters import contract_dims


@pytest.mark.parametrize("mode", ["turnstile", "insertion-only"])
def test_single_update(mode):
    sk = make_hh_sketch(1000, 10, 0.5, mode, seed=1)
    hh_update(sk, StreamUpdate(17, 1))
    z = hh_query(sk, 10)
    assert z == {17: 1.0}


def test_turnstile_cancellation():
    sk = DyadicCountMin(1 << 16, 8, 3, seed=2)
    hh_update(sk, StreamUpdate(123, 5))
    hh_update(sk, StreamUpdate(123, -5))
    for lv in range(sk.levels):
        assert np.all(sk.tables[lv] == 0)
    assert sk.estimate(0, [122])[0] == 0


def test_space_saving_capacity():
    ss = SpaceSaving(5)
    ss.update(np.arange(1, 7), np.ones(6, dtype=np.int64))
    assert len(ss.count) == 5
    with pytest.raises(NegativeDeltaUnsupported):
        ss.update(np.array([1]), np.array([-1]))


def test_space_saving_bounds_hold(rng):
    items = rng.zipf(1.3, size=20000) % 500 + 1
    ss = SpaceSaving(40)
    ss.update(items, np.ones(len(items), dtype=np.int64))
    true = np.bincount(items, minlength=501)
    for x, (up, lo) in ss.bounds().items():
        assert lo <= true[x] <= up
    assert all(true[x] <= ss.min_count() for x in range(1, 501) if x not in ss.count)


@pytest.mark.parametrize("mode", ["turnstile", "insertion-only"])
def test_one_item_stream(mode):
    s = ArrayStream(10**4, np.full(50, 9))
    sk = make_hh_sketch(s.n, 10, 0.5, mode, seed=0).consume(s)
    assert hh_query(sk, 10) == {9: 1.0}


@pytest.mark.parametrize("mode", ["turnstile", "insertion-only"])
def test_uniform_four(mode):
    eps, ell = 0.5, 10
    s = ArrayStream(10**4, np.tile([5, 500, 5000, 9999], 250))
    sk = make_hh_sketch(s.n, ell, eps, mode, seed=3).consume(s)
    z = hh_query(sk, ell)
    assert set(z) == {5, 500, 5000, 9999}
    assert all(abs(v - 0.25) <= eps / ell for v in z.values())


@pytest.mark.parametrize("mode", ["turnstile", "insertion-only"])
def test_uniform_wide_no_false_mass(mode):
    eps, ell = 0.5, 10
    s = generate_synthetic("even-uniform", 10**4)
    sk = make_hh_sketch(s.n, ell, eps, mode, seed=4).consume(s)
    z = hh_query(sk, ell)
    assert all(v <= 1 / ell + eps / ell for v in z.values())


def test_count_min_turnstile_contract(rng):
    n, ell, eps = 1 << 14, 20, 0.5
    for trial in range(10):
        s = generate_synthetic("zipf", n, seed=trial, exponent=1.2, length=20000, churn=0.3, shuffle=True)
        P = ExactDistribution.from_stream(s)
        sk = DyadicCountMin.for_contract(n, ell, eps, seed=trial).consume(s)
        z = sk.query(ell, P.total)
        items, masses = P.masses()
        for i, p in zip(items.tolist(), masses.tolist()):
            if p >= 1 / ell:
                assert i in z
        for i, v in z.items():
            assert abs(v - P.mass(i)) <= eps / ell + 1e-12


def test_contract_dims_shape():
    w, d = contract_dims(10, 0.5, 1 << 10)
    assert w == 40
    assert d == math.ceil(math.log2((2 * math.ceil(15) * 11 + 1) / 0.05))


def test_count_min_merge():
    a = DyadicCountMin(1 << 12, 16, 3, seed=5)
    b = DyadicCountMin(1 << 12, 16, 3, seed=5)
    both = DyadicCountMin(1 << 12, 16, 3, seed=5)
    a.update([1, 2, 3], [1, 1, 1])
    b.update([3, 4], [2, 2])
    both.update([1, 2, 3, 3, 4], [1, 1, 1, 2, 2])
    merged = a.merge(b)
    assert merged.total == both.total
    assert all(np.array_equal(x, y) for x, y in zip(merged.tables, both.tables))
    assert a.total == 3
