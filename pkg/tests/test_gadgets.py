from fractions import Fraction

import numpy as np
import pytest

from suphist import (
    BadParams,
    ExactDistribution,
    GadgetSpec,
    NegativeCount,
    gadget_stream,
    optimal_histogram_exact,
)
from suphist.gadgets import bicriteria_constraints, elephants_in_target, proper_opt2_counts, random_spec
from suphist.histogram import optimal_cost_counts


def _prefix_ok(stream):
    d = ExactDistribution(stream.n)
    for u in stream:
        d.apply(u)  # raises NegativeCount on a strictness violation
    return d


@pytest.mark.parametrize("family,n", [("disjointness", 30), ("proper", 256), ("bicriteria", 4096)])
def test_streams_strict(family, n):
    rng = np.random.default_rng(1)
    for _ in range(10):
        d = _prefix_ok(gadget_stream(random_spec(family, n, rng)))
        assert d.total > 0


def test_proper_a0_zero_error():
    t = 16
    for j in range(1, t + 1):
        bits = [1] * t
        bits[j - 1] = 0
        spec = GadgetSpec("proper", t * t, tuple(bits), j=j, seed=j)
        _, err = optimal_histogram_exact(ExactDistribution.from_stream(gadget_stream(spec)), 2)
        assert err == 0


def test_proper_a1_matches_derived():
    t = 16
    rng = np.random.default_rng(3)
    for _ in range(20):
        spec = random_spec("proper", t * t, rng, a_bits=tuple([1] * t))
        P = ExactDistribution.from_stream(gadget_stream(spec))
        _, err = optimal_histogram_exact(P, 2)
        assert optimal_cost_counts(P, 2) == proper_opt2_counts(spec)
        assert err == pytest.approx(proper_opt2_counts(spec) / P.total, abs=1e-15)
        elephant_mass = elephants_in_target(spec) * t / P.total
        assert err >= spec.gamma / 2 * elephant_mass


def test_proper_j1_no_earlier_elephants():
    spec = GadgetSpec("proper", 64, (1,) * 8, j=1)
    d = ExactDistribution.from_stream(gadget_stream(spec))
    elephants = [i for i, c in d.counts.items() if c == 8]
    assert len(elephants) == elephants_in_target(spec)
    assert all(9 <= i <= 16 for i in elephants)


def test_bicriteria_constants():
    ok, bound = bicriteria_constraints(Fraction(1, 2), Fraction(1, 8), Fraction(1, 10), Fraction(1, 40))
    assert ok and bound == Fraction(1, 40)
    assert not bicriteria_constraints(0.9, 0.2, 0.1, 0.05)[0]


def test_bicriteria_layout():
    t = 64
    spec = GadgetSpec("bicriteria", t * t, (1,) * t, j=3, seed=2)
    d = ExactDistribution.from_stream(gadget_stream(spec))
    subs, width = t // 8, 8
    firsts = [2 * t + s * width + 1 for s in range(subs)]
    assert all(d.counts[x] == t for x in firsts)
    assert not any(1 <= i <= 2 * t for i in d.counts)  # Bob removed chunks 1..j-1
    chunk = [i for i in d.counts if 3 * t < i <= 4 * t]
    assert len(chunk) == subs * 4


def test_disjointness():
    a = (1, 0, 1, 0, 0, 1)
    disjoint = GadgetSpec("disjointness", 6, a, (0, 1, 0, 1, 0, 0))
    meet = GadgetSpec("disjointness", 6, a, (0, 1, 1, 0, 0, 0))
    _, e0 = optimal_histogram_exact(ExactDistribution.from_stream(gadget_stream(disjoint)), 1)
    _, e1 = optimal_histogram_exact(ExactDistribution.from_stream(gadget_stream(meet)), 1)
    assert e0 == 0 and e1 > 0


@pytest.mark.parametrize(
    "kw",
    [dict(family="proper", n=50, a_bits=(1,) * 7), dict(family="proper", n=64, a_bits=(1,) * 8, j=9),
     dict(family="disjointness", n=3, a_bits=(1, 0), b_bits=(0, 0, 1)), dict(family="nope", n=4)],
)
def test_spec_validation(kw):
    with pytest.raises(BadParams):
        GadgetSpec(**kw)
