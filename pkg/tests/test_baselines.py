import numpy as np
import pytest

from suphist import (
    ArrayStream,
    BadParams,
    BaselineConfig,
    ExactDistribution,
    equal_pieces,
    fixed_baseline,
    stream_from_counts,
    support_error,
)


def test_equal_pieces_tile():
    p = equal_pieces(10, 3)
    assert p[0][0] == 1 and p[-1][1] == 10
    assert all(b + 1 == c for (_, b), (c, _) in zip(p, p[1:]))
    assert {b - a + 1 for a, b in p} <= {3, 4}


@pytest.mark.parametrize("variant", ["support", "domain"])
def test_dense_uniform(variant):
    n = 1000
    s = ArrayStream(n, np.arange(1, n + 1))
    out = fixed_baseline(s, BaselineConfig(n, 5, 100, seed=1, variant=variant))
    assert all(v == pytest.approx(1 / n) for v in out.hist.values)
    assert support_error(ExactDistribution.from_stream(s), out.hist) == pytest.approx(0, abs=1e-12)


def test_sparse_support_contrast():
    n = 10**4
    rng = np.random.default_rng(2)
    items = rng.choice(n, size=100, replace=False) + 1
    s = stream_from_counts(n, {int(i): 1 for i in items})
    P = ExactDistribution.from_stream(s)
    dom = fixed_baseline(s, BaselineConfig(n, 10, 200, seed=3, variant="domain"))
    sup = fixed_baseline(s, BaselineConfig(n, 10, 200, seed=3, variant="support"))
    assert sum(v == 0 for v in dom.hist.values) >= 9
    assert all(v == pytest.approx(0.01) for v in sup.hist.values)
    assert support_error(P, dom.hist) > 0.9 > support_error(P, sup.hist)


def test_one_sample_per_piece():
    n = 20
    s = stream_from_counts(n, {i: i for i in range(1, 21)})
    m = sum(range(1, 21))
    out = fixed_baseline(s, BaselineConfig(n, 20, 20, seed=0, variant="domain"))
    assert [out.hist(i) for i in range(1, 21)] == pytest.approx([i / m for i in range(1, 21)])


def test_scale_k():
    cfg = BaselineConfig(1000, 1, 300, scale_k=3)
    assert cfg.k == 100
    with pytest.raises(BadParams):
        BaselineConfig(1000, 5, 3)
