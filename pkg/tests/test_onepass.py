import math

import numpy as np
import pytest

from suphist import (
    ArrayStream,
    BadParams,
    ExactDistribution,
    OnePassConfig,
    generate_synthetic,
    onepass_run,
    optimal_histogram_domain,
    optimal_histogram_exact,
    stream_from_counts,
    support_error,
)
from suphist.onepass import default_samples


def test_default_samples_formula():
    assert default_samples(1 << 20, 2, 0.5) == min(1 << 20, math.ceil(4 * 1024 * 20 * 2 / 0.125))
    assert default_samples(100, 1, 0.25) == 100


def test_config_validation():
    with pytest.raises(BadParams):
        OnePassConfig(10, 1, 1.5)
    with pytest.raises(BadParams):
        OnePassConfig(10, 1, 0.5, experimental=True)
    with pytest.raises(BadParams):
        onepass_run(ArrayStream(5, [1]), OnePassConfig(10, 1, 0.5))


def test_uniform_on_small_support():
    eps = 0.25
    wins = 0
    for t in range(10):
        rng = np.random.default_rng(t)
        n = 1 << 14
        items = rng.choice(n, size=40, replace=False) + 1
        s = stream_from_counts(n, {int(i): 3 for i in items}, seed=t)
        cfg = OnePassConfig(n, 1, eps, s=400, seed=t, support_bound=40)
        out = onepass_run(s, cfg)
        wins += support_error(ExactDistribution.from_stream(s), out.hist) <= eps
    assert wins >= 9


@pytest.mark.parametrize("hh_mode", ["turnstile", "insertion-only"])
def test_single_item(hh_mode):
    n, eps = 4096, 0.25
    s = ArrayStream(n, np.full(30, 77))
    cfg = OnePassConfig(n, 1, eps, s=50, seed=1, hh_mode=hh_mode)
    out = onepass_run(s, cfg)
    assert abs(out.hist(77) - 1) <= eps**3 / math.sqrt(n)
    assert support_error(ExactDistribution.from_stream(s), out.hist) <= eps


def test_even_uniform_contrast():
    n, eps = 10**4, 0.25
    s = generate_synthetic("even-uniform", n)
    P = ExactDistribution.from_stream(s)
    out = onepass_run(s, OnePassConfig(n, 1, eps, seed=0))
    assert support_error(P, out.hist) <= eps
    g, _ = optimal_histogram_domain(P, 1)
    assert support_error(P, g) >= 0.99


def test_explicit_small_sample_within_bound():
    # sampling path with s well below n
    eps = 0.25
    ok = 0
    for t in range(10):
        n = 1 << 15
        s = generate_synthetic("mice-elephants", n, seed=t, mice=400, elephants=4, elephant_count=200)
        P = ExactDistribution.from_stream(s)
        out = onepass_run(s, OnePassConfig(n, 2, eps, s=8000, seed=t, support_bound=404))
        _, opt = optimal_histogram_exact(P, 2)
        ok += support_error(P, out.hist) <= opt + eps
    assert ok >= 9


def test_turnstile_churn_same_answer():
    n = 1 << 12
    base = generate_synthetic("zipf", n, seed=3, length=5000, exponent=1.2)
    churn = generate_synthetic("zipf", n, seed=3, length=5000, exponent=1.2, churn=0.5)
    P = ExactDistribution.from_stream(base)
    cfg = OnePassConfig(n, 2, 0.5, seed=9)
    e1 = support_error(P, onepass_run(base, cfg).hist)
    e2 = support_error(P, onepass_run(churn, cfg).hist)
    _, opt = optimal_histogram_exact(P, 2)
    assert e1 <= opt + 0.5 and e2 <= opt + 0.5


def test_experimental_mode_runs():
    n = 5000
    s = generate_synthetic("zipf", n, seed=1, length=20000)
    P = ExactDistribution.from_stream(s)
    out = onepass_run(s, OnePassConfig(n, 4, 0.25, s=300, seed=2, experimental=True))
    assert out.space == 300
    assert out.hist.num_pieces <= 2 * 4 + 1 + 2 * out.info["heavy"]
    assert 0 <= support_error(P, out.hist) <= 1.0 + 1e-9


def test_deterministic():
    s = generate_synthetic("zipf", 3000, seed=1, length=10000)
    cfg = OnePassConfig(3000, 3, 0.25, s=500, seed=5)
    assert onepass_run(s, cfg).hist == onepass_run(s, cfg).hist
