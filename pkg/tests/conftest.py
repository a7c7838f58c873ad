import itertools
from fractions import Fraction

import numpy as np
import pytest

from suphist import ExactDistribution


def brute_force_opt(P: ExactDistribution, k: int) -> Fraction:
    """Best k-piece support-aware error by enumerating every contiguous split
    of the supported items (in index order) and fitting each part's median."""
    items, cnts = P.support()
    c = [int(x) for x in cnts]
    N = len(c)
    best = None
    for parts in range(1, min(k, N) + 1):
        for cuts in itertools.combinations(range(1, N), parts - 1):
            bounds = (0,) + cuts + (N,)
            cost = 0
            for a, b in zip(bounds, bounds[1:]):
                seg = c[a:b]
                # any value in [lower median, upper median] is optimal; try all
                cost += min(sum(abs(x - v) for x in seg) for v in seg)
            best = cost if best is None else min(best, cost)
    return Fraction(best, P.total)


def random_dist(rng, n, support, max_count=20):
    items = rng.choice(n, size=support, replace=False) + 1
    counts = rng.integers(1, max_count + 1, size=support)
    return ExactDistribution(n, dict(zip(items.tolist(), counts.tolist())))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)
