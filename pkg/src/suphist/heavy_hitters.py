"""L1 heavy-hitter sketches.

Two back ends share one interface:

* :class:`DyadicCountMin` handles turnstile streams. It keeps one count-min
  table per level of the dyadic tree over the domain and finds heavy items by
  descending from the root. Levels with no more nodes than a table has
  counters are stored exactly instead, which costs no extra space.
* :class:`SpaceSaving` handles insertion-only streams (weighted updates).

Both answer ``query(ell)`` with a dict ``item -> z_i`` (estimated mass).
"""
from __future__ import annotations

import heapq
import math

import numpy as np

from .errors import BadParams, EmptyStream, NegativeDeltaUnsupported
from .hashing import draw_seeds, multiply_shift
from .stream import DEFAULT_CHUNK, StreamSource, StreamUpdate, aggregate

TOTAL_FAILURE = 0.05


def num_levels(n: int) -> int:
    """Levels 0..L of the dyadic tree over [1..n]; level L is the root."""
    return max(1, math.ceil(math.log2(n))) + 1 if n > 1 else 1


def contract_dims(ell: float, eps: float, n: int, total_failure: float = TOTAL_FAILURE):
    """Width and depth meeting ``|z_i - p_i| <= eps/ell`` for every query.

    The failure budget is split over every point query a root-to-leaf
    search can issue (about ``2 ell`` per level).
    """
    if ell < 1 or not 0 < eps < 1:
        raise BadParams("need ell >= 1 and eps in (0, 1)")
    width = math.ceil(2 * ell / eps)
    queries = 2 * math.ceil(ell * (1 + eps)) * num_levels(n) + 1
    depth = max(1, math.ceil(math.log2(queries / total_failure)))
    return width, depth


class HeavyHitterSketch:
    n: int
    total: int

    def update(self, items: np.ndarray, deltas: np.ndarray) -> None:
        raise NotImplementedError

    def hh_update(self, u: StreamUpdate) -> None:
        self.update(np.array([u[0]], dtype=np.int64), np.array([u[1]], dtype=np.int64))

    def consume(self, source: StreamSource, chunk: int = DEFAULT_CHUNK) -> "HeavyHitterSketch":
        for items, deltas in source.chunks(chunk):
            self.update(items, deltas)
        return self

    def query(self, ell: float, m: int | None = None) -> dict[int, float]:
        raise NotImplementedError

    @property
    def words(self) -> int:
        raise NotImplementedError


class DyadicCountMin(HeavyHitterSketch):
    """Count-min per dyadic level, searched top-down for heavy items."""

    def __init__(self, n: int, width: int, depth: int, seed: int = 0, max_report: int | None = None):
        if width < 1 or depth < 1:
            raise BadParams("width and depth must be positive")
        self.n = int(n)
        self.width = int(width)
        self.depth = int(depth)
        self.seed = seed
        self.max_report = max_report
        self.total = 0
        self.levels = num_levels(self.n)
        rng = np.random.default_rng(seed)
        self.tables: list[np.ndarray] = []
        self.exact: list[bool] = []
        self.seeds: list[np.ndarray | None] = []
        for lv in range(self.levels):
            size = -(-self.n // (1 << lv))
            if size <= self.width * self.depth:
                self.tables.append(np.zeros(size, dtype=np.int64))
                self.exact.append(True)
                self.seeds.append(None)
            else:
                self.tables.append(np.zeros((self.depth, self.width), dtype=np.int64))
                self.exact.append(False)
                self.seeds.append(draw_seeds(rng, self.depth))

    @classmethod
    def for_contract(cls, n, ell, eps, seed=0, total_failure=TOTAL_FAILURE):
        width, depth = contract_dims(ell, eps, n, total_failure)
        return cls(n, width, depth, seed, max_report=math.floor(4 * ell / eps))

    def update(self, items, deltas):
        items, deltas = aggregate(np.asarray(items, np.int64), np.asarray(deltas, np.int64))
        if len(items) == 0:
            return
        self.total += int(deltas.sum())
        zero = items - 1
        for lv in range(self.levels):
            nodes = zero >> lv
            tab = self.tables[lv]
            if self.exact[lv]:
                np.add.at(tab, nodes, deltas)
            else:
                for r in range(self.depth):
                    a, b = self.seeds[lv][r]
                    np.add.at(tab[r], multiply_shift(nodes, a, b, self.width), deltas)

    def estimate(self, level: int, nodes) -> np.ndarray:
        """Upper-bound counts for 0-based node ids at ``level`` (clamped at 0)."""
        nodes = np.asarray(nodes, dtype=np.int64)
        tab = self.tables[level]
        if self.exact[level]:
            return np.maximum(tab[nodes], 0)
        est = None
        for r in range(self.depth):
            a, b = self.seeds[level][r]
            row = tab[r][multiply_shift(nodes, a, b, self.width)]
            est = row if est is None else np.minimum(est, row)
        return np.maximum(est, 0)

    def additive_error(self) -> float:
        """Per-query additive slack in counts (holds with the configured probability)."""
        return 0.0 if all(self.exact) else 2.0 * self.total / self.width

    def level_candidates(self, threshold: float) -> list[dict[int, tuple[int, int]]]:
        """Per level, nodes whose upper estimate reaches ``threshold`` counts.

        Values are (upper, lower) count bounds. The search only descends
        below qualifying parents, so every node with true count at or above
        the threshold is found whenever the estimates hold.
        """
        out: list[dict[int, tuple[int, int]]] = [dict() for _ in range(self.levels)]
        frontier = np.zeros(1, dtype=np.int64)
        slack = self.additive_error()
        for lv in range(self.levels - 1, -1, -1):
            size = self.tables[lv].shape[0] if self.exact[lv] else -(-self.n // (1 << lv))
            frontier = frontier[frontier < size]
            if len(frontier) == 0:
                break
            est = self.estimate(lv, frontier)
            keep = est >= threshold
            lower = est if self.exact[lv] else np.maximum(est - slack, 0)
            out[lv] = {
                int(x): (int(u), int(lo_))
                for x, u, lo_ in zip(frontier[keep].tolist(), est[keep].tolist(), np.asarray(lower)[keep].tolist())
            }
            nodes = frontier[keep]
            frontier = np.concatenate([2 * nodes, 2 * nodes + 1])
            frontier.sort()
        return out

    def query(self, ell, m=None):
        m = self.total if m is None else m
        if m <= 0:
            raise EmptyStream("heavy-hitter query on an empty stream")
        leaves = self.level_candidates(m / ell)[0]
        found = {x + 1: min(u / m, 1.0) for x, (u, _) in leaves.items()}
        if self.max_report is not None and len(found) > self.max_report:
            top = sorted(found.items(), key=lambda kv: (-kv[1], kv[0]))[: self.max_report]
            found = dict(top)
        return dict(sorted(found.items()))

    def merge(self, other: "DyadicCountMin") -> "DyadicCountMin":
        """Counter-wise sum; both sketches must share dimensions and seed."""
        if (other.n, other.width, other.depth, other.seed) != (self.n, self.width, self.depth, self.seed):
            raise BadParams("can only merge sketches built with identical parameters")
        out = DyadicCountMin(self.n, self.width, self.depth, self.seed, self.max_report)
        out.tables = [a + b for a, b in zip(self.tables, other.tables)]
        out.total = self.total + other.total
        return out

    @property
    def words(self) -> int:
        return int(sum(t.size for t in self.tables))


class SpaceSaving(HeavyHitterSketch):
    """Weighted space-saving with at most ``capacity`` monitored items.

    Each entry keeps an overestimated count and the overestimate it may
    carry, so ``count - err <= true <= count``.
    """

    def __init__(self, capacity: int, n: int | None = None):
        if capacity < 1:
            raise BadParams("capacity must be positive")
        self.capacity = int(capacity)
        self.n = n
        self.total = 0
        self.count: dict[int, int] = {}
        self.err: dict[int, int] = {}
        self._heap: list[tuple[int, int]] = []

    @classmethod
    def for_contract(cls, n, ell, eps):
        return cls(math.ceil(2 * ell / eps), n)

    def _pop_min(self) -> tuple[int, int]:
        heap = self._heap
        while True:
            c, x = heapq.heappop(heap)
            if self.count.get(x) == c:
                return c, x

    def update(self, items, deltas):
        items = np.asarray(items, np.int64)
        deltas = np.asarray(deltas, np.int64)
        if len(deltas) and deltas.min() < 0:
            raise NegativeDeltaUnsupported("space-saving accepts insertions only")
        items, deltas = aggregate(items, deltas)
        count, err, heap, cap = self.count, self.err, self._heap, self.capacity
        for x, w in zip(items.tolist(), deltas.tolist()):
            self.total += w
            c = count.get(x)
            if c is not None:
                count[x] = c + w
            elif len(count) < cap:
                count[x] = w
                err[x] = 0
            else:
                cmin, y = self._pop_min()
                del count[y], err[y]
                count[x] = cmin + w
                err[x] = cmin
            heapq.heappush(heap, (count[x], x))
        if len(heap) > 4 * cap + 64:
            self._heap = [(c, x) for x, c in count.items()]
            heapq.heapify(self._heap)

    def min_count(self) -> int:
        """Upper bound on the true count of any unmonitored item."""
        return min(self.count.values()) if len(self.count) >= self.capacity else 0

    def bounds(self) -> dict[int, tuple[int, int]]:
        return {x: (c, c - self.err[x]) for x, c in self.count.items()}

    def query(self, ell, m=None):
        """Monitored items with count at least m/ell; z is the interval midpoint."""
        m = self.total if m is None else m
        if m <= 0:
            raise EmptyStream("heavy-hitter query on an empty stream")
        thr = m / ell
        return {
            x: min((c - self.err[x] / 2) / m, 1.0)
            for x, c in sorted(self.count.items())
            if c >= thr
        }

    @property
    def words(self) -> int:
        return 2 * self.capacity


def make_hh_sketch(n: int, ell: float, eps: float, mode: str = "turnstile", seed: int = 0):
    """Sketch meeting the heavy-hitter contract for threshold ``1/ell``, accuracy ``eps/ell``."""
    if mode == "turnstile":
        return DyadicCountMin.for_contract(n, ell, eps, seed)
    if mode == "insertion-only":
        return SpaceSaving.for_contract(n, ell, eps)
    raise BadParams(f"unknown heavy-hitter mode {mode!r}")


def hh_update(sk: HeavyHitterSketch, u: StreamUpdate) -> None:
    sk.hh_update(u)


def hh_query(sk: HeavyHitterSketch, ell: float, m: int | None = None) -> dict[int, float]:
    return sk.query(ell, m)
