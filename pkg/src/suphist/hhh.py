"""Hierarchical heavy hitters on the dyadic tree, and the heavy/light partition.

Nodes are ``(level, index)`` with 0-based index; node ``(l, i)`` covers the
1-based leaves ``[i*2**l + 1, (i+1)*2**l]``. A domain that is not a power of
two is padded with leaves that never receive mass, and padded leaves are
trimmed from every reported interval.

A node is marked when the mass of its residual set (its leaves minus those of
marked descendants) is at least ``phi``. The exact oracle and the streaming
version run the same bottom-up marking; the streaming version feeds it upper
and lower count bounds from per-level sketches and returns a superset of the
exact marking. Every unmarked node has a true residual below ``phi``
whenever the sketch bounds hold.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadParams, EmptyStream, InvalidHHHSet
from .heavy_hitters import DyadicCountMin, SpaceSaving, TOTAL_FAILURE, num_levels
from .stream import DEFAULT_CHUNK, ExactDistribution, StreamSource


@dataclass(frozen=True)
class HHHNode:
    level: int
    index: int
    residual: float
    residual_intervals: tuple[tuple[int, int], ...]

    @property
    def key(self) -> tuple[int, int]:
        return (self.level, self.index)

    def leaves(self, n: int) -> tuple[int, int]:
        lo = self.index * (1 << self.level) + 1
        return lo, min((self.index + 1) * (1 << self.level), n)

    @property
    def residual_size(self) -> int:
        return sum(b - a + 1 for a, b in self.residual_intervals)


@dataclass
class HHHSet:
    n: int
    phi: float
    nodes: list[HHHNode] = field(default_factory=list)

    def keys(self) -> set[tuple[int, int]]:
        return {h.key for h in self.nodes}

    def __len__(self):
        return len(self.nodes)


def _subtract(lo: int, hi: int, holes: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """[lo, hi] minus sorted disjoint sub-intervals, as maximal intervals."""
    out = []
    cur = lo
    for a, b in holes:
        if a > cur:
            out.append((cur, a - 1))
        cur = max(cur, b + 1)
    if cur <= hi:
        out.append((cur, hi))
    return out


class _Frontier:
    """Maximal marked nodes so far, sorted by first leaf (0-based)."""

    def __init__(self):
        self.starts: list[int] = []
        self.entries: list[tuple[int, int, int, int]] = []  # (start, end, upper, lower)

    def span(self, s, e):
        return bisect.bisect_left(self.starts, s), bisect.bisect_right(self.starts, e)

    def total(self, s, e, field_):
        lo, hi = self.span(s, e)
        return sum(t[field_] for t in self.entries[lo:hi])

    def absorb(self, s, e, upper, lower):
        lo, hi = self.span(s, e)
        holes = [(t[0], t[1]) for t in self.entries[lo:hi]]
        del self.starts[lo:hi], self.entries[lo:hi]
        self.starts.insert(lo, s)
        self.entries.insert(lo, (s, e, upper, lower))
        return holes


def mark_hhh(n: int, levels: int, candidates, phi_count: float, m: int, phi: float) -> HHHSet:
    """Bottom-up marking from per-level ``{node: (upper, lower)}`` count bounds.

    Two markings are grown together. A node is *possible* when its residual
    could reach the threshold: its upper count minus the lower counts of the
    maximal *certain* descendants. It is *certain* when its lower count minus
    the upper counts of the maximal *possible* descendants already does. By
    induction over levels, certain is a subset of the exact marking, which is
    a subset of possible; with exact counts all three coincide. The possible
    set is returned, with residual sets taken relative to it.
    """
    certain, possible = _Frontier(), _Frontier()
    nodes = []
    for lv in range(levels):
        span = 1 << lv
        poss, cert = [], []
        for x in sorted(candidates[lv]):
            upper, lower = candidates[lv][x]
            s, e = x * span, (x + 1) * span - 1
            r_up = upper - certain.total(s, e, 3)
            if r_up >= phi_count:
                poss.append((x, s, e, upper, lower, r_up))
                if lower - possible.total(s, e, 2) >= phi_count:
                    cert.append((s, e, upper, lower))
        for x, s, e, upper, lower, r_up in poss:
            holes = [(a + 1, b + 1) for a, b in possible.absorb(s, e, upper, lower)]
            intervals = [(a, min(b, n)) for a, b in _subtract(s + 1, e + 1, holes) if a <= n]
            nodes.append(HHHNode(lv, x, r_up / m, tuple(intervals)))
        for s, e, upper, lower in cert:
            certain.absorb(s, e, upper, lower)
    nodes.sort(key=lambda h: (h.level, h.index))
    return HHHSet(n, phi, nodes)


def _check_phi(phi):
    if not phi > 0:
        raise BadParams("phi must be positive")


def hhh_exact(P: ExactDistribution, phi: float) -> HHHSet:
    """Exact hierarchical heavy hitters with threshold ``phi`` (mass)."""
    _check_phi(phi)
    if P.total <= 0:
        raise EmptyStream("no mass to analyse")
    items, cnts = P.support()
    levels = num_levels(P.n)
    thr = phi * P.total
    cands = []
    for lv in range(levels):
        nodes = (items - 1) >> lv
        uniq, start = np.unique(nodes, return_index=True)
        sums = np.add.reduceat(cnts, start) if len(start) else cnts
        keep = sums >= thr
        cands.append({int(x): (int(c), int(c)) for x, c in zip(uniq[keep].tolist(), sums[keep].tolist())})
    return mark_hhh(P.n, levels, cands, thr, P.total, phi)


def hhh_reference(P: ExactDistribution, phi: float) -> set[tuple[int, int]]:
    """Plain recursive restatement of the definition, for cross-checking."""
    levels = num_levels(P.n)
    dense = np.zeros(1 << (levels - 1), dtype=np.int64)
    dense[: P.n] = P.dense_counts()
    marked: set[tuple[int, int]] = set()

    def visit(lv, i):
        if lv > 0:
            visit(lv - 1, 2 * i)
            visit(lv - 1, 2 * i + 1)
        covered = np.zeros(1 << lv, dtype=bool)
        for l2, j in marked:
            if l2 < lv and (j >> (lv - l2)) == i:
                off = j * (1 << l2) - i * (1 << lv)
                covered[off:off + (1 << l2)] = True
        seg = dense[i << lv:(i + 1) << lv]
        if seg[~covered].sum() >= phi * P.total:
            marked.add((lv, i))

    visit(levels - 1, 0)
    return marked


class HHHSketch:
    """Per-level frequency sketches for streaming hierarchical heavy hitters.

    ``mode='insertion-only'`` keeps one space-saving summary per level;
    ``mode='turnstile'`` keeps a dyadic count-min. Both are sized so that
    count bounds are off by at most ``eps_hh * m``.
    """

    def __init__(self, n: int, eps_hh: float, mode: str = "insertion-only", seed: int = 0,
                 total_failure: float = TOTAL_FAILURE):
        if not 0 < eps_hh < 1:
            raise BadParams("eps_hh must be in (0, 1)")
        self.n = int(n)
        self.eps_hh = eps_hh
        self.mode = mode
        self.levels = num_levels(self.n)
        self.total = 0
        if mode == "insertion-only":
            cap = math.ceil(1 / eps_hh)
            self.summaries = [SpaceSaving(cap) for _ in range(self.levels)]
        elif mode == "turnstile":
            width = math.ceil(2 / eps_hh)
            queries = 2 * math.ceil(2 / eps_hh) * self.levels + 1
            depth = max(1, math.ceil(math.log2(queries / total_failure)))
            self.cm = DyadicCountMin(self.n, width, depth, seed)
        else:
            raise BadParams(f"unknown HHH mode {mode!r}")

    def update(self, items, deltas):
        items = np.asarray(items, np.int64)
        deltas = np.asarray(deltas, np.int64)
        self.total += int(deltas.sum())
        if self.mode == "turnstile":
            self.cm.update(items, deltas)
            return
        zero = items - 1
        for lv, ss in enumerate(self.summaries):
            ss.update(zero >> lv, deltas)

    def consume(self, source: StreamSource, chunk: int = DEFAULT_CHUNK) -> "HHHSketch":
        for items, deltas in source.chunks(chunk):
            self.update(items, deltas)
        return self

    def candidates(self, threshold: float):
        if self.mode == "turnstile":
            return self.cm.level_candidates(threshold)
        out = []
        for ss in self.summaries:
            out.append({x: ul for x, ul in ss.bounds().items() if ul[0] >= threshold})
        return out

    def extract(self, phi: float) -> HHHSet:
        _check_phi(phi)
        if self.total <= 0:
            raise EmptyStream("no mass to analyse")
        thr = phi * self.total
        return mark_hhh(self.n, self.levels, self.candidates(thr), thr, self.total, phi)

    @property
    def words(self) -> int:
        if self.mode == "turnstile":
            return self.cm.words
        return sum(ss.words for ss in self.summaries)


def hhh_stream(source: StreamSource, phi: float, eps_hh: float | None = None,
               mode: str | None = None, seed: int = 0, chunk: int = DEFAULT_CHUNK) -> HHHSet:
    """One pass over ``source``; ``eps_hh`` defaults to ``phi / 4``."""
    _check_phi(phi)
    if phi > 1:
        return HHHSet(source.n, phi)
    if mode is None:
        mode = "insertion-only" if source.insertion_only else "turnstile"
    sk = HHHSketch(source.n, eps_hh or phi / 4, mode, seed).consume(source, chunk)
    return sk.extract(phi)


def experimental_threshold(n: int, s: int) -> float:
    """Space-budgeted heaviness threshold lg(n)/s, as a fraction of the stream."""
    return min(1.0, math.log2(max(n, 2)) / s)


# ---------------------------------------------------------------------------
# heavy / light partition


@dataclass(frozen=True)
class IntervalPartition:
    n: int
    H: tuple[int, ...]
    L: tuple[tuple[int, int], ...]

    def tiles(self) -> list[tuple[int, int, str]]:
        """All parts sorted by left end: ``(a, b, 'H' | 'L')``."""
        parts = [(x, x, "H") for x in self.H] + [(a, b, "L") for a, b in self.L]
        return sorted(parts)

    def is_tiling(self) -> bool:
        nxt = 1
        for a, b, _ in self.tiles():
            if a != nxt or b < a:
                return False
            nxt = b + 1
        return nxt == self.n + 1

    def __len__(self):
        return len(self.H) + len(self.L)


def _merge_adjacent(intervals):
    out = []
    for a, b in sorted(intervals):
        if out and a <= out[-1][1] + 1:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return out


def build_partition(T: HHHSet, n: int, k: int | None = None, eps: float | None = None) -> IntervalPartition:
    """Singleton residuals become H; other residuals are split at the node's
    midpoint into light intervals; uncovered gaps become light intervals too.

    ``k`` and ``eps`` only document the threshold the set was built with.
    """
    spans = sorted(iv for h in T.nodes for iv in h.residual_intervals)
    for (a1, b1), (a2, b2) in zip(spans, spans[1:]):
        if a2 <= b1:
            raise InvalidHHHSet(f"residual sets overlap at [{a2},{min(b1, b2)}]")
    if spans and (spans[0][0] < 1 or spans[-1][1] > n):
        raise InvalidHHHSet("residual interval outside the domain")
    H: list[int] = []
    L: list[tuple[int, int]] = []
    for h in T.nodes:
        if h.residual_size == 0:
            continue
        if h.residual_size == 1:
            H.append(h.residual_intervals[0][0])
            continue
        mid = h.index * (1 << h.level) + (1 << (h.level - 1))
        left = [(a, min(b, mid)) for a, b in h.residual_intervals if a <= mid]
        right = [(max(a, mid + 1), b) for a, b in h.residual_intervals if b > mid]
        L.extend(_merge_adjacent(left))
        L.extend(_merge_adjacent(right))
    covered = sorted([(x, x) for x in H] + L)
    L.extend(_subtract(1, n, covered))
    return IntervalPartition(n, tuple(sorted(H)), tuple(sorted(L)))
