"""Strict turnstile streams, the exact empirical distribution, and generators.

Items are 1-based integers in ``[1..n]``. A stream is a sequence of
``(item, delta)`` updates; in the strict turnstile model no running count may
ever become negative.
"""
from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from .errors import (
    BadParams,
    DomainViolation,
    EmptyStream,
    NegativeCount,
    NonReplayableSource,
    ParseError,
)

DEFAULT_CHUNK = 1 << 16
_ZIPF_TABLE_MAX = 1 << 22


class StreamUpdate(NamedTuple):
    item: int
    delta: int = 1


class StreamSource:
    """A stream over ``[1..n]`` that hands out its updates in numpy chunks.

    Subclasses implement :meth:`chunks`. Replayable sources yield the same
    sequence on every call, which the multi-pass algorithms rely on.
    """

    n: int
    replayable: bool = True

    def chunks(self, size: int = DEFAULT_CHUNK) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        raise NotImplementedError

    def __iter__(self) -> Iterator[StreamUpdate]:
        for items, deltas in self.chunks():
            for i, d in zip(items.tolist(), deltas.tolist()):
                yield StreamUpdate(i, d)

    @property
    def total_updates(self) -> int:
        return sum(len(items) for items, _ in self.chunks())

    @property
    def insertion_only(self) -> bool:
        return all(bool((d >= 0).all()) for _, d in self.chunks())


class ArrayStream(StreamSource):
    """In-memory replayable stream backed by two int64 arrays."""

    def __init__(self, n: int, items, deltas=None):
        if n < 1:
            raise BadParams(f"domain size must be positive, got {n}")
        self.n = int(n)
        self.items = np.ascontiguousarray(items, dtype=np.int64)
        if deltas is None:
            self.deltas = np.ones(len(self.items), dtype=np.int64)
        else:
            self.deltas = np.ascontiguousarray(deltas, dtype=np.int64)
        if self.items.shape != self.deltas.shape or self.items.ndim != 1:
            raise BadParams("items and deltas must be 1-D arrays of equal length")
        if len(self.items) and (self.items.min() < 1 or self.items.max() > self.n):
            bad = self.items[(self.items < 1) | (self.items > self.n)][0]
            raise DomainViolation(f"item {bad} outside [1..{self.n}]")

    def chunks(self, size: int = DEFAULT_CHUNK):
        for lo in range(0, len(self.items), size):
            yield self.items[lo:lo + size], self.deltas[lo:lo + size]

    @property
    def total_updates(self) -> int:
        return len(self.items)

    @property
    def insertion_only(self) -> bool:
        return bool((self.deltas >= 0).all())

    def __len__(self):
        return len(self.items)

    def concat(self, other: "ArrayStream") -> "ArrayStream":
        if other.n != self.n:
            raise BadParams("cannot concatenate streams over different domains")
        return ArrayStream(
            self.n,
            np.concatenate([self.items, other.items]),
            np.concatenate([self.deltas, other.deltas]),
        )


class OneShotStream(StreamSource):
    """Wraps an iterable of updates that can be consumed exactly once."""

    replayable = False

    def __init__(self, n: int, updates: Iterable):
        self.n = int(n)
        self._updates = iter(updates)
        self._consumed = False

    def chunks(self, size: int = DEFAULT_CHUNK):
        if self._consumed:
            raise NonReplayableSource("one-shot stream has already been consumed")
        self._consumed = True
        items, deltas = [], []
        for u in self._updates:
            item, delta = (u, 1) if isinstance(u, (int, np.integer)) else u
            if not 1 <= item <= self.n:
                raise DomainViolation(f"item {item} outside [1..{self.n}]")
            items.append(item)
            deltas.append(delta)
            if len(items) == size:
                yield np.array(items, dtype=np.int64), np.array(deltas, dtype=np.int64)
                items, deltas = [], []
        if items:
            yield np.array(items, dtype=np.int64), np.array(deltas, dtype=np.int64)

    @property
    def total_updates(self):
        raise NonReplayableSource("length of a one-shot stream is unknown before consumption")

    @property
    def insertion_only(self):
        raise NonReplayableSource("cannot inspect a one-shot stream ahead of time")


def aggregate(items: np.ndarray, deltas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Collapse a chunk to sorted distinct items with their net deltas (zeros dropped)."""
    if len(items) == 0:
        return items, deltas
    uniq, inv = np.unique(items, return_inverse=True)
    net = np.zeros(len(uniq), dtype=np.int64)
    np.add.at(net, inv, deltas)
    keep = net != 0
    return uniq[keep], net[keep]


class ExactDistribution:
    """Exact final counts ``m_i`` of a stream, stored sparsely.

    Zero counts are never stored, so ``len(counts)`` is the support size.
    """

    def __init__(self, n: int, counts: dict[int, int] | None = None):
        self.n = int(n)
        self.counts: dict[int, int] = {}
        self.total = 0
        for i, c in (counts or {}).items():
            if c < 0:
                raise NegativeCount(f"count for item {i} is negative")
            if not 1 <= i <= self.n:
                raise DomainViolation(f"item {i} outside [1..{self.n}]")
            if c:
                self.counts[int(i)] = int(c)
                self.total += int(c)
        self._arrays = None

    @classmethod
    def from_stream(cls, source: StreamSource, chunk: int = DEFAULT_CHUNK) -> "ExactDistribution":
        """Fold a whole stream, checking strictness on every prefix."""
        dist = cls(source.n)
        counts = dist.counts
        for items, deltas in source.chunks(chunk):
            if len(items) == 0:
                continue
            order = np.argsort(items, kind="stable")
            it, d = items[order], deltas[order]
            starts = np.flatnonzero(np.r_[True, it[1:] != it[:-1]])
            uniq = it[starts]
            base = np.array([counts.get(int(x), 0) for x in uniq.tolist()], dtype=np.int64)
            run = np.cumsum(d)
            prev = np.r_[0, run[starts[1:] - 1]]
            lengths = np.diff(np.r_[starts, len(it)])
            running = run - np.repeat(prev - base, lengths)
            if running.min() < 0:
                bad = it[np.argmax(running < 0)]
                raise NegativeCount(f"count of item {bad} goes negative")
            final = running[np.r_[starts[1:], len(it)] - 1]
            for x, c in zip(uniq.tolist(), final.tolist()):
                if c:
                    counts[x] = c
                else:
                    counts.pop(x, None)
        dist.total = sum(counts.values())
        return dist

    def apply(self, u: StreamUpdate) -> "ExactDistribution":
        item, delta = int(u[0]), int(u[1])
        if not 1 <= item <= self.n:
            raise DomainViolation(f"item {item} outside [1..{self.n}]")
        c = self.counts.get(item, 0) + delta
        if c < 0:
            raise NegativeCount(f"count of item {item} would become {c}")
        if c:
            self.counts[item] = c
        else:
            self.counts.pop(item, None)
        self.total += delta
        self._arrays = None
        return self

    def mass(self, i: int, exact: bool = False):
        if self.total <= 0:
            raise EmptyStream("mass is undefined for an empty stream")
        c = self.counts.get(int(i), 0)
        return Fraction(c, self.total) if exact else c / self.total

    def support(self) -> tuple[np.ndarray, np.ndarray]:
        """Sorted supported items and their counts as int64 arrays."""
        if self._arrays is None:
            items = np.array(sorted(self.counts), dtype=np.int64)
            cnts = np.array([self.counts[i] for i in items.tolist()], dtype=np.int64)
            self._arrays = (items, cnts)
        return self._arrays

    def masses(self) -> tuple[np.ndarray, np.ndarray]:
        if self.total <= 0:
            raise EmptyStream("masses are undefined for an empty stream")
        items, cnts = self.support()
        return items, cnts / self.total

    def dense_counts(self) -> np.ndarray:
        """Counts over the whole domain; index 0 is item 1."""
        out = np.zeros(self.n, dtype=np.int64)
        items, cnts = self.support()
        out[items - 1] = cnts
        return out

    def interval_count(self, a: int, b: int) -> int:
        items, cnts = self.support()
        lo, hi = np.searchsorted(items, [a, b + 1])
        return int(cnts[lo:hi].sum())

    @property
    def support_size(self) -> int:
        return len(self.counts)

    def __eq__(self, other):
        return (
            isinstance(other, ExactDistribution)
            and self.n == other.n
            and self.counts == other.counts
            and self.total == other.total
        )

    def __repr__(self):
        return f"ExactDistribution(n={self.n}, support={len(self.counts)}, total={self.total})"


def apply_update(dist: ExactDistribution, u: StreamUpdate) -> ExactDistribution:
    return dist.apply(u)


def mass(dist: ExactDistribution, i: int, exact: bool = False):
    return dist.mass(i, exact=exact)


# ---------------------------------------------------------------------------
# synthetic streams


def _with_churn(rng, n, items, deltas, churn):
    """Interleave insert/delete pairs that cancel, keeping every prefix valid."""
    pairs = int(round(churn * len(items)))
    if pairs == 0:
        return items, deltas
    length = max(len(items), 1)
    extra = rng.integers(1, n + 1, size=pairs)
    amount = rng.integers(1, 4, size=pairs)
    t1 = rng.uniform(0, length, size=pairs)
    t2 = t1 + rng.uniform(0, length, size=pairs)
    keys = np.concatenate([np.arange(len(items), dtype=float), t1, t2])
    all_items = np.concatenate([items, extra, extra])
    all_deltas = np.concatenate([deltas, amount, -amount])
    order = np.argsort(keys, kind="stable")
    return all_items[order], all_deltas[order]


def generate_synthetic(kind: str, n: int, seed: int = 0, churn: float = 0.0, **params) -> ArrayStream:
    """Deterministic synthetic stream for ``(kind, params, seed)``.

    Kinds:

    * ``even-uniform``: every even item gets ``count`` (default 1) insertions.
    * ``zipf``: ``length`` draws with P(rank r) proportional to r**-exponent;
      ranks map to items in order unless ``shuffle=True``.
    * ``uniform-sparse``: ``length`` draws uniform over ``support`` random items.
    * ``mice-elephants``: ``mice`` items with count ``mice_count`` and
      ``elephants`` items with count ``elephant_count`` at random positions.

    ``churn > 0`` adds that fraction of cancelling insert/delete pairs, which
    leaves the final distribution unchanged but exercises the turnstile path.
    """
    if n < 2:
        raise BadParams("need n >= 2")
    if churn < 0:
        raise BadParams("churn must be non-negative")
    rng = np.random.default_rng(seed)
    if kind == "even-uniform":
        count = int(params.get("count", 1))
        if count < 1:
            raise BadParams("count must be >= 1")
        evens = np.arange(2, n + 1, 2, dtype=np.int64)
        items = np.repeat(evens, count)
        items = items[rng.permutation(len(items))]
        deltas = np.ones(len(items), dtype=np.int64)
    elif kind == "zipf":
        a = float(params.get("exponent", 1.1))
        length = int(params.get("length", 10 * n))
        if a <= 0 or length < 1:
            raise BadParams("zipf needs exponent > 0 and length >= 1")
        if n <= _ZIPF_TABLE_MAX:
            p = np.arange(1, n + 1, dtype=float) ** -a
            p /= p.sum()
            ranks = rng.choice(n, size=length, p=p)
        elif a > 1:
            # truncated zipf by rejection; acceptance is high since the tail is thin
            ranks = np.empty(0, dtype=np.int64)
            while len(ranks) < length:
                draw = rng.zipf(a, size=2 * (length - len(ranks)))
                ranks = np.concatenate([ranks, draw[draw <= n][: length - len(ranks)] - 1])
        else:
            raise BadParams(f"zipf over n > {_ZIPF_TABLE_MAX} needs exponent > 1")
        if params.get("shuffle", False):
            ranks = rng.permutation(n)[ranks]
        items = ranks.astype(np.int64) + 1
        deltas = np.ones(length, dtype=np.int64)
    elif kind == "uniform-sparse":
        support = int(params.get("support", max(1, n // 100)))
        length = int(params.get("length", 10 * support))
        if not 1 <= support <= n or length < 1:
            raise BadParams("uniform-sparse needs 1 <= support <= n and length >= 1")
        chosen = rng.choice(n, size=support, replace=False) + 1
        items = chosen[rng.integers(0, support, size=length)].astype(np.int64)
        deltas = np.ones(length, dtype=np.int64)
    elif kind == "mice-elephants":
        mice = int(params.get("mice", 0))
        elephants = int(params.get("elephants", 0))
        mc = int(params.get("mice_count", 1))
        ec = int(params.get("elephant_count", 10))
        if mice < 0 or elephants < 0 or mice + elephants > n or mc < 1 or ec < 1:
            raise BadParams("inconsistent mice/elephant parameters")
        if mice + elephants == 0:
            raise BadParams("need at least one mouse or elephant")
        chosen = rng.choice(n, size=mice + elephants, replace=False) + 1
        items = np.concatenate([np.repeat(chosen[:mice], mc), np.repeat(chosen[mice:], ec)])
        items = items[rng.permutation(len(items))].astype(np.int64)
        deltas = np.ones(len(items), dtype=np.int64)
    else:
        raise BadParams(f"unknown synthetic kind {kind!r}")
    items, deltas = _with_churn(rng, n, items, deltas, churn)
    return ArrayStream(n, items, deltas)


# ---------------------------------------------------------------------------
# stream file format


def write_stream(path, source: StreamSource) -> None:
    """Write ``n=<int>`` followed by one ``<item>`` or ``<item>,<delta>`` per line."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"n={source.n}\n")
        for items, deltas in source.chunks():
            lines = [
                str(i) if d == 1 else f"{i},{d}"
                for i, d in zip(items.tolist(), deltas.tolist())
            ]
            if lines:
                fh.write("\n".join(lines))
                fh.write("\n")


def read_stream(path) -> ArrayStream:
    """Parse a stream file into a replayable in-memory stream."""
    n = None
    items, deltas = [], []
    with open(Path(path), encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if n is None:
                if not line.startswith("n="):
                    raise ParseError("expected header 'n=<int>'", lineno)
                try:
                    n = int(line[2:])
                except ValueError:
                    raise ParseError(f"bad domain size {line[2:]!r}", lineno) from None
                if n < 1:
                    raise ParseError("domain size must be positive", lineno)
                continue
            head, _, tail = line.partition(",")
            try:
                item = int(head)
                delta = int(tail) if tail else 1
            except ValueError:
                raise ParseError(f"malformed update {line!r}", lineno) from None
            if not 1 <= item <= n:
                raise ParseError(f"item {item} outside [1..{n}]", lineno)
            items.append(item)
            deltas.append(delta)
    if n is None:
        raise ParseError("missing header 'n=<int>'")
    return ArrayStream(n, np.array(items, dtype=np.int64), np.array(deltas, dtype=np.int64))


def stream_from_counts(n: int, counts: dict[int, int], seed: int | None = None) -> ArrayStream:
    """One ``(item, count)`` update per supported item, optionally shuffled."""
    items = np.array(sorted(counts), dtype=np.int64)
    deltas = np.array([counts[i] for i in items.tolist()], dtype=np.int64)
    if seed is not None:
        perm = np.random.default_rng(seed).permutation(len(items))
        items, deltas = items[perm], deltas[perm]
    return ArrayStream(n, items, deltas)

