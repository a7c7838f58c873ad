"""L0 samplers for strict turnstile streams.

Each sampler keeps ``reps`` independent repetitions of nested subsampling
levels. Level ``l`` admits an item when its hash has at least ``l`` trailing
zero bits, and each level holds one 1-sparse recovery unit (sum of counts,
sum of item*count, sum of item**2*count mod 2**64). Storage is per exact
depth; a level is the sum of the depth buckets at or below it. At query time
the deepest non-empty level is tested; if it holds exactly one item, that
item is the unique deepest one and therefore uniform over the support.

Samplers are grouped by disjoint restriction intervals so an update only
touches the samplers whose interval contains it.
"""
from __future__ import annotations

import math

import numpy as np

from . import _kernels
from .errors import BadParams
from .stream import DEFAULT_CHUNK, StreamSource, StreamUpdate, aggregate

# Per-repetition chance that the deepest level is shared by two or more items
# stays below this for every support size (geometric maxima), so ``reps``
# repetitions fail with probability at most REP_FAILURE**reps.
REP_FAILURE = 0.3


class _EmptySupport:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "EMPTY_SUPPORT"

    def __bool__(self):
        return False


EMPTY_SUPPORT = _EmptySupport()


def reps_for(delta: float) -> int:
    if not 0 < delta < 1:
        raise BadParams("delta must be in (0, 1)")
    return max(1, math.ceil(math.log(delta) / math.log(REP_FAILURE)))


class L0SamplerBank:
    """Many independent samplers, ``per_interval[j]`` of them restricted to ``intervals[j]``.

    Intervals must be disjoint. Items outside every interval are ignored.
    """

    def __init__(self, n: int, intervals, per_interval, seed: int = 0, delta: float = 0.01,
                 reps: int | None = None):
        self.n = int(n)
        iv = [(int(a), int(b)) for a, b in intervals]
        if isinstance(per_interval, (int, np.integer)):
            per = [int(per_interval)] * len(iv)
        else:
            per = [int(q) for q in per_interval]
        if len(per) != len(iv):
            raise BadParams("need one sampler count per interval")
        if any(q < 0 for q in per):
            raise BadParams("sampler counts must be non-negative")
        order = sorted(range(len(iv)), key=lambda j: iv[j][0])
        for j in order:
            a, b = iv[j]
            if not 1 <= a <= b <= self.n:
                raise BadParams(f"interval [{a},{b}] not inside [1..{self.n}]")
        for j1, j2 in zip(order, order[1:]):
            if iv[j1][1] >= iv[j2][0]:
                raise BadParams("restriction intervals overlap")
        self.intervals = iv
        self.per_interval = per
        self.group_start = np.zeros(len(iv) + 1, dtype=np.int64)
        np.cumsum(per, out=self.group_start[1:])
        self.size = int(self.group_start[-1])
        self.reps = reps if reps is not None else reps_for(delta)
        self.delta = REP_FAILURE ** self.reps
        self.n_levels = max(1, math.ceil(math.log2(max(self.n, 2)))) + 3
        shape = (self.size, self.reps, self.n_levels)
        self.cnt = np.zeros(shape, dtype=np.int64)
        self.idx = np.zeros(shape, dtype=np.int64)
        self.sq = np.zeros(shape, dtype=np.uint64)
        rng = np.random.default_rng(seed)
        self.seeds = rng.integers(0, 2**64, size=(self.size, self.reps), dtype=np.uint64)
        self._a = np.array([a for a, _ in iv], dtype=np.int64)
        self._b = np.array([b for _, b in iv], dtype=np.int64)
        self._lo = np.repeat(self._a, per)
        self._hi = np.repeat(self._b, per)

    def update(self, items, deltas) -> None:
        items, deltas = aggregate(np.asarray(items, np.int64), np.asarray(deltas, np.int64))
        if len(items) == 0 or self.size == 0:
            return
        item_lo = np.searchsorted(items, self._a, side="left")
        item_hi = np.searchsorted(items, self._b, side="right")
        _kernels.l0_update(
            self.cnt, self.idx, self.sq, self.seeds, self.group_start, item_lo, item_hi, items, deltas
        )

    def consume(self, source: StreamSource, chunk: int = DEFAULT_CHUNK) -> "L0SamplerBank":
        for items, deltas in source.chunks(chunk):
            self.update(items, deltas)
        return self

    def recover(self):
        """Arrays (status, item, count) per sampler: 0 failed, 1 ok, 2 empty support."""
        return _kernels.l0_recover(self.cnt, self.idx, self.sq, self._lo, self._hi)

    def samples(self, m: int) -> list[list]:
        """Per interval (in constructor order), each sampler's outcome.

        Outcomes are ``(item, mass)``, ``None`` on failure, or ``EMPTY_SUPPORT``.
        """
        status, item, count = self.recover()
        out = []
        for j in range(len(self.intervals)):
            res = []
            for s in range(self.group_start[j], self.group_start[j + 1]):
                if status[s] == 1:
                    res.append((int(item[s]), int(count[s]) / m))
                elif status[s] == 2:
                    res.append(EMPTY_SUPPORT)
                else:
                    res.append(None)
            out.append(res)
        return out

    def successes(self, m: int) -> list[list[tuple[int, float]]]:
        """Only the recovered ``(item, mass)`` pairs, per interval."""
        status, item, count = self.recover()
        out = []
        for j in range(len(self.intervals)):
            sl = slice(self.group_start[j], self.group_start[j + 1])
            ok = status[sl] == 1
            out.append(list(zip(item[sl][ok].tolist(), (count[sl][ok] / m).tolist())))
        return out

    @property
    def words(self) -> int:
        return 3 * self.cnt.size


class L0Sampler:
    """A single sampler, optionally restricted to ``[a, b]``; one sampler gives one draw."""

    def __init__(self, n: int, restriction: tuple[int, int] | None = None, seed: int = 0,
                 delta: float = 0.01):
        self.restriction = restriction or (1, n)
        self._bank = L0SamplerBank(n, [self.restriction], 1, seed=seed, delta=delta)

    @property
    def delta(self) -> float:
        return self._bank.delta

    def update(self, u: StreamUpdate) -> None:
        self._bank.update(np.array([u[0]], np.int64), np.array([u[1]], np.int64))

    def update_many(self, items, deltas) -> None:
        self._bank.update(items, deltas)

    def state(self):
        """Per-depth units, shape (reps, depths) each."""
        return self._bank.cnt[0].copy(), self._bank.idx[0].copy(), self._bank.sq[0].copy()

    def level_units(self):
        """Nested-level units: level ``l`` sums depth buckets ``l..``."""
        out = []
        for arr in self.state():
            out.append(np.flip(np.cumsum(np.flip(arr, axis=1), axis=1), axis=1))
        return tuple(out)

    def sample(self, m: int):
        return self._bank.samples(m)[0][0]


def l0_update(s: L0Sampler, u: StreamUpdate) -> None:
    s.update(u)


def l0_sample(s: L0Sampler, m: int):
    return s.sample(m)
