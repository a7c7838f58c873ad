"""Piecewise-constant histograms, support-aware error, and optimal fitting.

A histogram over ``[1..n]`` is stored as sorted breakpoints ``i_1 <= ... <=
i_{k-1}`` and piece values ``g_1..g_k``; piece ``j`` covers
``{i_{j-1}+1, ..., i_j}`` with ``i_0 = 0`` and ``i_k = n``, so an item equal to
a breakpoint belongs to the piece on its left.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import DomainViolation, EmptyPointSet, EmptyStream
from .stream import ExactDistribution


@dataclass(frozen=True)
class Histogram:
    n: int
    breakpoints: tuple[int, ...] = ()
    values: tuple[float, ...] = (0.0,)

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", tuple(int(b) for b in self.breakpoints))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if self.n < 1:
            raise ValueError("domain size must be positive")
        if len(self.values) != len(self.breakpoints) + 1:
            raise ValueError("need exactly one more value than breakpoints")
        bp = self.breakpoints
        if any(b < 1 or b > self.n for b in bp):
            raise ValueError("breakpoints must lie in [1..n]")
        if any(x > y for x, y in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be non-decreasing")
        if any(not 0.0 <= v <= 1.0 for v in self.values):
            raise ValueError("histogram values must lie in [0, 1]")

    @classmethod
    def constant(cls, n: int, value: float = 0.0) -> "Histogram":
        return cls(n, (), (value,))

    @classmethod
    def from_pieces(cls, n: int, pieces: Sequence[tuple[int, int, float]]) -> "Histogram":
        """Build from ``(start, end, value)`` triples that tile ``[1..n]`` in order."""
        if not pieces:
            return cls.constant(n)
        expect = 1
        for start, end, _ in pieces:
            if start != expect or end < start:
                raise ValueError(f"pieces do not tile [1..{n}] at {start}")
            expect = end + 1
        if expect != n + 1:
            raise ValueError(f"pieces end at {expect - 1}, not {n}")
        return cls(n, [p[1] for p in pieces[:-1]], [p[2] for p in pieces])

    @property
    def num_pieces(self) -> int:
        return len(self.values)

    @cached_property
    def _bp(self) -> np.ndarray:
        return np.asarray(self.breakpoints, dtype=np.int64)

    @cached_property
    def _vals(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)

    def pieces(self) -> list[tuple[int, int, float]]:
        """Non-empty pieces as ``(start, end, value)``."""
        out = []
        lo = 1
        for b, v in zip(self.breakpoints + (self.n,), self.values):
            if b >= lo:
                out.append((lo, b, v))
                lo = b + 1
        return out

    def __call__(self, i):
        """Evaluate at one item or an array of items."""
        arr = np.asarray(i, dtype=np.int64)
        if arr.size and (arr.min() < 1 or arr.max() > self.n):
            raise DomainViolation(f"item outside [1..{self.n}]")
        out = self._vals[np.searchsorted(self._bp, arr, side="left")]
        return float(out) if out.ndim == 0 else out

    def piece_mass(self) -> float:
        """Sum of f(i) over the whole domain."""
        return sum((e - s + 1) * v for s, e, v in self.pieces())

    def to_dict(self) -> dict:
        return {"n": self.n, "breakpoints": list(self.breakpoints), "values": list(self.values)}

    def to_json(self, **extra) -> str:
        return json.dumps({**self.to_dict(), **extra})

    @classmethod
    def from_dict(cls, d: dict) -> "Histogram":
        return cls(int(d["n"]), d["breakpoints"], d["values"])

    @classmethod
    def from_json(cls, text: str) -> "Histogram":
        return cls.from_dict(json.loads(text))

    def overlay(self, points: dict[int, float]) -> "Histogram":
        """Give each listed item its own unit-width piece with the given value."""
        if not points:
            return self
        pieces = self.pieces()
        out = []
        keys = sorted(points)
        t = 0
        for s, e, v in pieces:
            cur = s
            while t < len(keys) and keys[t] <= e:
                x = keys[t]
                if x > cur:
                    out.append((cur, x - 1, v))
                out.append((x, x, min(max(points[x], 0.0), 1.0)))
                cur = x + 1
                t += 1
            if cur <= e:
                out.append((cur, e, v))
        return Histogram.from_pieces(self.n, out)


def evaluate(f: Histogram, i):
    return f(i)


def support_error(P: ExactDistribution, f: Histogram) -> float:
    """Sum of |p_i - f(i)| over the support of P only."""
    if P.total <= 0:
        raise EmptyStream("error is undefined for an empty stream")
    if f.n != P.n:
        raise ValueError(f"histogram domain {f.n} != distribution domain {P.n}")
    items, masses = P.masses()
    return float(np.abs(masses - f(items)).sum())


def domain_error(P: ExactDistribution, f: Histogram) -> float:
    """Sum of |p_i - f(i)| over the whole domain [1..n]."""
    if P.total <= 0:
        raise EmptyStream("error is undefined for an empty stream")
    if f.n != P.n:
        raise ValueError(f"histogram domain {f.n} != distribution domain {P.n}")
    items, masses = P.masses()
    fv = f(items)
    return float(np.abs(masses - fv).sum() + f.piece_mass() - fv.sum())


# ---------------------------------------------------------------------------
# weighted point sets and segment costs


@dataclass
class WeightedPointSet:
    """Sampled ``(index, mass)`` pairs, sorted by index; repeats are kept."""

    indices: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    masses: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.float64))

    def __post_init__(self):
        self.indices = np.asarray(self.indices, dtype=np.int64)
        self.masses = np.asarray(self.masses, dtype=np.float64)
        if self.indices.shape != self.masses.shape:
            raise ValueError("indices and masses must align")
        order = np.argsort(self.indices, kind="stable")
        self.indices = self.indices[order]
        self.masses = self.masses[order]

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, float]]) -> "WeightedPointSet":
        pairs = list(pairs)
        return cls([p[0] for p in pairs], [p[1] for p in pairs])

    def __len__(self):
        return len(self.indices)

    def positive(self) -> "WeightedPointSet":
        keep = self.masses > 0
        return WeightedPointSet(self.indices[keep], self.masses[keep])


def interval_cost(points) -> tuple[float, float]:
    """Lower median of the masses and the L1 cost of fitting it.

    Accepts a :class:`WeightedPointSet` or a plain sequence of masses.
    """
    m = points.masses if isinstance(points, WeightedPointSet) else np.asarray(points, dtype=float)
    if len(m) == 0:
        raise EmptyPointSet("interval_cost needs at least one point")
    s = np.sort(m)
    med = float(s[(len(s) - 1) // 2])
    return med, float(np.abs(s - med).sum())


def _compress(positions: np.ndarray, vals: np.ndarray):
    """Merge consecutive equal values into weighted runs.

    An L1-optimal segmentation never needs a cut inside a run of equal values
    (the cost is linear in the cut position there), so the DP can work on runs.
    Returns run values, run weights and the first position of each run.
    """
    starts = np.flatnonzero(np.r_[True, vals[1:] != vals[:-1]])
    weights = np.diff(np.r_[starts, len(vals)]).astype(np.int64)
    return vals[starts].astype(np.float64), weights, positions[starts]


def _group_samples(S: WeightedPointSet):
    """Collapse repeated indices of a sample multiset into weights."""
    idx, first, inv, cnt = np.unique(
        S.indices, return_index=True, return_inverse=True, return_counts=True
    )
    vals = S.masses[first]
    if not np.array_equal(vals[inv], S.masses):
        raise ValueError("one index sampled with two different masses")
    return idx, vals, cnt.astype(np.int64)


def _segment(vals, wts, k, tol):
    cost, ends = _kernels.segment_dp(
        np.ascontiguousarray(vals, dtype=np.float64),
        np.ascontiguousarray(wts, dtype=np.int64),
        int(k),
        float(tol),
    )
    return float(cost), ends


def _fit_runs(n, run_vals, run_wts, run_first, k, scale, tol):
    """Shared DP driver: runs -> (Histogram, cost in value units).

    Each segment's piece begins right after the previous segment's last run
    (first piece starts at 1) and the final piece reaches ``n``.
    """
    cost, ends = _segment(run_vals, run_wts, k, tol)
    pieces = []
    start = 0
    lo = 1
    for j, e in enumerate(ends):
        seg_vals = run_vals[start:e + 1]
        seg_wts = run_wts[start:e + 1]
        med = _kernels.lower_weighted_median(seg_vals, seg_wts)
        hi = n if j == len(ends) - 1 else int(run_first[e + 1]) - 1
        pieces.append((lo, hi, min(max(med / scale, 0.0), 1.0)))
        lo = hi + 1
        start = e + 1
    return Histogram.from_pieces(n, pieces), cost


def optimal_cost_counts(P: ExactDistribution, k: int) -> int:
    """Optimal k-piece support-aware error times m (an exact integer)."""
    return int(round(_optimal_exact(P, k)[1]))


def _optimal_exact(P: ExactDistribution, k: int):
    if P.total <= 0:
        raise EmptyStream("no support to fit")
    if k < 1:
        raise ValueError("k must be at least 1")
    items, cnts = P.support()
    rv, rw, rf = _compress(items, cnts.astype(np.float64))
    return _fit_runs(P.n, rv, rw, rf, k, float(P.total), tol=0.5)


def optimal_histogram_exact(P: ExactDistribution, k: int) -> tuple[Histogram, float]:
    """Best k-piece histogram under support-aware error, by DP over the support.

    Works in integer counts so the optimum is found exactly; the returned
    error is that integer divided by m.
    """
    f, cost = _optimal_exact(P, k)
    return f, round(cost) / P.total


def optimal_histogram_domain(P: ExactDistribution, k: int) -> tuple[Histogram, float]:
    """Best k-piece histogram under support-oblivious error (whole domain)."""
    if P.total <= 0:
        raise EmptyStream("no support to fit")
    dense = P.dense_counts().astype(np.float64)
    positions = np.arange(1, P.n + 1, dtype=np.int64)
    rv, rw, rf = _compress(positions, dense)
    f, cost = _fit_runs(P.n, rv, rw, rf, k, float(P.total), tol=0.5)
    return f, round(cost) / P.total


def sample_segments(S: WeightedPointSet, k: int) -> list[tuple[int, int, float]]:
    """Best k-segmentation of the positive-mass samples.

    Returns ``(first index, last index, median mass)`` per segment; the gaps
    between segments are left to the caller.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    S = S.positive()
    if len(S) == 0:
        return []
    idx, vals, cnt = _group_samples(S)
    starts = np.flatnonzero(np.r_[True, vals[1:] != vals[:-1]])
    run_vals = vals[starts]
    run_wts = np.add.reduceat(cnt, starts).astype(np.int64)
    run_first = idx[starts]
    run_last = idx[np.r_[starts[1:], len(vals)] - 1]
    tol = 1e-12 * float((vals * cnt).sum())
    _, ends = _segment(run_vals, run_wts, k, tol)
    out = []
    start = 0
    for e in ends:
        med = _kernels.lower_weighted_median(run_vals[start:e + 1], run_wts[start:e + 1])
        out.append((int(run_first[start]), int(run_last[e]), float(med)))
        start = e + 1
    return out


def optimal_histogram_samples(S: WeightedPointSet, k: int, n: int) -> Histogram:
    """Best k-piece histogram for a sample multiset (repeats weigh double).

    Zero-mass samples lie off the support and are ignored. Each piece runs
    from just after the previous segment's last sample to just before the
    next segment's first sample; the first starts at 1 and the last ends at n.
    """
    segs = sample_segments(S, k)
    if not segs:
        return Histogram.constant(n)
    pieces = []
    lo = 1
    for j, (_, _, v) in enumerate(segs):
        hi = n if j == len(segs) - 1 else segs[j + 1][0] - 1
        pieces.append((lo, hi, min(max(v, 0.0), 1.0)))
        lo = hi + 1
    return Histogram.from_pieces(n, pieces)


# ---------------------------------------------------------------------------
# sample-based error estimate


def mass_bucket(mass, eps: float, z_max: int | None = None):
    """Bucket z with mass in ((1+eps)^-(z+1), (1+eps)^-z]."""
    m = np.asarray(mass, dtype=np.float64)
    z = np.floor(np.log(1.0 / m) / math.log1p(eps) + 1e-12).astype(np.int64)
    z = np.maximum(z, 0)
    if z_max is not None:
        z = np.minimum(z, z_max)
    return z


def est_error(S: WeightedPointSet, n: int, s: int, h: Histogram, eps: float,
              z_max: int | None = None) -> float:
    """Sample estimate of err_P(h) with masses rounded to (1+eps)-buckets.

    Each positive-mass sample contributes (n/s) * |h(i) - (1+eps)^-z| where z
    is the bucket of its mass; ``z_max`` clamps tiny masses to the last bucket.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must be in (0, 1)")
    pos = S.positive()
    if len(pos) == 0:
        return 0.0
    z = mass_bucket(pos.masses, eps, z_max)
    rep = (1.0 + eps) ** (-z.astype(np.float64))
    return float((n / s) * np.abs(h(pos.indices) - rep).sum())
