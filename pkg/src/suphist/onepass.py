"""One-pass support-aware histogram: heavy hitters plus a sampled DP.

Theory mode draws ``s`` uniform domain indices before the pass, counts them
exactly, and runs a heavy-hitter sketch with ``ell = sqrt(n)/eps**2``. The
output is the k-piece DP over sampled non-heavy items with every reported
heavy item overlaid as its own unit piece.

Experimental mode follows the space split used in benchmarks: half the budget
is a space-saving summary whose entries all become unit pieces, the other
half is L0 samplers feeding the DP; stretches between DP segments take the
median mass of all samples.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import BadParams, EmptyStream
from .heavy_hitters import SpaceSaving, make_hh_sketch
from .histogram import (
    Histogram,
    WeightedPointSet,
    optimal_histogram_samples,
    sample_segments,
)
from .l0 import L0SamplerBank
from .stream import StreamSource

ALGO_CHUNK = 1 << 20


def default_samples(n: int, k: int, eps: float, const: float = 4.0) -> int:
    """``ceil(const * sqrt(n) * log2(n) * k / eps**3)``, capped at n."""
    return min(n, math.ceil(const * math.sqrt(n) * math.log2(max(n, 2)) * k / eps**3))


@dataclass
class OnePassConfig:
    n: int
    k: int
    eps: float
    s: int | None = None
    seed: int = 0
    support_bound: int | None = None
    hh_mode: str = "turnstile"
    experimental: bool = False
    l0_delta: float = 0.01

    def __post_init__(self):
        if not 0 < self.eps < 1:
            raise BadParams("eps must be in (0, 1)")
        if self.k < 1 or self.n < 1:
            raise BadParams("need n >= 1 and k >= 1")
        if self.s is None:
            if self.experimental:
                raise BadParams("experimental mode needs an explicit space budget s")
            self.s = default_samples(self.support_bound or self.n, self.k, self.eps)
        if self.s < 1:
            raise BadParams("s must be positive")
        if self.experimental and self.s < 2:
            raise BadParams("experimental mode splits s in two; need s >= 2")

    @property
    def ell(self) -> float:
        return max(1.0, math.sqrt(self.n) / self.eps**2)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class RunOutput:
    hist: Histogram
    space: int
    info: dict


def _positive_samples(indices, counts, m):
    return WeightedPointSet(indices, np.asarray(counts, dtype=np.float64) / m).positive()


def onepass_run(source: StreamSource, cfg: OnePassConfig, chunk: int = ALGO_CHUNK) -> RunOutput:
    if source.n != cfg.n:
        raise BadParams(f"stream domain {source.n} != configured n {cfg.n}")
    if cfg.experimental:
        return _run_experimental(source, cfg, chunk)
    rng = np.random.default_rng(cfg.seed)
    hh_seed = int(rng.integers(2**63))
    hh = make_hh_sketch(cfg.n, cfg.ell, cfg.eps, cfg.hh_mode, seed=hh_seed)
    use_l0 = cfg.support_bound is not None
    if use_l0:
        bank = L0SamplerBank(cfg.n, [(1, cfg.n)], cfg.s, seed=int(rng.integers(2**63)), delta=cfg.l0_delta)
    else:
        drawn = rng.integers(1, cfg.n + 1, size=cfg.s)
        uniq = np.unique(drawn)
        counters = np.zeros(len(uniq), dtype=np.int64)
    m = 0
    for items, deltas in source.chunks(chunk):
        m += int(deltas.sum())
        hh.update(items, deltas)
        if use_l0:
            bank.update(items, deltas)
        else:
            pos = np.searchsorted(uniq, items)
            pos[pos == len(uniq)] = 0
            hit = uniq[pos] == items
            np.add.at(counters, pos[hit], deltas[hit])
    if m <= 0:
        raise EmptyStream("stream has no mass")
    Z = hh.query(cfg.ell, m)
    zset = np.array(sorted(Z), dtype=np.int64)
    if use_l0:
        got = bank.successes(m)[0]
        idx = np.array([i for i, _ in got], dtype=np.int64)
        mass = np.array([p for _, p in got], dtype=np.float64)
        points = WeightedPointSet(idx, mass).positive()
        space = bank.words + hh.words
    else:
        cnt = counters[np.searchsorted(uniq, drawn)]
        points = _positive_samples(drawn, cnt, m)
        space = len(uniq) + hh.words
    keep = ~np.isin(points.indices, zset)
    points = WeightedPointSet(points.indices[keep], points.masses[keep])
    f = optimal_histogram_samples(points, cfg.k, cfg.n).overlay(Z)
    info = {"heavy": len(Z), "points": len(points), "m": m}
    return RunOutput(f, space, info)


def _lower_median(x: np.ndarray) -> float:
    s = np.sort(x)
    return float(s[(len(s) - 1) // 2])


def _run_experimental(source: StreamSource, cfg: OnePassConfig, chunk: int) -> RunOutput:
    rng = np.random.default_rng(cfg.seed)
    cap = max(1, cfg.s // 2)
    ss = SpaceSaving(cap, cfg.n)
    bank = L0SamplerBank(cfg.n, [(1, cfg.n)], cfg.s - cap, seed=int(rng.integers(2**63)), delta=cfg.l0_delta)
    m = 0
    for items, deltas in source.chunks(chunk):
        m += int(deltas.sum())
        ss.update(items, deltas)
        bank.update(items, deltas)
    if m <= 0:
        raise EmptyStream("stream has no mass")
    Z = ss.query(math.inf, m)
    got = bank.successes(m)[0]
    idx = np.array([i for i, _ in got], dtype=np.int64)
    mass = np.array([p for _, p in got], dtype=np.float64)
    fill = _lower_median(mass) if len(mass) else 0.0
    keep = ~np.isin(idx, np.array(sorted(Z), dtype=np.int64))
    segs = sample_segments(WeightedPointSet(idx[keep], mass[keep]), cfg.k)
    pieces = []
    cur = 1
    for a, b, v in segs:
        if a > cur:
            pieces.append((cur, a - 1, fill))
        pieces.append((a, b, min(max(v, 0.0), 1.0)))
        cur = b + 1
    if cur <= cfg.n:
        pieces.append((cur, cfg.n, fill))
    f = Histogram.from_pieces(cfg.n, pieces).overlay(Z)
    info = {"heavy": len(Z), "points": int(keep.sum()), "m": m}
    return RunOutput(f, cap + (cfg.s - cap), info)
