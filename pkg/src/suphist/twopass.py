"""Two-pass support-aware histogram.

Pass one finds hierarchical heavy hitters at threshold ``eps/(2k)`` and turns
them into singletons ``H`` and light intervals ``L``. Pass two counts every
item of ``H`` exactly and runs ``q`` interval-restricted L0 samplers per light
interval; each interval takes the lower median of its sampled masses.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import BadParams, EmptyStream, NonReplayableSource
from .hhh import (
    HHHSketch,
    IntervalPartition,
    build_partition,
    experimental_threshold,
    hhh_exact,
)
from .histogram import Histogram
from .l0 import L0SamplerBank
from .onepass import ALGO_CHUNK, RunOutput
from .stream import ExactDistribution, StreamSource

C_MED = 16


def default_q(k: int, eps: float, c_med: float = C_MED) -> int:
    return max(1, math.ceil(c_med * eps**-2 * max(1.0, math.log(k / eps))))


@dataclass
class TwoPassConfig:
    n: int
    k: int
    eps: float
    q: int | None = None
    seed: int = 0
    hhh_mode: str = "stream"  # "stream" or "exact"
    space: int | None = None  # experimental budget: threshold lg(n)/space, samples spread evenly
    l0_delta: float = 0.01

    def __post_init__(self):
        if not 0 < self.eps < 1:
            raise BadParams("eps must be in (0, 1)")
        if self.k < 1 or self.n < 1:
            raise BadParams("need n >= 1 and k >= 1")
        if self.hhh_mode not in ("stream", "exact"):
            raise BadParams(f"unknown HHH mode {self.hhh_mode!r}")
        if self.q is None:
            self.q = default_q(self.k, self.eps)
        if self.q < 1:
            raise BadParams("q must be positive")
        if self.space is not None and self.space < 1:
            raise BadParams("space budget must be positive")

    @property
    def phi(self) -> float:
        if self.space is not None:
            return experimental_threshold(self.n, self.space)
        return self.eps / (2 * self.k)

    def to_dict(self) -> dict:
        return asdict(self)


def _lower_median(x) -> float:
    s = sorted(x)
    return float(s[(len(s) - 1) // 2])


def _spread(total: int, parts: int) -> list[int]:
    base, extra = divmod(max(total, 0), parts)
    return [base + (j < extra) for j in range(parts)]


def twopass_run(source: StreamSource, cfg: TwoPassConfig, chunk: int = ALGO_CHUNK) -> RunOutput:
    if not source.replayable:
        raise NonReplayableSource("the two-pass algorithm needs a replayable stream")
    if source.n != cfg.n:
        raise BadParams(f"stream domain {source.n} != configured n {cfg.n}")
    rng = np.random.default_rng(cfg.seed)
    phi = cfg.phi

    # pass 1
    if cfg.hhh_mode == "exact":
        P = ExactDistribution.from_stream(source, chunk)
        m = P.total
        if m <= 0:
            raise EmptyStream("stream has no mass")
        T = hhh_exact(P, phi)
        sketch_words = 0
    else:
        mode = "insertion-only" if source.insertion_only else "turnstile"
        sk = HHHSketch(cfg.n, phi / 4, mode, seed=int(rng.integers(2**63)))
        sk.consume(source, chunk)
        m = sk.total
        if m <= 0:
            raise EmptyStream("stream has no mass")
        T = sk.extract(phi)
        sketch_words = sk.words
    part = build_partition(T, cfg.n)

    # pass 2
    H = np.array(part.H, dtype=np.int64)
    heavy_counts = np.zeros(len(H), dtype=np.int64)
    if cfg.space is not None and part.L:
        per = _spread(cfg.space - len(H), len(part.L))
    else:
        per = [cfg.q] * len(part.L)
    bank = L0SamplerBank(cfg.n, part.L, per, seed=int(rng.integers(2**63)), delta=cfg.l0_delta)
    for items, deltas in source.chunks(chunk):
        if len(H):
            pos = np.searchsorted(H, items)
            pos[pos == len(H)] = 0
            hit = H[pos] == items
            np.add.at(heavy_counts, pos[hit], deltas[hit])
        bank.update(items, deltas)

    values = {}
    for x, c in zip(part.H, heavy_counts.tolist()):
        values[(x, x)] = c / m
    for iv, got in zip(part.L, bank.successes(m)):
        values[iv] = _lower_median([p for _, p in got]) if got else 0.0
    pieces = [(a, b, min(max(values[(a, b)], 0.0), 1.0)) for a, b, _ in part.tiles()]
    f = Histogram.from_pieces(cfg.n, pieces)
    info = {"H": len(part.H), "L": len(part.L), "m": m, "partition": part}
    return RunOutput(f, len(H) + sum(per) + sketch_words, info)


def median_tail_check(masses, s: int, eps: float, trials: int, seed: int = 0) -> float:
    """Monte-Carlo rate at which a size-``s`` sample median costs more than
    ``eps * sum(masses)`` above the best constant fit.

    The cost of a constant ``c`` is ``sum |x - c|`` over all masses; the
    sample median is the lower median of ``s`` draws with replacement.
    """
    x = np.sort(np.asarray(masses, dtype=np.float64))
    if len(x) == 0 or s < 1:
        raise BadParams("need a non-empty mass set and s >= 1")
    beta = x.sum()
    csum = np.r_[0.0, np.cumsum(x)]
    N = len(x)

    def cost(c):
        r = np.searchsorted(x, c, side="right")
        return c * r - csum[r] + (csum[N] - csum[r]) - c * (N - r)

    best = cost(x[(N - 1) // 2])
    rng = np.random.default_rng(seed)
    fails = 0
    block = max(1, 2_000_000 // s)
    done = 0
    while done < trials:
        t = min(block, trials - done)
        draws = np.sort(rng.integers(0, N, size=(t, s)), axis=1)
        med = x[draws[:, (s - 1) // 2]]
        fails += int((cost(med) - best > eps * beta).sum())
        done += t
    return fails / trials
