"""Fixed-grid baselines: k equal-width pieces, each valued by a sampled median.

The support variant draws L0 samples restricted to each piece, so it only
sees supported items. The domain variant samples indices uniformly from
each piece, zero-mass ones included.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import BadParams, EmptyStream
from .histogram import Histogram
from .l0 import L0SamplerBank
from .onepass import ALGO_CHUNK, RunOutput
from .stream import StreamSource


@dataclass
class BaselineConfig:
    n: int
    k: int
    s: int
    seed: int = 0
    variant: str = "support"
    scale_k: int | None = None  # if set, use k = s // scale_k
    l0_delta: float = 0.01

    def __post_init__(self):
        if self.variant not in ("support", "domain"):
            raise BadParams(f"unknown baseline variant {self.variant!r}")
        if self.scale_k is not None:
            if self.scale_k < 1:
                raise BadParams("scale_k must be positive")
            self.k = max(1, self.s // self.scale_k)
        self.k = min(self.k, self.n)
        if self.k < 1 or self.s < self.k:
            raise BadParams("need 1 <= k <= s")

    def to_dict(self) -> dict:
        return asdict(self)


def equal_pieces(n: int, k: int) -> list[tuple[int, int]]:
    """k intervals of width floor(n/k) or ceil(n/k) tiling [1..n]."""
    cuts = [(j * n) // k for j in range(k + 1)]
    return [(cuts[j] + 1, cuts[j + 1]) for j in range(k)]


def _lower_median(x) -> float:
    s = np.sort(np.asarray(x, dtype=np.float64))
    return float(s[(len(s) - 1) // 2])


def fixed_baseline(source: StreamSource, cfg: BaselineConfig, chunk: int = ALGO_CHUNK) -> RunOutput:
    if source.n != cfg.n:
        raise BadParams(f"stream domain {source.n} != configured n {cfg.n}")
    rng = np.random.default_rng(cfg.seed)
    pieces = equal_pieces(cfg.n, cfg.k)
    per = cfg.s // cfg.k
    m = 0
    if cfg.variant == "support":
        bank = L0SamplerBank(cfg.n, pieces, per, seed=int(rng.integers(2**63)), delta=cfg.l0_delta)
        for items, deltas in source.chunks(chunk):
            m += int(deltas.sum())
            bank.update(items, deltas)
        if m <= 0:
            raise EmptyStream("stream has no mass")
        vals = [_lower_median([p for _, p in got]) if got else 0.0 for got in bank.successes(m)]
    else:
        draws = np.concatenate([rng.integers(a, b + 1, size=per) for a, b in pieces])
        uniq, inv = np.unique(draws, return_inverse=True)
        counters = np.zeros(len(uniq), dtype=np.int64)
        for items, deltas in source.chunks(chunk):
            m += int(deltas.sum())
            pos = np.searchsorted(uniq, items)
            pos[pos == len(uniq)] = 0
            hit = uniq[pos] == items
            np.add.at(counters, pos[hit], deltas[hit])
        if m <= 0:
            raise EmptyStream("stream has no mass")
        masses = (counters[inv] / m).reshape(cfg.k, per)
        vals = [_lower_median(row) for row in masses]
    f = Histogram.from_pieces(cfg.n, [(a, b, min(max(v, 0.0), 1.0)) for (a, b), v in zip(pieces, vals)])
    return RunOutput(f, per * cfg.k, {"k": cfg.k, "m": m})
