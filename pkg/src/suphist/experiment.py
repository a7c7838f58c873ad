"""Single runs and space sweeps with CSV output.

Detail CSV columns (in order)::

    algorithm,space,trial,seed,k,eps,words,pieces,support_error,domain_error

Summary CSV columns (in order)::

    algorithm,space,trials,mean_support_error,std_support_error,
    mean_domain_error,std_domain_error,mean_pieces,mean_words

Standard deviations use ``ddof=1`` (0 for a single trial). Wall time is
kept on :class:`RunRecord` but left out of the CSVs so that repeated
invocations produce identical files.
"""
from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .baselines import BaselineConfig, fixed_baseline
from .errors import BadParams
from .histogram import Histogram, domain_error, optimal_histogram_exact, support_error
from .onepass import OnePassConfig, onepass_run
from .stream import ExactDistribution, StreamSource
from .twopass import TwoPassConfig, twopass_run

ALGORITHMS = ("onepass", "twopass", "fixed-support", "fixed-domain", "oracle")
DETAIL_COLUMNS = (
    "algorithm", "space", "trial", "seed", "k", "eps", "words", "pieces",
    "support_error", "domain_error",
)
SUMMARY_COLUMNS = (
    "algorithm", "space", "trials", "mean_support_error", "std_support_error",
    "mean_domain_error", "std_domain_error", "mean_pieces", "mean_words",
)


@dataclass
class RunRecord:
    algorithm: str
    config: dict
    seed: int
    space: int
    words: int
    support_error: float
    domain_error: float
    pieces: int
    wall_time: float = 0.0
    trial: int = 0
    hist: Histogram | None = field(default=None, repr=False)

    def row(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "space": self.space,
            "trial": self.trial,
            "seed": self.seed,
            "k": self.config.get("k"),
            "eps": self.config.get("eps"),
            "words": self.words,
            "pieces": self.pieces,
            "support_error": self.support_error,
            "domain_error": self.domain_error,
        }


def trial_seed(master: int, trial: int, space: int) -> int:
    """Counter-based split: depends only on (master, trial, space)."""
    return int(np.random.SeedSequence([master, trial, space]).generate_state(1, np.uint64)[0] >> np.uint64(1))


def run_algorithm(
    algorithm: str,
    source: StreamSource,
    k: int,
    eps: float,
    space: int | None,
    seed: int,
    P: ExactDistribution | None = None,
    scale_k: int | None = None,
    theory: bool = False,
    exact_hhh: bool = False,
) -> RunRecord:
    """Run one algorithm and score it against the exact distribution.

    ``space`` is the sample budget; in theory mode it may be None to use each
    algorithm's default sizing.
    """
    n = source.n
    if P is None:
        P = ExactDistribution.from_stream(source)
    t0 = time.perf_counter()
    if algorithm == "onepass":
        cfg = OnePassConfig(n, k, eps, s=space, seed=seed, experimental=not theory)
        out = onepass_run(source, cfg)
        hist, words, conf = out.hist, out.space, cfg.to_dict()
    elif algorithm == "twopass":
        cfg = TwoPassConfig(
            n, k, eps, seed=seed, hhh_mode="exact" if exact_hhh else "stream",
            space=None if theory else space,
        )
        out = twopass_run(source, cfg)
        hist, words, conf = out.hist, out.space, cfg.to_dict()
    elif algorithm in ("fixed-support", "fixed-domain"):
        if space is None:
            raise BadParams("baselines need a space budget")
        cfg = BaselineConfig(n, k, space, seed=seed, variant=algorithm.split("-")[1], scale_k=scale_k)
        out = fixed_baseline(source, cfg)
        hist, words, conf = out.hist, out.space, cfg.to_dict()
    elif algorithm == "oracle":
        hist, _ = optimal_histogram_exact(P, k)
        words, conf = P.support_size, {"n": n, "k": k, "eps": eps}
    else:
        raise BadParams(f"unknown algorithm {algorithm!r}; choose from {', '.join(ALGORITHMS)}")
    elapsed = time.perf_counter() - t0
    return RunRecord(
        algorithm=algorithm,
        config=conf,
        seed=seed,
        space=space if space is not None else words,
        words=int(words),
        support_error=support_error(P, hist),
        domain_error=domain_error(P, hist),
        pieces=hist.num_pieces,
        wall_time=elapsed,
        hist=hist,
    )


def sweep(
    source: StreamSource,
    algorithms,
    spaces,
    k: int,
    eps: float,
    trials: int,
    seed: int,
    scale_k: int | None = None,
    workers: int = 1,
) -> tuple[list[RunRecord], list[dict]]:
    """Every (algorithm, space, trial) combination; returns detail records and summary rows."""
    if trials < 1:
        raise BadParams("trials must be >= 1")
    for a in algorithms:
        if a not in ALGORITHMS:
            raise BadParams(f"unknown algorithm {a!r}")
    if not source.replayable:
        raise BadParams("sweeps need a replayable (file-backed) stream")
    P = ExactDistribution.from_stream(source)
    oracle_cache: dict = {}
    jobs = [(a, s, t) for a in algorithms for s in spaces for t in range(trials)]

    def one(job):
        a, s, t = job
        sd = trial_seed(seed, t, s)
        if a == "oracle":
            if "rec" not in oracle_cache:
                oracle_cache["rec"] = run_algorithm("oracle", source, k, eps, s, sd, P)
            base = oracle_cache["rec"]
            rec = RunRecord(a, base.config, sd, s, base.words, base.support_error,
                            base.domain_error, base.pieces, base.wall_time, hist=base.hist)
        else:
            rec = run_algorithm(a, source, k, eps, s, sd, P, scale_k=scale_k)
        rec.trial = t
        return rec

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            records = list(pool.map(one, jobs))
    else:
        records = [one(j) for j in jobs]
    return records, summarize(records)


def summarize(records: list[RunRecord]) -> list[dict]:
    groups: dict[tuple[str, int], list[RunRecord]] = {}
    for r in records:
        groups.setdefault((r.algorithm, r.space), []).append(r)
    out = []
    for (a, s), rs in groups.items():
        se = np.array([r.support_error for r in rs])
        de = np.array([r.domain_error for r in rs])
        ddof = 1 if len(rs) > 1 else 0
        out.append({
            "algorithm": a,
            "space": s,
            "trials": len(rs),
            "mean_support_error": float(se.mean()),
            "std_support_error": float(se.std(ddof=ddof)),
            "mean_domain_error": float(de.mean()),
            "std_domain_error": float(de.std(ddof=ddof)),
            "mean_pieces": float(np.mean([r.pieces for r in rs])),
            "mean_words": float(np.mean([r.words for r in rs])),
        })
    return out


def write_csv(path, rows, columns) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=list(columns), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({c: (repr(v) if isinstance(v, float) else v) for c, v in r.items() if c in columns})


def record_json(rec: RunRecord) -> str:
    """Histogram JSON with the run's provenance fields added."""
    return rec.hist.to_json(
        algorithm=rec.algorithm,
        config=rec.config,
        seed=rec.seed,
        space=rec.space,
        words=rec.words,
        support_error=rec.support_error,
        domain_error=rec.domain_error,
    )


def load_histogram(path) -> Histogram:
    with open(path, encoding="utf-8") as fh:
        return Histogram.from_dict(json.load(fh))
