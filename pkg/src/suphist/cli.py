"""Command-line front end: ``suphist {ingest,synth,run,sweep,eval}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import experiment, gadgets, ingest
from .errors import DomainMismatch, SupportHistError
from .histogram import domain_error, support_error
from .stream import ExactDistribution, generate_synthetic, read_stream, write_stream

log = logging.getLogger("suphist")

CSV_HELP = (
    "detail CSV columns: " + ",".join(experiment.DETAIL_COLUMNS)
    + "; summary CSV columns: " + ",".join(experiment.SUMMARY_COLUMNS)
)


def _bits(text: str) -> tuple[int, ...]:
    return tuple(int(c) for c in text.strip())


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def cmd_ingest(args) -> int:
    s = ingest.ingest(
        args.raw, args.mode, args.out, prefix=args.prefix, step=args.step, lo=args.lo,
        hi=args.hi, column=args.column, delimiter=args.delimiter, skip_header=args.skip_header,
    )
    print(f"wrote {s.total_updates} updates over n={s.n} to {args.out}")
    return 0


def cmd_synth(args) -> int:
    if args.gadget:
        extra = {}
        if args.a_bits:
            extra["a_bits"] = _bits(args.a_bits)
        if args.b_bits:
            extra["b_bits"] = _bits(args.b_bits)
        if args.j is not None:
            extra["j"] = args.j
        if args.gamma is not None:
            extra["gamma"] = args.gamma
        import numpy as np

        spec = gadgets.random_spec(args.gadget, args.n, np.random.default_rng(args.seed), **extra)
        s = gadgets.gadget_stream(spec)
    else:
        params = {}
        for kv in args.param or []:
            key, _, val = kv.partition("=")
            params[key] = json.loads(val) if val else True
        s = generate_synthetic(args.kind, args.n, seed=args.seed, churn=args.churn, **params)
    write_stream(args.out, s)
    print(f"wrote {s.total_updates} updates over n={s.n} to {args.out}")
    return 0


def _check_n(args, n):
    if args.n is not None and args.n != n:
        raise DomainMismatch(f"--n {args.n} does not match stream domain {n}")


def cmd_run(args) -> int:
    src = read_stream(args.stream)
    _check_n(args, src.n)
    rec = experiment.run_algorithm(
        args.algo, src, args.k, args.eps, args.space, args.seed,
        scale_k=args.scale_k, theory=args.theory, exact_hhh=args.exact_hhh,
    )
    text = experiment.record_json(rec)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    print(
        f"{rec.algorithm}: pieces={rec.pieces} words={rec.words} "
        f"support_error={rec.support_error:.6g} domain_error={rec.domain_error:.6g} "
        f"time={rec.wall_time:.2f}s",
        file=sys.stderr,
    )
    return 0


def cmd_sweep(args) -> int:
    src = read_stream(args.stream)
    _check_n(args, src.n)
    records, summary = experiment.sweep(
        src, args.algo, args.space, args.k, args.eps, args.trials, args.seed,
        scale_k=args.scale_k, workers=args.workers,
    )
    experiment.write_csv(args.out, [r.row() for r in records], experiment.DETAIL_COLUMNS)
    summary_path = args.summary or args.out.replace(".csv", "") + "_summary.csv"
    experiment.write_csv(summary_path, summary, experiment.SUMMARY_COLUMNS)
    print(f"wrote {len(records)} detail rows to {args.out} and {len(summary)} summary rows to {summary_path}")
    return 0


def evaluate_files(stream_path, hist_path) -> dict:
    src = read_stream(stream_path)
    hist = experiment.load_histogram(hist_path)
    if hist.n != src.n:
        raise DomainMismatch(f"histogram domain {hist.n} != stream domain {src.n}")
    P = ExactDistribution.from_stream(src)
    return {
        "support_error": support_error(P, hist),
        "domain_error": domain_error(P, hist),
        "pieces": hist.num_pieces,
    }


def cmd_eval(args) -> int:
    rep = evaluate_files(args.stream, args.hist)
    print(json.dumps(rep))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="suphist", description="Support-aware streaming histograms.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("ingest", help="map a raw file to a stream file")
    q.add_argument("raw")
    q.add_argument("--mode", choices=ingest.MODES, required=True)
    q.add_argument("--out", required=True)
    q.add_argument("--prefix", type=int, default=3)
    q.add_argument("--step", type=float, default=0.01)
    q.add_argument("--lo", type=float, default=-90.0)
    q.add_argument("--hi", type=float, default=90.0)
    q.add_argument("--column", type=int, default=0)
    q.add_argument("--delimiter", default=",")
    q.add_argument("--skip-header", action="store_true")
    q.set_defaults(func=cmd_ingest)

    q = sub.add_parser("synth", help="generate a synthetic or gadget stream file")
    g = q.add_mutually_exclusive_group(required=True)
    g.add_argument("--kind", choices=("even-uniform", "zipf", "uniform-sparse", "mice-elephants"))
    g.add_argument("--gadget", choices=gadgets.FAMILIES)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--churn", type=float, default=0.0)
    q.add_argument("--param", action="append", metavar="KEY=VALUE",
                   help="generator parameter, e.g. exponent=1.1 length=1000000")
    q.add_argument("--a-bits")
    q.add_argument("--b-bits")
    q.add_argument("--j", type=int)
    q.add_argument("--gamma", type=float)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_synth)

    q = sub.add_parser("run", help="run one algorithm and write histogram JSON")
    q.add_argument("stream")
    q.add_argument("--algo", choices=experiment.ALGORITHMS, required=True)
    q.add_argument("--n", type=int)
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--eps", type=float, default=0.25)
    q.add_argument("--space", type=int, help="sample budget; omit with --theory for default sizing")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--scale-k", type=int, help="baselines: use k = space // SCALE_K")
    q.add_argument("--theory", action="store_true", help="theoretical parameterization instead of the experimental split")
    q.add_argument("--exact-hhh", action="store_true", help="twopass: exact first pass")
    q.add_argument("--out")
    q.set_defaults(func=cmd_run)

    q = sub.add_parser("sweep", help="space sweep to CSV", epilog=CSV_HELP)
    q.add_argument("stream")
    q.add_argument("--algo", type=lambda s: s.split(","), required=True,
                   help="comma-separated list from " + ",".join(experiment.ALGORITHMS))
    q.add_argument("--space", type=_ints, required=True, help="comma-separated budgets")
    q.add_argument("--n", type=int)
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--eps", type=float, default=0.25)
    q.add_argument("--trials", type=int, default=10)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--scale-k", type=int)
    q.add_argument("--workers", type=int, default=1)
    q.add_argument("--out", required=True, help="detail CSV path")
    q.add_argument("--summary", help="summary CSV path (default: <out>_summary.csv)")
    q.set_defaults(func=cmd_sweep)

    q = sub.add_parser("eval", help="score a histogram JSON against a stream")
    q.add_argument("stream")
    q.add_argument("hist")
    q.set_defaults(func=cmd_eval)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except SupportHistError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
