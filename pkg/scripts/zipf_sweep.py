"""Space sweep on a synthetic Zipf stream, written as detail and summary CSV.

Usage: python3 scripts/zipf_sweep.py --out results/zipf.csv [--n 100000] [--length 1000000]
"""
import argparse
import logging
from pathlib import Path

from suphist import generate_synthetic
from suphist.experiment import DETAIL_COLUMNS, SUMMARY_COLUMNS, sweep, write_csv

log = logging.getLogger("zipf_sweep")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=10**5)
    ap.add_argument("--length", type=int, default=10**6)
    ap.add_argument("--exponent", type=float, default=1.1)
    ap.add_argument("--space", default="300,1000,3000")
    ap.add_argument("--algo", default="onepass,twopass,fixed-support,fixed-domain,oracle")
    ap.add_argument("--k", type=int, default=5)
    ap.add_argument("--eps", type=float, default=0.25)
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--scale-k", type=int, help="baselines use k = space // SCALE_K")
    ap.add_argument("--out", default="results/zipf.csv")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    src = generate_synthetic("zipf", args.n, seed=args.seed, exponent=args.exponent, length=args.length)
    log.info("generated %d updates over n=%d", src.total_updates, args.n)
    records, summary = sweep(src, args.algo.split(","), [int(s) for s in args.space.split(",")],
                             args.k, args.eps, args.trials, args.seed, scale_k=args.scale_k)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(out, [r.row() for r in records], DETAIL_COLUMNS)
    write_csv(out.with_name(out.stem + "_summary.csv"), summary, SUMMARY_COLUMNS)
    for row in summary:
        log.info("%-14s s=%-5d support err %.4f +- %.4f", row["algorithm"], row["space"],
                 row["mean_support_error"], row["std_support_error"])


if __name__ == "__main__":
    main()
