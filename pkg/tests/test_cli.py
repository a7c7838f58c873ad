import csv
import json

import numpy as np
import pytest

from suphist import (
    ExactDistribution,
    Histogram,
    generate_synthetic,
    optimal_histogram_domain,
    optimal_histogram_exact,
    stream_from_counts,
    support_error,
    write_stream,
)
from suphist.cli import evaluate_files, main
from suphist.errors import DomainMismatch
from suphist.experiment import DETAIL_COLUMNS, SUMMARY_COLUMNS, sweep


@pytest.fixture
def zipf_file(tmp_path):
    p = tmp_path / "z.stream"
    write_stream(p, generate_synthetic("zipf", 3000, seed=1, length=20000))
    return p


def _read(p):
    with open(p, newline="") as fh:
        return list(csv.DictReader(fh))


def test_sweep_counts_and_summary(zipf_file, tmp_path):
    out = tmp_path / "d.csv"
    rc = main(["sweep", str(zipf_file), "--algo", "fixed-domain,oracle", "--space", "100,300,1000",
               "--k", "4", "--trials", "10", "--seed", "7", "--out", str(out)])
    assert rc == 0
    detail = _read(out)
    summary = _read(tmp_path / "d_summary.csv")
    assert len(detail) == 60 and len(summary) == 6
    assert tuple(detail[0]) == DETAIL_COLUMNS and tuple(summary[0]) == SUMMARY_COLUMNS
    for row in summary:
        errs = [float(r["support_error"]) for r in detail
                if r["algorithm"] == row["algorithm"] and r["space"] == row["space"]]
        assert abs(float(row["mean_support_error"]) - sum(errs) / len(errs)) <= 1e-12
    oracle = {r["support_error"] for r in detail if r["algorithm"] == "oracle"}
    assert len(oracle) == 1


def test_sweep_byte_identical(zipf_file, tmp_path):
    args = ["sweep", str(zipf_file), "--algo", "onepass,twopass,fixed-support", "--space", "200",
            "--k", "3", "--trials", "2", "--seed", "11"]
    main(args + ["--out", str(tmp_path / "a.csv")])
    main(args + ["--out", str(tmp_path / "b.csv"), "--workers", "3"])
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a_summary.csv").read_bytes() == (tmp_path / "b_summary.csv").read_bytes()


def test_trial_seeds_stable_when_adding_trials(zipf_file):
    from suphist import read_stream

    s = read_stream(zipf_file)
    r2, _ = sweep(s, ["onepass"], [100], 3, 0.25, 2, seed=5)
    r4, _ = sweep(s, ["onepass"], [100], 3, 0.25, 4, seed=5)
    assert [r.row() for r in r2] == [r.row() for r in r4[:2]]


def test_run_and_eval(zipf_file, tmp_path, capsys):
    h = tmp_path / "h.json"
    assert main(["run", str(zipf_file), "--algo", "twopass", "--k", "4", "--space", "300",
                 "--seed", "2", "--out", str(h)]) == 0
    doc = json.loads(h.read_text())
    assert doc["algorithm"] == "twopass" and doc["config"]["seed"] == 2
    capsys.readouterr()
    assert main(["eval", str(zipf_file), str(h)]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["support_error"] == pytest.approx(doc["support_error"])
    assert rep["pieces"] == len(doc["values"])


def test_eval_zero_histogram(zipf_file, tmp_path):
    h = tmp_path / "zero.json"
    h.write_text(Histogram.constant(3000).to_json())
    assert evaluate_files(zipf_file, h)["support_error"] == pytest.approx(1.0)


def test_eval_oracle_full_k(tmp_path):
    P = ExactDistribution(500, {3: 2, 40: 5, 41: 1, 300: 7})
    p = tmp_path / "s.stream"
    write_stream(p, stream_from_counts(500, P.counts))
    f, _ = optimal_histogram_exact(P, P.support_size)
    h = tmp_path / "o.json"
    h.write_text(f.to_json())
    assert evaluate_files(p, h)["support_error"] == 0.0


def test_eval_domain_mismatch(zipf_file, tmp_path):
    h = tmp_path / "h.json"
    h.write_text(Histogram.constant(10).to_json())
    with pytest.raises(DomainMismatch):
        evaluate_files(zipf_file, h)
    assert main(["eval", str(zipf_file), str(h)]) == 2


def test_eval_sparse_groups(tmp_path):
    n = 2000
    rng = np.random.default_rng(0)
    items = np.sort(rng.choice(n, size=30, replace=False) + 1)
    counts = {int(i): c for i, c in zip(items, [5] * 10 + [1] * 10 + [3] * 10)}
    P = ExactDistribution(n, counts)
    p = tmp_path / "f.stream"
    write_stream(p, stream_from_counts(n, counts))
    f, _ = optimal_histogram_exact(P, 3)
    g, _ = optimal_histogram_domain(P, 3)
    (tmp_path / "f.json").write_text(f.to_json())
    (tmp_path / "g.json").write_text(g.to_json())
    assert evaluate_files(p, tmp_path / "f.json")["support_error"] <= 1e-12
    assert evaluate_files(p, tmp_path / "g.json")["support_error"] > 0.5
    assert support_error(P, g) > 0.5


def test_synth_and_ingest_commands(tmp_path):
    out = tmp_path / "g.stream"
    assert main(["synth", "--gadget", "proper", "--n", "64", "--j", "2", "--out", str(out)]) == 0
    assert out.read_text().startswith("n=192\n")
    assert main(["synth", "--kind", "zipf", "--n", "100", "--param", "length=50", "--out", str(out)]) == 0
    raw = tmp_path / "r.txt"
    raw.write_text("10.0.0.1\nnot-an-ip\n")
    assert main(["ingest", str(raw), "--mode", "ipv4-prefix", "--out", str(out)]) == 2


def test_run_requires_matching_n(zipf_file):
    assert main(["run", str(zipf_file), "--algo", "oracle", "--k", "2", "--n", "99"]) == 2
