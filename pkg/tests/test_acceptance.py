"""Acceptance suite: one verdict per primary criterion.

Verdicts are also collected in ``conftest.ACCEPTANCE`` and printed as
PASS/FAIL lines in the terminal summary.
"""

import csv
import json
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE
from dsekit.cli import main
from dsekit.correlation import kendall_tau
from dsekit.dimensionality import effective_rank
from dsekit.separability import inter_distance, intra_radius
from dsekit.clustering import ClusterAssignment
from dsekit.theory import (MixtureSpec, cor1_min_separation, dim_decay_experiment,
                           mc_stderr, nn_error, prop1_trials, sample_mixture, thm1_sweep)

from oracles import inter_distance_oracle, intra_radius_oracle, kendall_pairs

pytestmark = pytest.mark.acceptance

PHI_MINUS_1 = 0.15865525393145707


def record(name, ok, detail):
    ACCEPTANCE[name] = (bool(ok), detail)
    print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    assert ok, detail


def test_prop1_universality():
    t0 = time.perf_counter()
    accs = prop1_trials(100, seed=0)
    dt = time.perf_counter() - t0
    ok = len(accs) == 100 and all(a == 1.0 for a in accs) and dt < 30.0
    record("prop1 universality", ok,
           f"{sum(a == 1.0 for a in accs)}/100 trials at accuracy 1.0 in {dt:.1f} s")


def test_effective_rank_exactness():
    r = np.random.default_rng(1)
    worst_exact = 0.0
    for rank in (1, 2, 4, 16):
        u, _ = np.linalg.qr(r.standard_normal((40, rank)))
        v, _ = np.linalg.qr(r.standard_normal((24, rank)))
        worst_exact = max(worst_exact, abs(effective_rank(2.5 * u @ v.T).erank - rank))
    worst_inv = 0.0
    for _ in range(50):
        X = r.standard_normal((int(r.integers(2, 60)), int(r.integers(2, 30))))
        X *= r.uniform(0.1, 3.0, X.shape[1])
        base = effective_rank(X).erank
        q, _ = np.linalg.qr(r.standard_normal((X.shape[1], X.shape[1])))
        scale = 10 ** r.uniform(-3, 3)
        worst_inv = max(worst_inv, abs(effective_rank(scale * X).erank - base),
                        abs(effective_rank(X @ q).erank - base))
    record("effective rank exactness", worst_exact <= 1e-9 and worst_inv <= 1e-7,
           f"max |erank - r| = {worst_exact:.1e}, max invariance gap = {worst_inv:.1e}")


def test_separability_oracle():
    r = np.random.default_rng(2)
    worst = 0.0
    for _ in range(50):
        m, d, k = int(r.integers(10, 80)), int(r.integers(1, 10)), int(r.integers(2, 7))
        X = r.standard_normal((m, d)) * r.uniform(0.1, 10) + r.uniform(-5, 5)
        labels = np.concatenate([np.arange(k), r.integers(0, k, m - k)])
        r.shuffle(labels)
        centroids = np.array([X[labels == j].mean(axis=0) for j in range(k)])
        centroids += 0.3 * r.standard_normal(centroids.shape)
        asg = ClusterAssignment(labels, centroids, 0.0, k)
        got_intra, _ = intra_radius(X, asg)
        got_inter, _ = inter_distance(X, asg)
        want_intra, _ = intra_radius_oracle(X, labels, k)
        want_inter, _ = inter_distance_oracle(X, labels, centroids)
        worst = max(worst, abs(got_intra - want_intra) / max(abs(want_intra), 1e-300),
                    abs(got_inter - want_inter) / abs(want_inter))
    record("separability oracle equivalence", worst <= 1e-9,
           f"50 pairs, max relative gap = {worst:.1e}")


def test_kendall_tau():
    r = np.random.default_rng(3)
    mismatches = 0
    for _ in range(100):
        n = int(r.integers(2, 201))
        x, y = r.permutation(n) + r.random(n) * 0.5, r.standard_normal(n)
        if kendall_tau(x, y).tau != kendall_pairs(x, y):
            mismatches += 1
    n = 50
    seq = np.arange(n, dtype=float)
    ends = (kendall_tau(seq, seq).tau == 1.0 and kendall_tau(seq, seq[::-1]).tau == -1.0)
    x, y = r.standard_normal(n), r.standard_normal(n)
    invariant = (kendall_tau(np.exp(x), y ** 3).tau == kendall_tau(x, y).tau)
    record("kendall tau", mismatches == 0 and ends and invariant,
           f"{100 - mismatches}/100 exact oracle matches, endpoints ok={ends}, "
           f"monotone invariance ok={invariant}")


def test_thm1_bound_validity():
    t0 = time.perf_counter()
    rows = thm1_sweep(separations=(1, 2, 4, 8), dims=(4, 16), num_classes=3,
                      samples_per_class=1000, trials=100, delta=0.05,
                      constants=(1.0, 1.0), seed=0)
    dt = time.perf_counter() - t0
    held = sum(r[-1] for r in rows)
    record("thm1 bound validity", held == len(rows) == 800 and dt < 120.0,
           f"bound held in {held}/{len(rows)} trials in {dt:.1f} s")


def test_cor1_decay():
    R, n, delta = 1.0, 2000, 0.05
    s = 6.0 * R
    dims = [1, 4, 16, 64]
    base = MixtureSpec(2, 1, np.zeros((2, 1)), R, n, seed=0)
    res = dict(dim_decay_experiment(base, dims, s))
    # the condition compares the full mean gap s * sqrt(d) with the threshold
    cond = all(s * math.sqrt(d) >= cor1_min_separation(d, R, delta, n) for d in dims)
    monotone = all(res[b] <= res[a] + 2 * math.hypot(mc_stderr(res[a], 2 * n),
                                                     mc_stderr(res[b], 2 * n))
                   for a, b in zip(dims, dims[1:]))
    strict = res[64] < res[4]
    record("cor1 decay", strict and monotone,
           f"err by d = {res}, condition met for all d = {cond}, "
           f"err(64) < err(4) = {strict}, non-increasing within 2 SE = {monotone}")


def test_nn_error_calibration():
    means = np.array([[0.0], [2.0]])
    err = nn_error(sample_mixture(MixtureSpec(2, 1, means, 1.0, 5000, seed=0)))
    record("nn error calibration", abs(err - PHI_MINUS_1) <= 0.02,
           f"err = {err:.4f} vs Phi(-1) = {PHI_MINUS_1:.4f}")


def run_pipeline(root, seed=0):
    data = root / "traj"
    out = root / "out"
    rc = [main(["synth", "trajectory", "--schedule", "improving", "--checkpoints", "10",
                "--images", "64", "--patches", "49", "--dim", "32",
                "--seed", str(seed), "--output", str(data)]),
          main(["compute", "--input-dir", str(data), "--output", str(out), "--seed", str(seed)]),
          main(["tau", "--output", str(out), "--perf", str(data / "truth.csv")]),
          main(["select", "--output", str(out)])]
    return rc, data, out


def test_end_to_end_pipeline(tmp_path):
    t0 = time.perf_counter()
    rc, data, out = run_pipeline(tmp_path)
    dt = time.perf_counter() - t0
    tau = json.loads((out / "tau.json").read_text())["tau"]
    with open(data / "truth.csv", newline="") as fh:
        truth = {row["source_id"]: float(row["value"]) for row in csv.DictReader(fh)}
    picked = json.loads((out / "selection.json").read_text())["selected_source_ids"][0]
    gap = max(truth.values()) - truth[picked]
    ok = rc == [0, 0, 0, 0] and tau >= 0.8 and gap <= 0.02 and dt < 180.0
    record("end-to-end pipeline", ok,
           f"exit codes {rc}, tau = {tau:.3f}, selected {picked} "
           f"({gap:.4f} below best), {dt:.1f} s")


def test_determinism(tmp_path):
    runs = [run_pipeline(tmp_path / name, seed=7) for name in ("a", "b")]
    files = {}
    for _, data, out in runs:
        for d in (data, out):
            for p in sorted(d.iterdir()):
                files.setdefault(p.name, []).append(p.read_bytes())
    differing = sorted(n for n, v in files.items() if len(v) != 2 or v[0] != v[1])
    ok = all(rc == [0, 0, 0, 0] for rc, _, _ in runs) and not differing
    record("determinism", ok,
           f"{len(files)} output files compared, differing: {differing or 'none'}")
