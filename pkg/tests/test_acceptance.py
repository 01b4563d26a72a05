"""Acceptance criteria 1-12, one test each; every test prints a PASS/FAIL line."""

import csv
import io
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import random_4regular
from hostcolor.forge import (diamond_gadget, forge_AA, reduce_4regular_to_balanced, rotated_coloring,
                             triple_copy, uniqueness_check)
from hostcolor.generators import apply_planting, gen_random_regular, make_instance
from hostcolor.graph import (Coloring, Graph, count_k_colorings, enumerate_k_colorings, find_k_coloring,
                             max_density_subgraph)
from hostcolor.harness import ExperimentConfig, run_experiment
from hostcolor.pipeline import safe_recolor, spectral_k_clustering
from hostcolor.rng import Seed, as_seed
from hostcolor.spectral import full_spectrum_dense, indicator_basis, lambda_expansion
from hostcolor.twosat import brute_force_2sat, random_instance, solve_2sat

pytestmark = pytest.mark.acceptance

MASTER = 20260101

CONFIGS = {
    2: dict(model="RR", n=[900], d=[60], algo="spectrum", num_seeds=10, host_kind="regular"),
    3: dict(model="RR", n=[3000], d=[150], algo="ar", num_seeds=20),
    4: dict(model="RR", n=[10000], d=[40], algo="ar", num_seeds=10, host_kind="regular"),
    5: dict(model="RA", n=[2000], d=[math.ceil(5 * 2000 ** (2 / 3))], algo="ra", num_seeds=10,
            adversaries=["id-blocks", "degree-sorted", "spectral-correlated"]),
}

_RUNS: dict = {}


def _run(num: int, tmp_path_factory, rerun: bool = False):
    key = (num, rerun)
    if key not in _RUNS:
        cfg = ExperimentConfig(master_seed=MASTER, **CONFIGS[num])
        out = tmp_path_factory.mktemp(f"c{num}{'r' if rerun else ''}")
        t0 = time.perf_counter()
        res = run_experiment(cfg, out)
        elapsed = time.perf_counter() - t0
        text = open(res["results"]).read()
        rows = list(csv.DictReader(io.StringIO(text)))
        _RUNS[key] = (rows, text, elapsed, cfg)
    return _RUNS[key]


def _f(x):
    return float(x)


def test_criterion_1_octahedron_oracle(acceptance_report):
    t0 = time.perf_counter()
    inst = apply_planting(Graph.complete(6), Coloring(3, [1, 1, 2, 2, 3, 3]))
    dec = full_spectrum_dense(inst.result)
    err = float(np.abs(dec.eigenvalues - np.array([4, 0, 0, 0, -2, -2])).max())
    basis = indicator_basis(inst.planted)
    V = dec.eigenvectors[:, 4:6]
    deficit = max(float(np.linalg.norm(basis[:, j] - V @ (V.T @ basis[:, j]))) for j in (1, 2))
    elapsed = time.perf_counter() - t0
    acceptance_report(1, err < 1e-9 and deficit < 1e-9 and elapsed < 1,
                      f"eig err {err:.1e}, projection deficit {deficit:.1e}, {elapsed:.2f}s")


def test_criterion_2_spectrum_shape(acceptance_report, tmp_path_factory):
    rows, _, elapsed, _ = _run(2, tmp_path_factory)
    good = 0
    for r in rows:
        d = _f(r["d"])
        ok = (0.60 * d <= _f(r["lambda_1"]) <= 0.72 * d
              and all(-0.40 * d <= _f(r[c]) <= -0.28 * d for c in ("lambda_n_minus_1", "lambda_n"))
              and _f(r["middle_max"]) <= 2 * _f(r["host_lambda_hat"]) + 6 * math.sqrt(d))
        good += ok
    acceptance_report(2, good >= 9 and elapsed < 180, f"{good}/10 seeds in windows, {elapsed:.0f}s")


def test_criterion_3_ar_end_to_end(acceptance_report, tmp_path_factory):
    rows, _, elapsed, _ = _run(3, tmp_path_factory)
    good = sum(r["legal"] == "true" and r["complete"] == "true" and r["dist"] == "0" for r in rows)
    per_run = elapsed / len(rows)
    acceptance_report(3, good >= 19 and per_run < 60,
                      f"{good}/20 legal with distance 0, mean {per_run:.1f}s per run")


def test_criterion_4_low_degree(acceptance_report, tmp_path_factory):
    rows, _, elapsed, _ = _run(4, tmp_path_factory)
    legal = 0
    bounds_ok = True
    worst = 0.0
    for r in rows:
        if not (r["legal"] == "true" and r["complete"] == "true"):
            continue
        legal += 1
        n, d = int(r["n"]), int(r["d"])
        host = gen_random_regular(n, d, as_seed(int(r["seed"])).child("host"))
        lam = lambda_expansion(host, seed=0)
        bound = 200 * (lam / d) ** 2 * n
        worst = max(worst, int(r["b"]) / bound)
        bounds_ok &= int(r["b"]) <= bound
    per_seed = elapsed / len(rows)
    acceptance_report(4, legal >= 9 and bounds_ok and per_seed < 300,
                      f"{legal}/10 legal, max b/bound {worst:.4f}, {per_seed:.1f}s per seed")


def test_criterion_5_ra_adversaries(acceptance_report, tmp_path_factory):
    rows, _, elapsed, _ = _run(5, tmp_path_factory)
    good = sum(r["legal"] == "true" and r["complete"] == "true" for r in rows)
    per_cell = elapsed / len(rows)
    acceptance_report(5, good >= 9 and per_cell < 180,
                      f"{good}/10 cells complete and legal, {per_cell:.1f}s per cell")


def test_criterion_6_twosat_oracle(acceptance_report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(MASTER)
    agree = 0
    verified = True
    for _ in range(500):
        nv = int(rng.integers(1, 17))
        inst = random_instance(nv, int(rng.integers(1, 4 * nv + 1)), rng)
        got, ref = solve_2sat(inst), brute_force_2sat(inst)
        agree += (got is None) == (ref is None)
        if got is not None:
            verified &= all((got[abs(a) - 1] == (a > 0)) or (got[abs(b) - 1] == (b > 0))
                            for a, b in inst.clauses)
    elapsed = time.perf_counter() - t0
    acceptance_report(6, agree == 500 and verified and elapsed < 10,
                      f"{agree}/500 verdicts agree, assignments verified={verified}, {elapsed:.1f}s")


def test_criterion_7_reduction(acceptance_report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(MASTER)
    col_ok = dens_ok = 0
    for _ in range(50):
        n = int(rng.integers(6, 13))
        H4 = random_4regular(n, seed=int(rng.integers(2**31)))
        out = reduce_4regular_to_balanced(H4, check_colorability=False)
        R = out.graph
        col_ok += (count_k_colorings(H4, 3) > 0) == (find_k_coloring(R, 3) is not None)
        _, dens = max_density_subgraph(R)
        dens_ok += dens == Fraction(2 * R.m, R.n)
    gad = diamond_gadget()
    colorings = list(enumerate_k_colorings(gad.graph, 3))
    diamond_ok = len(colorings) == 6 and all(c[0] == c[1] for c in colorings)
    elapsed = time.perf_counter() - t0
    acceptance_report(7, col_ok == 50 and dens_ok == 50 and diamond_ok and elapsed < 300,
                      f"colorability {col_ok}/50, balanced {dens_ok}/50, diamond ok={diamond_ok}, "
                      f"{elapsed:.0f}s")


def test_criterion_8_forge_aa_certificate(acceptance_report):
    t0 = time.perf_counter()
    Q = triple_copy(Graph.complete_multipartite([4, 4]))
    chi = rotated_coloring(Coloring(3, [1, 1, 1, 1, 2, 2, 2, 2]))
    inst = forge_AA(Q, 600, 24, seed=Seed(MASTER), chi_Q=chi)
    regular = inst.H.is_regular(24)
    replay = apply_planting(inst.H, inst.planted).result == inst.G
    evH = full_spectrum_dense(inst.H).eigenvalues
    evZ = full_spectrum_dense(inst.Z3.host).eigenvalues
    lam_H = max(evH[1], -evH[-1])
    lam_Z = max(evZ[1], -evZ[-1])
    spec_ok = lam_H <= lam_Z + 4 + math.sqrt(20) + 1e-6
    elapsed = time.perf_counter() - t0
    acceptance_report(8, regular and replay and spec_ok and elapsed < 120,
                      f"regular={regular}, replay={replay}, lambda-hat H {lam_H:.2f} vs Z {lam_Z:.2f}, "
                      f"{elapsed:.1f}s")


def test_criterion_9_uniqueness(acceptance_report):
    t0 = time.perf_counter()
    unique = 0
    for s in range(10):
        inst = make_instance("RR", n=30, k=3, d=20, seed=Seed(MASTER + s), host_kind="regular")
        unique += uniqueness_check(inst).unique
    elapsed = time.perf_counter() - t0
    acceptance_report(9, unique >= 9 and elapsed < 120, f"{unique}/10 unique, {elapsed:.1f}s")


def test_criterion_10_safe_recolor_soundness(acceptance_report):
    rng = np.random.default_rng(MASTER)
    sound = 0
    fired = 0
    for i in range(100):
        n = int(rng.integers(20, 200))
        d = float(rng.uniform(3, min(30, n - 1)))
        inst = make_instance("RR", n=n, k=3, d=d, seed=Seed(MASTER).child(i))
        keep = rng.random(n) < rng.uniform(0.2, 0.9)
        C = Coloring(3, np.where(keep, inst.planted.assign, 0))
        out = safe_recolor(inst.result, C)
        colored = out.assign != 0
        sound += bool(np.all(out.assign[colored] == inst.planted.assign[colored]))
        fired += out.num_colored > C.num_colored
    acceptance_report(10, sound == 100, f"{sound}/100 sound, rule fired in {fired}")


def test_criterion_11_k_clustering(acceptance_report):
    t0 = time.perf_counter()
    K = Graph.complete_multipartite([2, 2, 2, 2])
    truth = Coloring(4, [1, 1, 2, 2, 3, 3, 4, 4])
    C = spectral_k_clustering(K, 4, seed=Seed(MASTER))
    exact = C.same_partition(truth)
    means = {}
    for k, n, d in ((3, 600, 120), (4, 800, 200)):
        attempts = []
        for s in range(50):
            inst = make_instance("RR", n=n, k=k, d=d, seed=Seed(MASTER).child(k, s))
            _, a = spectral_k_clustering(inst.result, k, d=d, seed=Seed(MASTER).child(k, s, "c"),
                                         return_attempts=True)
            attempts.append(a)
        means[k] = float(np.mean(attempts))
    limits = {k: 3 * k ** k / math.factorial(k) for k in means}
    elapsed = time.perf_counter() - t0
    ok = exact and all(means[k] <= limits[k] for k in means) and elapsed < 60
    acceptance_report(11, ok, f"K2222 exact={exact}, mean attempts k=3 {means[3]:.1f} (<= {limits[3]:.1f}), "
                              f"k=4 {means[4]:.1f} (<= {limits[4]:.1f}), {elapsed:.1f}s")


def test_criterion_12_determinism(acceptance_report, tmp_path_factory):
    same = []
    for num in (2, 3, 4, 5):
        first = _run(num, tmp_path_factory)[1]
        second = _run(num, tmp_path_factory, rerun=True)[1]
        same.append(first == second)
    acceptance_report(12, all(same), "results.csv byte-identical for criteria 2-5: "
                                     + ", ".join(f"{n}={s}" for n, s in zip((2, 3, 4, 5), same)))
