"""Seeded batch experiments: one CSV row per cell, plus a JSON summary."""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .forge import ForgeFail, forge_RA_adversary
from .generators import MODELS, balanced_random_partition, gen_gnp, gen_random_regular, make_instance
from .graph import Coloring, Graph, GuardExceeded, is_legal_coloring
from .io import read_coloring, read_graph
from .pipeline import (ClusteringFailed, PipelineParams, approx_distance, color_AR, color_RA, compute_SB,
                       partial_disagreement, sparse_3_color, spectral_k_clustering)
from .pipeline.sparse3 import NotThreeColorable
from .rng import as_rng, as_seed, cell_seed
from .spectral import bottom_eigenvectors, validate_planted_spectrum

ALGOS = ("ar", "ra", "k-cluster", "sparse3", "spectrum")
ADVERSARIES = ("id-blocks", "degree-sorted", "spectral-correlated", "ra-forge")
STAGES = ("cluster", "recolor", "uncolor", "safe", "brute", "twosat")
COLUMNS = ("model", "algo", "n", "d", "k", "seed", "adversary", "legal", "complete", "b", "sb", "dist",
           "failure", "lambda_1", "lambda_n_minus_1", "lambda_n", "middle_max", "host_lambda_hat",
           "alignment_min", "spectrum_pass")
TIMING_COLUMNS = ("cell", "t_total_ms") + tuple(f"t_{s}_ms" for s in STAGES)


@dataclass
class ExperimentConfig:
    model: str
    n: list
    d: list
    k: list = field(default_factory=lambda: [3])
    algo: str = "ar"
    params: dict = field(default_factory=dict)
    num_seeds: int = 1
    adversaries: list = field(default_factory=lambda: ["id-blocks"])
    host_kind: str = "gnp"
    master_seed: int = 0
    out_dir: str = "results"
    workers: int = 1
    timings_in_results: bool = False

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}")
        if self.algo not in ALGOS:
            raise ValueError(f"algo must be one of {ALGOS}")
        for name in ("n", "d", "k"):
            val = getattr(self, name)
            if not isinstance(val, list):
                val = [val]
                setattr(self, name, val)
            if not val:
                raise ValueError(f"sweep list {name!r} is empty")
        if self.num_seeds < 1:
            raise ValueError("num_seeds must be at least 1")
        if self.algo != "k-cluster" and any(int(k) != 3 for k in self.k):
            raise ValueError(f"algo {self.algo!r} needs k = 3")
        if self.algo == "k-cluster" and any(int(k) < 3 for k in self.k):
            raise ValueError("k-cluster needs k >= 3")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if self.host_kind not in ("gnp", "regular"):
            raise ValueError("host_kind must be 'gnp' or 'regular'")
        if self.model[1] == "A":
            if not self.adversaries:
                raise ValueError("adversarial planting needs a nonempty adversary list")
            for a in self.adversaries:
                if a not in ADVERSARIES:
                    raise ValueError(f"unknown adversary {a!r}")
        PipelineParams.from_dict(self.params)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def cells(self) -> list[dict]:
        out = []
        for n in self.n:
            for d in self.d:
                for k in self.k:
                    for i in range(self.num_seeds):
                        adv = self.adversaries[i % len(self.adversaries)] if self.model[1] == "A" else ""
                        out.append({"n": int(n), "d": d, "k": int(k), "rep": i, "adversary": adv})
        for idx, c in enumerate(out):
            c["index"] = idx
            c["seed"] = cell_seed(self.master_seed, idx).value
        return out


def adversary_menu(name: str, host: Graph, k: int = 3, seed=None, Q: Graph | None = None,
                   info: dict | None = None) -> Coloring:
    """Balanced partition of the host's vertices chosen by a named strategy.

    ``id-blocks``: consecutive id ranges.  ``degree-sorted``: round robin in
    order of decreasing host degree (ties by id).  ``spectral-correlated``:
    blocks of the order given by the host's most negative eigenvector.
    ``ra-forge``: hide ``Q`` (default a triangle) with the random-host
    adversary; on failure a random balanced planting is used and the failing
    step is written to ``info``.
    """
    n = host.n
    info = info if info is not None else {}
    if name == "id-blocks":
        sizes = [n // k + (1 if c < n % k else 0) for c in range(k)]
        return Coloring(k, np.repeat(np.arange(1, k + 1), sizes))
    if name == "degree-sorted":
        order = np.lexsort((np.arange(n), -host.degrees))
        col = np.empty(n, dtype=np.int64)
        col[order] = np.arange(n) % k + 1
        return Coloring(k, col)
    if name == "spectral-correlated":
        vec = bottom_eigenvectors(host, 1, seed=as_seed(seed).child("adversary")).eigenvectors[:, 0]
        order = np.lexsort((np.arange(n), vec))
        sizes = [n // k + (1 if c < n % k else 0) for c in range(k)]
        col = np.empty(n, dtype=np.int64)
        col[order] = np.repeat(np.arange(1, k + 1), sizes)
        return Coloring(k, col)
    if name == "ra-forge":
        if k != 3:
            raise ValueError("ra-forge plants 3 colors")
        try:
            return forge_RA_adversary(host, Q if Q is not None else Graph.complete(3), seed).planted
        except (ForgeFail, GuardExceeded) as exc:
            info["adversary_fail"] = str(getattr(exc, "step", "guard"))
            return balanced_random_partition(n, 3, as_seed(seed).child("fallback"))
    raise ValueError(f"unknown adversary {name!r}")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def _host(cfg: ExperimentConfig, n: int, d, seed) -> Graph:
    if cfg.host_kind == "regular":
        return gen_random_regular(n, int(d), seed.child("host"))
    return gen_gnp(n, float(d), seed.child("host"))


def run_cell(cfg: ExperimentConfig, cell: dict) -> tuple[dict, dict]:
    """Run one cell; failures become data, never exceptions."""
    seed = as_seed(cell["seed"])
    n, d, k = cell["n"], cell["d"], cell["k"]
    p = PipelineParams.from_dict(cfg.params)
    row = {c: None for c in COLUMNS}
    row.update(model=cfg.model, algo=cfg.algo, n=n, d=d, k=k, seed=seed.value, adversary=cell["adversary"])
    times = {c: None for c in TIMING_COLUMNS}
    times["cell"] = cell["index"]
    t0 = time.perf_counter()
    H = _host(cfg, n, d, seed)
    info: dict = {}
    if cfg.model[1] == "A":
        P = adversary_menu(cell["adversary"], H, k, seed.child("adversary"), info=info)
        inst = make_instance("AA", host_input=H, plant_input=P)
    else:
        P = balanced_random_partition(n, k, seed.child("plant"))
        inst = make_instance("AA", host_input=H, plant_input=P)
    inst.params["d"] = float(d)
    inst.params["model"] = cfg.model
    G = inst.result
    failure = info.get("adversary_fail") and f"adversary:{info['adversary_fail']}"
    if cfg.algo == "spectrum":
        rep = validate_planted_spectrum(inst, d=float(d), seed=seed.child("spectrum"))
        row.update(lambda_1=rep.lambda_1, lambda_n_minus_1=rep.lambda_n_minus_1, lambda_n=rep.lambda_n,
                   middle_max=rep.middle_max, host_lambda_hat=rep.host_lambda_hat,
                   alignment_min=min(rep.alignment_x, rep.alignment_y), spectrum_pass=rep.passed)
        if not rep.passed:
            failure = "spectrum:" + ",".join(f for f, ok in rep.flags.items() if not ok)
    else:
        C = None
        if cfg.algo in ("ar", "ra"):
            res = (color_AR if cfg.algo == "ar" else color_RA)(inst, d=float(d), params=p, seed=seed.child("algo"))
            C, row["b"] = res.coloring, res.b
            failure = failure or res.failure
            for s in STAGES:
                if s in res.trace.timings_ms:
                    times[f"t_{s}_ms"] = res.trace.timings_ms[s]
        elif cfg.algo == "k-cluster":
            try:
                C = spectral_k_clustering(G, k, p, d=float(d), seed=seed.child("algo"))
            except ClusteringFailed:
                failure = failure or "cluster"
        else:
            try:
                C = sparse_3_color(G)
            except (NotThreeColorable, ValueError) as exc:
                failure = failure or f"sparse3:{type(exc).__name__}"
        if C is not None:
            row["complete"] = C.is_total
            row["legal"] = bool(is_legal_coloring(G, C)[0]) if C.is_total else False
            if C.is_total:
                row["dist"] = approx_distance(C, P, max(k, C.k))
            else:
                row["dist"] = partial_disagreement(C, P) + len(C.free)
            if row["complete"] and not row["legal"]:
                failure = failure or "illegal"
        else:
            row["complete"] = row["legal"] = False
        if k == 3:
            row["sb"] = len(compute_SB(inst, p.eps))
    row["failure"] = failure or ""
    times["t_total_ms"] = (time.perf_counter() - t0) * 1000
    return row, times


def _run_indexed(args):
    cfg_dict, cell = args
    return run_cell(ExperimentConfig.from_dict(cfg_dict), cell)


def _csv(rows, columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def run_experiment(cfg: ExperimentConfig, out_dir=None) -> dict:
    """Run every cell and write ``results.csv``, ``timings.csv`` and ``summary.json``.

    Results and summary are byte-identical for a fixed config and master seed,
    whatever the worker count; wall-clock timings go to ``timings.csv`` unless
    ``timings_in_results`` is set.
    """
    out = Path(out_dir or cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cells = cfg.cells()
    jobs = [(asdict(cfg), c) for c in cells]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            pairs = list(pool.map(_run_indexed, jobs))
    else:
        pairs = [run_cell(cfg, c) for c in cells]
    rows = [r for r, _ in pairs]
    timings = [t for _, t in pairs]
    columns = COLUMNS
    if cfg.timings_in_results:
        columns = COLUMNS + TIMING_COLUMNS[1:]
        rows = [{**r, **t} for r, t in pairs]
    (out / "results.csv").write_text(_csv(rows, columns))
    (out / "timings.csv").write_text(_csv(timings, TIMING_COLUMNS))
    summary = summarize(cfg, rows)
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return {"results": str(out / "results.csv"), "timings": str(out / "timings.csv"),
            "summary": summary}


def summarize(cfg: ExperimentConfig, rows: list[dict]) -> dict:
    groups: dict = {}
    for r in rows:
        key = f"n={r['n']},d={r['d']},k={r['k']}"
        groups.setdefault(key, []).append(r)
    points = {}
    for key, rs in groups.items():
        if cfg.algo == "spectrum":
            ok = [bool(r["spectrum_pass"]) for r in rs]
        else:
            ok = [bool(r["legal"]) and bool(r["complete"]) for r in rs]
        bs = [r["b"] for r in rs if r["b"] is not None]
        points[key] = {"cells": len(rs), "successes": sum(ok), "success_rate": sum(ok) / len(rs),
                       "mean_b": (sum(bs) / len(bs)) if bs else None,
                       "failures": sorted({r["failure"] for r in rs if r["failure"]})}
    return {"model": cfg.model, "algo": cfg.algo, "master_seed": cfg.master_seed,
            "cells": len(rows), "points": points}


def verify(graph_path, coloring_path) -> tuple[int, list[tuple[int, int]]]:
    """Exit status 0 iff the coloring is legal and total; second item lists monochromatic edges."""
    G = read_graph(graph_path)
    C = read_coloring(coloring_path, n=G.n)
    ok, viol = is_legal_coloring(G, C)
    return (0 if ok and C.is_total else 1), viol
