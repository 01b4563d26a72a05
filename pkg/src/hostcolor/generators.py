"""Host graphs, planted partitions and planted instances."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .graph import Coloring, Graph
from .io import read_coloring, read_graph, write_coloring, write_graph
from .rng import Seed, as_rng, as_seed

MODELS = ("AA", "AR", "RA", "RR")


class GenerationError(RuntimeError):
    pass


def gen_gnp(n: int, d: float, seed=None) -> Graph:
    """G(n, p) with p = d / (n - 1): each pair kept independently."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0 <= d <= n - 1:
        raise ValueError(f"average degree {d} outside [0, {n - 1}]")
    p = d / (n - 1)
    rng = as_rng(seed)
    chunks = []
    # rows are drawn in blocks so memory stays O(block * n)
    block = max(1, 2_000_000 // n)
    for start in range(0, n - 1, block):
        rows = np.arange(start, min(start + block, n - 1))
        counts = n - 1 - rows
        r = np.repeat(rows, counts)
        offs = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
        c = r + 1 + offs
        keep = rng.random(len(r)) < p
        chunks.append(np.stack([r[keep] + 1, c[keep] + 1], axis=1))
    edges = np.concatenate(chunks) if chunks else np.zeros((0, 2), dtype=np.int64)
    return Graph(n, edges)


def _suitable(left: np.ndarray, edge_keys: set, n: int) -> bool:
    nodes = np.unique(left)
    for i, a in enumerate(nodes.tolist()):
        for b in nodes[i + 1:].tolist():
            if a * n + b not in edge_keys:
                return True
    return False


def gen_degree_sequence(degrees: Sequence[int], seed=None, max_tries: int = 1000) -> Graph:
    """Simple graph with the given degrees by stub pairing.

    Stubs are shuffled and paired; pairs forming a loop or repeating an edge
    are returned to the pool and re-paired.  An attempt that gets stuck is
    discarded and retried, up to ``max_tries`` attempts.
    """
    deg = np.asarray(degrees, dtype=np.int64)
    n = len(deg)
    if deg.sum() % 2:
        raise ValueError("degree sum must be even")
    if n and (deg.min() < 0 or deg.max() >= n):
        raise ValueError("degrees must lie in [0, n-1]")
    rng = as_rng(seed)
    for _ in range(max_tries):
        keys = np.zeros(0, dtype=np.int64)
        key_set: set[int] = set()
        stubs = np.repeat(np.arange(n, dtype=np.int64), deg)
        stuck = False
        rounds = 0
        while len(stubs):
            rounds += 1
            if rounds > 10_000:
                stuck = True
                break
            rng.shuffle(stubs)
            a, b = stubs[0::2], stubs[1::2]
            lo, hi = np.minimum(a, b), np.maximum(a, b)
            k = lo * n + hi
            ok = lo != hi
            _, first = np.unique(k, return_index=True)
            fresh = np.zeros(len(k), dtype=bool)
            fresh[first] = True
            ok &= fresh
            if len(keys):
                ok &= ~np.isin(k, keys)
            new = k[ok]
            keys = np.concatenate([keys, new])
            key_set.update(new.tolist())
            stubs = np.concatenate([a[~ok], b[~ok]])
            if len(stubs) and not ok.any() and not _suitable(stubs, key_set, n):
                stuck = True
                break
        if not stuck:
            keys.sort()
            return Graph(n, np.stack([keys // n + 1, keys % n + 1], axis=1))
    raise GenerationError(f"no simple graph found after {max_tries} attempts")


def gen_random_regular(n: int, d: int, seed=None, max_tries: int = 1000) -> Graph:
    """Random simple d-regular graph (pairing model with rejection)."""
    if (n * d) % 2:
        raise ValueError("n * d must be even")
    if not 0 <= d < n:
        raise ValueError("need 0 <= d < n")
    G = gen_degree_sequence([d] * n, seed, max_tries=max_tries)
    assert G.is_regular(d)
    return G


def random_partition(n: int, k: int, seed=None) -> Coloring:
    """Each vertex independently uniform over 1..k."""
    if n < 1 or k < 2:
        raise ValueError("need n >= 1 and k >= 2")
    return Coloring(k, as_rng(seed).integers(1, k + 1, size=n))


def balanced_random_partition(n: int, k: int, seed=None) -> Coloring:
    """Uniform random partition with class sizes floor(n/k) or ceil(n/k)."""
    if n < k or k < 1:
        raise ValueError("need n >= k >= 1")
    labels = np.tile(np.arange(1, k + 1), -(-n // k))[:n]
    return Coloring(k, as_rng(seed).permutation(labels))


@dataclass(frozen=True)
class PlantedInstance:
    host: Graph
    planted: Coloring
    result: Graph
    params: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.host.n

    @property
    def k(self) -> int:
        return self.planted.k

    @property
    def d(self) -> float:
        return float(self.params.get("d") or self.host.average_degree())


def apply_planting(H: Graph, P: Coloring, params: dict | None = None) -> PlantedInstance:
    """Remove every host edge whose endpoints share a planted class."""
    if P.n != H.n:
        raise ValueError("planting length does not match host")
    if not P.is_total:
        raise ValueError("planted coloring must be total")
    e = H.edge_array
    if len(e):
        keep = P.assign[e[:, 0] - 1] != P.assign[e[:, 1] - 1]
        e = e[keep]
    G = Graph(H.n, e)
    meta = {"n": H.n, "k": P.k, "d": H.average_degree()}
    meta.update(params or {})
    return PlantedInstance(H, P, G, meta)


def make_instance(model: str, n: int | None = None, k: int = 3, d: float | None = None,
                  host_input: Graph | None = None, plant_input: Coloring | None = None,
                  seed=None, host_kind: str = "gnp", plant_kind: str = "balanced") -> PlantedInstance:
    """Build an instance under one of the four host/planting selection rules.

    The first letter of ``model`` is the host axis, the second the planting
    axis; ``A`` means the caller supplies it, ``R`` means it is sampled.
    """
    if model not in MODELS:
        raise ValueError(f"model must be one of {MODELS}")
    host_adv, plant_adv = model[0] == "A", model[1] == "A"
    if host_adv != (host_input is not None):
        raise ValueError(f"model {model}: host_input must be {'given' if host_adv else 'omitted'}")
    if plant_adv != (plant_input is not None):
        raise ValueError(f"model {model}: plant_input must be {'given' if plant_adv else 'omitted'}")
    s = as_seed(seed)
    if host_adv:
        H = host_input
    else:
        if n is None or d is None:
            raise ValueError("random host needs n and d")
        if host_kind == "gnp":
            H = gen_gnp(n, d, s.child("host"))
        elif host_kind == "regular":
            H = gen_random_regular(n, int(d), s.child("host"))
        else:
            raise ValueError(f"unknown host_kind {host_kind!r}")
    if n is not None and n != H.n:
        raise ValueError("n does not match supplied host")
    if plant_adv:
        P = plant_input
        k = P.k
    elif plant_kind == "balanced":
        P = balanced_random_partition(H.n, k, s.child("plant"))
    elif plant_kind == "uniform":
        P = random_partition(H.n, k, s.child("plant"))
    else:
        raise ValueError(f"unknown plant_kind {plant_kind!r}")
    dd = float(d) if d is not None else H.average_degree()
    meta = {"model": model, "n": H.n, "k": k, "d": dd, "seed": s.value,
            "host_kind": host_kind if not host_adv else "supplied",
            "plant_kind": plant_kind if not plant_adv else "supplied"}
    return apply_planting(H, P, meta)


def write_bundle(inst: PlantedInstance, directory: str | os.PathLike, extra: dict | None = None) -> Path:
    """Write ``host.graph``, ``result.graph``, ``planted.coloring``, ``meta.json``."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    write_graph(inst.host, out / "host.graph")
    write_graph(inst.result, out / "result.graph")
    write_coloring(inst.planted, out / "planted.coloring")
    meta = {key: inst.params.get(key) for key in ("model", "n", "k", "d", "seed")}
    meta["generator_version"] = __version__
    for key, val in inst.params.items():
        meta.setdefault(key, val)
    meta.update(extra or {})
    (out / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return out


def read_bundle(directory: str | os.PathLike) -> PlantedInstance:
    src = Path(directory)
    meta = json.loads((src / "meta.json").read_text())
    H = read_graph(src / "host.graph")
    G = read_graph(src / "result.graph")
    P = read_coloring(src / "planted.coloring", n=H.n, k=meta.get("k"))
    return PlantedInstance(H, P, G, meta)
