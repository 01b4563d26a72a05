"""Hardness constructions and adversarial instance builders, each certified on return."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .generators import (PlantedInstance, apply_planting, balanced_random_partition, gen_degree_sequence,
                         random_partition)
from .graph import (Coloring, Graph, GuardExceeded, count_k_colorings, enumerate_k_colorings,
                    find_k_coloring, is_legal_coloring, max_density_subgraph)
from .rng import as_rng, as_seed
from .spectral import DENSE_CAP, full_spectrum_dense


class ForgeFail(RuntimeError):
    """A construction step failed; ``step`` names it (1, 2, 3, "S1", ...)."""

    def __init__(self, step, detail: str = ""):
        super().__init__(f"forge failed at step {step}" + (f": {detail}" if detail else ""))
        self.step = step
        self.detail = detail


@dataclass(frozen=True)
class ForgeParams:
    """Exponents of the random-host hardness regime.

    ``delta`` is the host degree exponent (d = n^delta), ``eps`` the size
    exponent of the hidden graph (n(Q) = n^eps), ``alpha`` its average degree.
    """

    delta: float = 0.45
    eps: float = 0.01
    alpha: float = 3.75
    seed: int = 0

    def __post_init__(self):
        for name in ("delta", "eps"):
            if not 0 < getattr(self, name) < 1:
                raise ValueError(f"{name} must lie in (0, 1)")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")

    @property
    def delta0(self) -> float:
        return (7 + 16 * self.eps) / 15

    def in_window(self) -> bool:
        """Whether delta0 < delta < 1/2 - eps."""
        return self.delta0 < self.delta < 0.5 - self.eps

    def block_count(self, n: int) -> float:
        a, dl, e = self.alpha, self.delta, self.eps
        return min(math.sqrt(e) * n ** ((1 - 2 * dl) / 2), math.sqrt(e) * n ** ((a * dl - a + 2) / 4))


# -- gadgets ----------------------------------------------------------------


@dataclass(frozen=True)
class Gadget:
    graph: Graph
    ports: tuple[int, ...]
    certified: dict = field(default_factory=dict)


def _ports_always_equal(G: Graph, ports) -> tuple[bool, int]:
    count = 0
    for c in enumerate_k_colorings(G, 3, max_n=16):
        count += 1
        if len({c[p - 1] for p in ports}) != 1:
            return False, count
    return True, count


def _chain(num_ports: int) -> Graph:
    edges = []
    nxt = num_ports + 1
    for i in range(1, num_ports):
        a, b = nxt, nxt + 1
        nxt += 2
        edges += [(i, a), (i, b), (a, b), (a, i + 1), (b, i + 1)]
    return Graph(3 * num_ports - 2, edges)


def diamond_gadget() -> Gadget:
    """K4 minus the edge 1-2; vertices 1 and 2 are the ports."""
    G = _chain(2)
    equal, count = _ports_always_equal(G, (1, 2))
    if not equal or count != 6:
        raise AssertionError("diamond certification failed")
    _, dens = max_density_subgraph(G)
    return Gadget(G, (1, 2), {"ports_equal_in_all_3_colorings": True, "colorings": count,
                              "method": "exhaustive", "max_subgraph_density": dens})


def equality_fanout(num_ports: int) -> Gadget:
    """Chain of diamonds t_1 - D - t_2 - ... - t_p with ports 1..p.

    3p - 2 vertices and 5(p - 1) edges.  Port equality is checked by
    enumerating every 3-coloring when p <= 5 and link by link otherwise (each
    link is a diamond whose ports are certified equal).
    """
    if num_ports < 2:
        raise ValueError("need at least two ports")
    G = _chain(num_ports)
    ports = tuple(range(1, num_ports + 1))
    if num_ports <= 5:
        equal, count = _ports_always_equal(G, ports)
        method = "exhaustive"
    else:
        diamond_gadget()
        equal, count, method = True, 3 * 2 ** (num_ports - 1), "per-link"
    if not equal:
        raise AssertionError("fanout certification failed")
    _, dens = max_density_subgraph(G)
    return Gadget(G, ports, {"ports_equal_in_all_3_colorings": True, "colorings": count,
                             "method": method, "max_subgraph_density": dens})


# -- reduction to balanced graphs --------------------------------------------


@dataclass(frozen=True)
class ReductionOutput:
    graph: Graph
    port_map: dict[int, tuple[int, ...]]
    average_degree: Fraction
    max_density: Fraction
    balanced: bool
    colorability: dict | None

    def decode(self, C: Coloring) -> Coloring:
        """Input coloring read off the first port of every vertex's fanout."""
        return Coloring(3, [C[self.port_map[v][0]] for v in sorted(self.port_map)])


def reduce_4regular_to_balanced(H4: Graph, check_colorability: bool | None = None) -> ReductionOutput:
    """Replace every vertex by a 4-port diamond chain and every edge by a port-to-port edge.

    The output has 10 n vertices and 17 n edges (average degree 3.4).  The
    balancedness certificate is always computed; 3-colorability of input and
    output is compared by exact search when ``check_colorability`` is on
    (default: n(H4) <= 12).
    """
    if not H4.is_regular(4):
        raise ValueError("input must be 4-regular")
    gad = equality_fanout(4)
    n = H4.n
    size = gad.graph.n
    edges = []
    port_map = {}
    for v in range(1, n + 1):
        off = size * (v - 1)
        edges += [(a + off, b + off) for a, b in gad.graph.edges]
        port_map[v] = tuple(p + off for p in gad.ports)
    used = {v: 0 for v in range(1, n + 1)}
    for u, v in H4.edges:
        pu, pv = port_map[u][used[u]], port_map[v][used[v]]
        used[u] += 1
        used[v] += 1
        edges.append((pu, pv))
    R = Graph(size * n, edges)
    avg = Fraction(2 * R.m, R.n)
    _, dens = max_density_subgraph(R)
    if dens != avg:
        raise ForgeFail("balanced", f"densest subgraph {dens} exceeds average {avg}")
    report = None
    if check_colorability is None:
        check_colorability = n <= 12
    if check_colorability:
        cH = find_k_coloring(H4, 3)
        cR = find_k_coloring(R, 3)
        if (cH is None) != (cR is None):
            raise ForgeFail("colorability", "reduction changed 3-colorability")
        out = ReductionOutput(R, port_map, avg, dens, True, None)
        if cR is not None and not is_legal_coloring(H4, out.decode(cR))[0]:
            raise ForgeFail("decode", "port colors do not color the input")
        report = {"input_3colorable": cH is not None, "output_3colorable": cR is not None}
    return ReductionOutput(R, port_map, avg, dens, True, report)


def triple_copy(G: Graph) -> Graph:
    """Three disjoint copies of G, copy j on vertices j n + 1 .. (j + 1) n."""
    return G.disjoint_union(G).disjoint_union(G)


def rotated_coloring(chi: Coloring) -> Coloring:
    """Coloring of ``triple_copy`` using chi shifted by j on copy j; classes are equal."""
    if chi.k != 3 or not chi.is_total:
        raise ValueError("need a total 3-coloring")
    a = chi.assign
    return Coloring(3, np.concatenate([(a - 1 + j) % 3 + 1 for j in range(3)]))


def balanced_three_coloring(Q: Graph, max_n: int = 12) -> Coloring | None:
    """First legal 3-coloring with class sizes floor/ceil(n/3), by enumeration."""
    if Q.n > max_n:
        raise GuardExceeded(f"balanced coloring search limited to n <= {max_n}")
    lo = Q.n // 3
    for c in enumerate_k_colorings(Q, 3, max_n=max_n):
        C = Coloring(3, c)
        if min(C.class_sizes()) >= lo and max(C.class_sizes()) <= -(-Q.n // 3):
            return C
    return None


def _is_balanced_coloring(C: Coloring) -> bool:
    s = C.class_sizes()
    return max(s) - min(s) <= 1


# -- A/A: hidden graph next to a planted expander ----------------------------


@dataclass(frozen=True)
class AAInstance:
    Q: Graph
    chi_Q: Coloring
    Z3: PlantedInstance
    G: Graph
    H: Graph
    planted: Coloring
    connectors: tuple[int, ...]
    certificate: dict

    @property
    def n(self) -> int:
        return self.G.n


def _lambda_hat(ev: np.ndarray) -> float:
    return float(max(ev[1], -ev[-1]))


def forge_AA(Q: Graph, n: int, d: int, seed=None, chi_Q: Coloring | None = None) -> AAInstance:
    """Disjoint union of Q and a planted near-regular random graph Z3.

    Z has n - n(Q) vertices; n(Q)(d - 4) of them (the connectors) get degree
    d - 1 and the rest d, with each planted class of Z holding the connectors
    meant for the Q-vertices of the same color.  The certificate host H wires
    every q to d - 4 unused connectors of color chi(q), so H is d-regular and
    planting chi + plant(Z) on H gives back G.  The spectrum of H is checked
    against that of Z padded with isolated vertices.
    """
    if not Q.is_regular(4):
        raise ValueError("Q must be 4-regular")
    if d < 5:
        raise ValueError("need d >= 5")
    nQ = Q.n
    if chi_Q is None:
        chi_Q = balanced_three_coloring(Q)
        if chi_Q is None:
            raise ForgeFail("chi", "Q has no balanced 3-coloring")
    if chi_Q.n != nQ or not is_legal_coloring(Q, chi_Q)[0] or not chi_Q.is_total:
        raise ValueError("chi_Q is not a legal coloring of Q")
    if not _is_balanced_coloring(chi_Q):
        raise ValueError("chi_Q must be balanced")
    s = as_seed(seed)
    nZ = n - nQ
    if nZ <= d:
        raise ValueError("n too small for degree d")
    plant_Z = balanced_random_partition(nZ, 3, s.child("plant"))
    need = {c: chi_Q.class_sizes()[c - 1] * (d - 4) for c in (1, 2, 3)}
    rng = as_rng(s.child("connectors"))
    pools = {}
    for c in (1, 2, 3):
        members = np.asarray(plant_Z.color_class(c))
        if need[c] > len(members):
            raise ValueError(f"connector budget infeasible: class {c} needs {need[c]}, has {len(members)}")
        pools[c] = rng.permutation(members)[:need[c]].tolist()
    connectors = sorted(v for c in pools for v in pools[c])
    degs = np.full(nZ, d, dtype=np.int64)
    degs[np.asarray(connectors) - 1] = d - 1
    if degs.sum() % 2:
        raise ValueError("degree sum of Z is odd; change n or d")
    Z = gen_degree_sequence(degs, s.child("Z"))
    Z3 = apply_planting(Z, plant_Z, {"d": d})
    G = Q.disjoint_union(Z3.result)
    wires = []
    for q in range(1, nQ + 1):
        c = chi_Q[q]
        take, pools[c] = pools[c][:d - 4], pools[c][d - 4:]
        wires += [(q, nQ + z) for z in take]
    H = Q.disjoint_union(Z).add_edges(wires)
    planted = Coloring(3, np.concatenate([chi_Q.assign, plant_Z.assign]))
    cert = {"H_regular": H.is_regular(d), "replay_exact": apply_planting(H, planted).result == G,
            "n": n, "d": d, "nQ": nQ, "connectors": len(connectors)}
    if not cert["H_regular"] or not cert["replay_exact"]:
        raise ForgeFail("certificate", str(cert))
    if n <= DENSE_CAP:
        evH = full_spectrum_dense(H).eigenvalues
        Zpad = Graph.empty(nQ).disjoint_union(Z)
        evZ = full_spectrum_dense(Zpad).eigenvalues
        N = Graph(n, np.concatenate([Q.edge_array, np.asarray(wires, dtype=np.int64)]))
        evN = full_spectrum_dense(N).eigenvalues
        normN = float(max(abs(evN[0]), abs(evN[-1])))
        bound = 4 + math.sqrt(d - 4)
        cert.update(lambda_hat_H=_lambda_hat(evH), lambda_hat_Z=_lambda_hat(evZ), perturbation_norm=normN,
                    weyl_max_shift=float(np.abs(evH - evZ).max()))
        cert["weyl_ok"] = cert["weyl_max_shift"] <= normN + 1e-6 and normN <= bound + 1e-9
        cert["lambda_bound_ok"] = cert["lambda_hat_H"] <= cert["lambda_hat_Z"] + bound + 1e-6
        if not (cert["weyl_ok"] and cert["lambda_bound_ok"]):
            raise ForgeFail("certificate", "perturbation bound violated")
    conn_global = tuple(nQ + z for z in connectors)
    return AAInstance(Q, chi_Q, Z3, G, H, planted, conn_global, cert)


# -- induced copies and adversarial plantings -------------------------------


def find_induced_copy(G: Graph, Q: Graph, seed=None, max_q: int = 12) -> tuple[int, ...] | None:
    """Random vertex-induced embedding of Q in G: ``result[i-1]`` is the image of i.

    Backtracking over Q's vertices (most constrained first) with candidate
    lists shuffled by ``seed``; every edge and non-edge is checked.
    """
    if Q.n > max_q:
        raise GuardExceeded(f"induced copy search limited to n(Q) <= {max_q}")
    if Q.n == 0:
        return ()
    if Q.n > G.n:
        return None
    rng = as_rng(seed)
    qadj = Q.neighbor_sets()
    gadj = G.neighbor_sets()
    order = [int(np.argmax(Q.degrees)) + 1]
    while len(order) < Q.n:
        rest = [v for v in range(1, Q.n + 1) if v not in order]
        order.append(max(rest, key=lambda v: (len(qadj[v - 1] & set(order)), Q.degree(v), -v)))
    image: dict[int, int] = {}
    used: set[int] = set()

    def rec(i: int) -> bool:
        if i == len(order):
            return True
        q = order[i]
        placed_nb = [image[p] for p in order[:i] if p in qadj[q - 1]]
        if placed_nb:
            cand = set(gadj[placed_nb[0] - 1])
            for x in placed_nb[1:]:
                cand &= gadj[x - 1]
            cand = sorted(cand - used)
        else:
            cand = [v for v in range(1, G.n + 1) if v not in used]
        cand = [cand[j] for j in rng.permutation(len(cand))]
        for v in cand:
            if G.degree(v) < Q.degree(q):
                continue
            ok = all((p in qadj[q - 1]) == (image[p] in gadj[v - 1]) for p in order[:i])
            if not ok:
                continue
            image[q] = v
            used.add(v)
            if rec(i + 1):
                return True
            del image[q]
            used.discard(v)
        return False

    if not rec(0):
        return None
    out = tuple(image[q] for q in range(1, Q.n + 1))
    for a in range(1, Q.n + 1):
        for b in range(a + 1, Q.n + 1):
            assert Q.has_edge(a, b) == G.has_edge(out[a - 1], out[b - 1])
    return out


@dataclass(frozen=True)
class AdversaryPlanting:
    planted: Coloring
    copy: tuple[int, ...]
    chi: Coloring


def _fill_balanced(n: int, k: int, forced: dict[int, int], rng, step) -> Coloring:
    counts = np.bincount(list(forced.values()), minlength=k + 1)[1:]
    base, extra = divmod(n, k)
    # classes already fullest get the larger targets
    order = np.argsort(-counts, kind="stable")
    target = np.full(k, base)
    target[order[:extra]] += 1
    if (counts > target).any():
        raise ForgeFail(step, "forced vertices do not fit a balanced planting")
    col = np.zeros(n, dtype=np.int64)
    for v, c in forced.items():
        col[v - 1] = c
    free = np.flatnonzero(col == 0)
    fill = np.repeat(np.arange(1, k + 1), target - counts)
    col[free] = rng.permutation(fill)
    return Coloring(k, col)


def _small_guard(H: Graph, Q: Graph) -> None:
    if Q.n > 12 or H.n > 400:
        raise GuardExceeded("adversary search needs n(Q) <= 12 and n(H) <= 400")


def forge_RA_adversary(H: Graph, Q: Graph, seed=None, chi_Q: Coloring | None = None) -> AdversaryPlanting:
    """Hide Q in a given host by choosing the planting.

    Step 1 finds a random induced copy of Q (fail: none).  Step 2 fails if two
    differently colored Q-vertices share an outside neighbor.  Step 3 extends
    chi to a balanced planting in which every outside neighbor of a Q-vertex
    copies its color, so Q becomes a separate component after planting.
    """
    _small_guard(H, Q)
    s = as_seed(seed)
    chi = chi_Q if chi_Q is not None else balanced_three_coloring(Q)
    if chi is None:
        raise ValueError("Q has no balanced 3-coloring")
    copy = find_induced_copy(H, Q, s.child("copy"))
    if copy is None:
        raise ForgeFail(1, "no induced copy of Q")
    inside = set(copy)
    forced = {v: chi[i + 1] for i, v in enumerate(copy)}
    adj = H.neighbor_sets()
    for i, v in enumerate(copy):
        for w in adj[v - 1] - inside:
            c = chi[i + 1]
            if forced.setdefault(w, c) != c:
                raise ForgeFail(2, f"vertex {w} is a common neighbor of two colors")
    P = _fill_balanced(H.n, 3, forced, as_rng(s.child("fill")), 3)
    G = apply_planting(H, P).result
    gadj = G.neighbor_sets()
    for i, v in enumerate(copy):
        if gadj[v - 1] - inside or {copy[j - 1] for j in Q.neighbors(i + 1)} != gadj[v - 1]:
            raise AssertionError("planted copy of Q is not a separate component")
    return AdversaryPlanting(P, copy, chi)


def forge_k4_planting(H: Graph, Q: Graph, seed=None, chi_Q: Coloring | None = None) -> AdversaryPlanting:
    """Balanced 4-planting: Q keeps a balanced 3-coloring and all its outside neighbors get color 4.

    Fails with ``S1`` if some Q-vertex has no outside neighbor and ``S2`` if
    the outside neighborhood exceeds n/4.
    """
    _small_guard(H, Q)
    s = as_seed(seed)
    chi = chi_Q if chi_Q is not None else balanced_three_coloring(Q)
    if chi is None:
        raise ValueError("Q has no balanced 3-coloring")
    copy = find_induced_copy(H, Q, s.child("copy"))
    if copy is None:
        raise ForgeFail(1, "no induced copy of Q")
    inside = set(copy)
    adj = H.neighbor_sets()
    outside = set()
    for v in copy:
        out = adj[v - 1] - inside
        if not out:
            raise ForgeFail("S1", f"vertex {v} has no neighbor outside the copy")
        outside |= out
    if len(outside) > H.n / 4:
        raise ForgeFail("S2", f"outside neighborhood {len(outside)} exceeds n/4")
    forced = {v: chi[i + 1] for i, v in enumerate(copy)}
    forced.update({w: 4 for w in outside})
    P = _fill_balanced(H.n, 4, forced, as_rng(s.child("fill")), "S2")
    return AdversaryPlanting(P, copy, chi)


@dataclass(frozen=True)
class EmbedResult:
    host: Graph
    planted: Coloring
    instance: PlantedInstance
    blocks: tuple[tuple[int, ...], ...]
    copy: tuple[int, ...]


def _greedy_independent_set(G: Graph, size: int, rng) -> list[int] | None:
    adj = G.neighbor_sets()
    alive = set(range(1, G.n + 1))
    deg = {v: len(adj[v - 1]) for v in alive}
    tie = rng.permutation(G.n)
    chosen = []
    while alive and len(chosen) < size:
        v = min(alive, key=lambda u: (deg[u], tie[u - 1]))
        chosen.append(v)
        gone = (adj[v - 1] & alive) | {v}
        alive -= gone
        for x in gone:
            for y in adj[x - 1] & alive:
                deg[y] -= 1
    return chosen if len(chosen) == size else None


def embed_Q_via_independent_blocks(Q: Graph, Hprime: Graph, block_size: int, seed=None,
                                   chi_Q: Coloring | None = None,
                                   plant: Coloring | None = None) -> EmbedResult:
    """Blow Q up into independent blocks of H', plant at random, keep one faithful vertex per block.

    Edges of Q become complete bipartite bundles between blocks.  A block
    vertex is faithful when its planted color equals chi of its block; the
    first faithful vertex of each block gives the copy, which is checked to be
    induced in the planted result.
    """
    if block_size < 1:
        raise ValueError("block_size must be positive")
    s = as_seed(seed)
    chi = chi_Q if chi_Q is not None else find_k_coloring(Q, 3)
    if chi is None:
        raise ValueError("Q is not 3-colorable")
    ind = _greedy_independent_set(Hprime, Q.n * block_size, as_rng(s.child("independent")))
    if ind is None:
        raise ForgeFail("independent-set", f"no independent set of size {Q.n * block_size} found")
    blocks = tuple(tuple(sorted(ind[i * block_size:(i + 1) * block_size])) for i in range(Q.n))
    bundle = [(a, b) for i, j in Q.edges for a in blocks[i - 1] for b in blocks[j - 1]]
    H = Hprime.add_edges(bundle)
    P = plant if plant is not None else random_partition(H.n, 3, s.child("plant"))
    inst = apply_planting(H, P)
    copy = []
    for i, blk in enumerate(blocks):
        faithful = [v for v in blk if P[v] == chi[i + 1]]
        if not faithful:
            raise ForgeFail("no-faithful", f"block {i + 1} has no faithful vertex")
        copy.append(faithful[0])
    G = inst.result
    for a in range(1, Q.n + 1):
        for b in range(a + 1, Q.n + 1):
            if Q.has_edge(a, b) != G.has_edge(copy[a - 1], copy[b - 1]):
                raise AssertionError("embedded copy is not induced")
    return EmbedResult(H, P, inst, blocks, tuple(copy))


# -- uniqueness ---------------------------------------------------------------


@dataclass(frozen=True)
class UniquenessReport:
    count: int
    unique: bool


def uniqueness_check(inst: PlantedInstance, cap: int = 10**6, max_n: int = 32) -> UniquenessReport:
    """Count legal k-colorings of the result; unique iff exactly the k! relabelings of the planting."""
    k = inst.k
    count = count_k_colorings(inst.result, k, cap=cap, max_n=max_n)
    uses_all = len(set(inst.planted.tolist())) == k
    return UniquenessReport(count, uses_all and count == math.factorial(k))
