"""Simple undirected graphs, colorings and exact combinatorial oracles.

Vertices are labeled ``1..n`` everywhere in the public API.  Internally the
adjacency is kept as a 0-based CSR pair (``indptr``, ``indices``) so that the
numeric code in :mod:`hostcolor.spectral` and :mod:`hostcolor.pipeline` can
work on whole arrays.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph


class GuardExceeded(ValueError):
    """Input is larger than an exhaustive routine is allowed to handle."""


class CapExceeded(RuntimeError):
    """A counting routine passed its cap before finishing."""

    def __init__(self, cap: int):
        super().__init__(f"count exceeded cap={cap}")
        self.cap = cap


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class Graph:
    """Immutable simple undirected graph on vertices ``1..n``.

    ``edges`` may be any iterable of pairs (or an ``(m, 2)`` integer array).
    Self-loops, out-of-range ids and repeated pairs raise ``ValueError``.
    """

    __slots__ = ("n", "edge_array", "indptr", "indices", "_adj", "_nbrsets", "_csr")

    def __init__(self, n: int, edges: Iterable[Sequence[int]] | np.ndarray = ()):
        n = int(n)
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        arr = np.asarray(edges if isinstance(edges, np.ndarray) else list(edges), dtype=np.int64)
        if arr.size == 0:
            arr = np.zeros((0, 2), dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("edges must be pairs")
        lo = np.minimum(arr[:, 0], arr[:, 1])
        hi = np.maximum(arr[:, 0], arr[:, 1])
        if len(arr) and (lo.min() < 1 or hi.max() > n):
            raise ValueError(f"edge endpoint out of range 1..{n}")
        if np.any(lo == hi):
            raise ValueError("self-loops are not allowed")
        order = np.lexsort((hi, lo))
        lo, hi = lo[order], hi[order]
        if len(lo) > 1:
            dup = (lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])
            if dup.any():
                i = int(np.argmax(dup))
                raise ValueError(f"parallel edge ({lo[i]}, {hi[i]})")
        self.n = n
        self.edge_array = _freeze(np.stack([lo, hi], axis=1))
        # CSR over 0-based ids, neighbor lists sorted
        src = np.concatenate([lo - 1, hi - 1])
        dst = np.concatenate([hi - 1, lo - 1])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        self.indptr = _freeze(indptr)
        self.indices = _freeze(dst)
        self._adj = None
        self._nbrsets = None
        self._csr = None

    # -- basic accessors -------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.edge_array)

    @property
    def edges(self) -> list[tuple[int, int]]:
        """Edges as ``(u, v)`` with ``u < v``, sorted lexicographically."""
        return [(int(u), int(v)) for u, v in self.edge_array]

    @property
    def degrees(self) -> np.ndarray:
        """Degree array indexed by ``v - 1``."""
        return np.diff(self.indptr)

    def degree(self, v: int) -> int:
        self._check_vertex(v)
        return int(self.indptr[v] - self.indptr[v - 1])

    @property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """``adjacency[v - 1]`` is the sorted neighbor tuple of ``v``."""
        if self._adj is None:
            ind = (self.indices + 1).tolist()
            ptr = self.indptr.tolist()
            self._adj = tuple(tuple(ind[ptr[i]:ptr[i + 1]]) for i in range(self.n))
        return self._adj

    def neighbors(self, v: int) -> tuple[int, ...]:
        self._check_vertex(v)
        return self.adjacency[v - 1]

    def neighbor_sets(self) -> list[frozenset[int]]:
        if self._nbrsets is None:
            self._nbrsets = [frozenset(a) for a in self.adjacency]
        return self._nbrsets

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.neighbor_sets()[u - 1]

    def average_degree(self) -> float:
        return 2.0 * self.m / self.n if self.n else 0.0

    def is_regular(self, d: int | None = None) -> bool:
        deg = self.degrees
        if self.n == 0:
            return True
        target = deg[0] if d is None else d
        return bool(np.all(deg == target))

    def adjacency_matrix(self) -> sparse.csr_matrix:
        """Symmetric 0/1 adjacency as a float64 CSR matrix (cached)."""
        if self._csr is None:
            data = np.ones(len(self.indices), dtype=np.float64)
            self._csr = sparse.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))
        return self._csr

    def dense_adjacency(self) -> np.ndarray:
        A = np.zeros((self.n, self.n))
        if self.m:
            e = self.edge_array - 1
            A[e[:, 0], e[:, 1]] = 1.0
            A[e[:, 1], e[:, 0]] = 1.0
        return A

    def _check_vertex(self, v: int) -> None:
        if not 1 <= v <= self.n:
            raise ValueError(f"vertex {v} out of range 1..{self.n}")

    # -- comparison ------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edge_array, other.edge_array)

    def __hash__(self) -> int:
        return hash((self.n, self.edge_array.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    # -- constructors ----------------------------------------------------

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)])

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls(n, [(i, i % n + 1) for i in range(1, n + 1)])

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls(n, [(i, i + 1) for i in range(1, n)])

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n)

    @classmethod
    def complete_multipartite(cls, sizes: Sequence[int]) -> "Graph":
        labels = np.repeat(np.arange(len(sizes)), sizes)
        n = len(labels)
        return cls(n, [(u + 1, v + 1) for u in range(n) for v in range(u + 1, n) if labels[u] != labels[v]])

    def disjoint_union(self, other: "Graph") -> "Graph":
        return Graph(self.n + other.n, np.concatenate([self.edge_array, other.edge_array + self.n]))

    def add_edges(self, edges: Iterable[Sequence[int]] | np.ndarray) -> "Graph":
        extra = np.asarray(edges if isinstance(edges, np.ndarray) else list(edges), dtype=np.int64).reshape(-1, 2)
        return Graph(self.n, np.concatenate([self.edge_array, extra]))

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Return the graph with vertex ``v`` renamed ``perm[v - 1]``."""
        p = np.asarray(perm, dtype=np.int64)
        if sorted(p.tolist()) != list(range(1, self.n + 1)):
            raise ValueError("perm must be a permutation of 1..n")
        return Graph(self.n, p[self.edge_array - 1])


class Coloring:
    """Total or partial assignment of colors ``1..k`` to vertices; 0 is free.

    ``assign[v - 1]`` holds the color of vertex ``v``.
    """

    __slots__ = ("k", "assign")

    def __init__(self, k: int, assign: Sequence[int] | np.ndarray):
        a = np.array(assign, dtype=np.int64).reshape(-1)
        if k < 1:
            raise ValueError("k must be positive")
        if a.size and (a.min() < 0 or a.max() > k):
            raise ValueError(f"colors must lie in 0..{k}")
        self.k = int(k)
        self.assign = _freeze(a)

    @property
    def n(self) -> int:
        return len(self.assign)

    def __getitem__(self, v: int) -> int:
        if not 1 <= v <= self.n:
            raise ValueError(f"vertex {v} out of range 1..{self.n}")
        return int(self.assign[v - 1])

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Coloring):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.assign, other.assign)

    def __hash__(self) -> int:
        return hash((self.k, self.assign.tobytes()))

    def __repr__(self) -> str:
        head = self.assign[:12].tolist()
        tail = ", ..." if self.n > 12 else ""
        return f"Coloring(k={self.k}, {head}{tail})"

    @property
    def is_total(self) -> bool:
        return bool(np.all(self.assign > 0))

    @property
    def free(self) -> tuple[int, ...]:
        return tuple((np.flatnonzero(self.assign == 0) + 1).tolist())

    @property
    def num_colored(self) -> int:
        return int(np.count_nonzero(self.assign))

    def class_sizes(self) -> list[int]:
        """Sizes of classes ``1..k``."""
        return np.bincount(self.assign, minlength=self.k + 1)[1:].tolist()

    def color_class(self, c: int) -> tuple[int, ...]:
        return tuple((np.flatnonzero(self.assign == c) + 1).tolist())

    def classes(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(self.color_class(c)) for c in range(1, self.k + 1))

    def partition(self) -> frozenset[frozenset[int]]:
        """Unlabeled partition of the colored vertices (empty classes dropped)."""
        return frozenset(c for c in self.classes() if c)

    def same_partition(self, other: "Coloring") -> bool:
        return self.n == other.n and self.partition() == other.partition()

    def tolist(self) -> list[int]:
        return self.assign.tolist()

    def with_assign(self, assign: np.ndarray) -> "Coloring":
        return Coloring(self.k, assign)


def vertex_set(S: Iterable[int], n: int) -> tuple[int, ...]:
    """Validate and normalize a vertex set to a sorted tuple."""
    out = sorted(set(int(v) for v in S))
    if out and (out[0] < 1 or out[-1] > n):
        raise ValueError(f"vertex id out of range 1..{n}")
    return tuple(out)


def _mask(S: Iterable[int], n: int) -> np.ndarray:
    mask = np.zeros(n, dtype=bool)
    s = vertex_set(S, n)
    if s:
        mask[np.asarray(s) - 1] = True
    return mask


def edges_between(G: Graph, S: Iterable[int], T: Iterable[int]) -> int:
    """E(S, T): ordered pairs (s, t) with s in S, t in T and st an edge.

    An edge with both endpoints in ``S & T`` is counted twice.
    """
    s, t = _mask(S, G.n), _mask(T, G.n)
    if G.m == 0:
        return 0
    u, v = G.edge_array[:, 0] - 1, G.edge_array[:, 1] - 1
    return int(np.count_nonzero(s[u] & t[v]) + np.count_nonzero(s[v] & t[u]))


def sparsity(G: Graph, S: Iterable[int], d: int) -> Fraction:
    """E(S, V-S) / ((d/n) |S| |V-S|) as an exact fraction."""
    s = vertex_set(S, G.n)
    if not 0 < len(s) < G.n:
        raise ValueError("S must be a nonempty proper subset")
    if d <= 0:
        raise ValueError("d must be positive")
    rest = sorted(set(range(1, G.n + 1)) - set(s))
    cross = edges_between(G, s, rest)
    return Fraction(cross * G.n, d * len(s) * len(rest))


def connected_components(G: Graph) -> list[tuple[int, ...]]:
    """Components as sorted vertex tuples, ordered by smallest member."""
    if G.n == 0:
        return []
    _, labels = csgraph.connected_components(G.adjacency_matrix(), directed=False)
    groups: dict[int, list[int]] = {}
    for v, lab in enumerate(labels.tolist(), start=1):
        groups.setdefault(lab, []).append(v)
    return sorted((tuple(g) for g in groups.values()), key=lambda g: g[0])


def induced_subgraph(G: Graph, S: Iterable[int]) -> tuple[Graph, tuple[int, ...]]:
    """Subgraph induced on S, relabeled 1..|S| in increasing order of S.

    Returns ``(H, vmap)`` where ``vmap[i - 1]`` is the original id of vertex
    ``i`` of ``H``.
    """
    s = vertex_set(S, G.n)
    new_id = np.zeros(G.n + 1, dtype=np.int64)
    new_id[list(s)] = np.arange(1, len(s) + 1)
    if G.m and s:
        e = new_id[G.edge_array]
        e = e[(e[:, 0] > 0) & (e[:, 1] > 0)]
    else:
        e = np.zeros((0, 2), dtype=np.int64)
    return Graph(len(s), e), s


def is_legal_coloring(G: Graph, C: Coloring) -> tuple[bool, list[tuple[int, int]]]:
    """Check that no edge joins two vertices of the same nonzero color."""
    if C.n != G.n:
        raise ValueError(f"coloring has length {C.n}, graph has {G.n} vertices")
    if G.m == 0:
        return True, []
    cu = C.assign[G.edge_array[:, 0] - 1]
    cv = C.assign[G.edge_array[:, 1] - 1]
    bad = (cu == cv) & (cu > 0)
    viol = [(int(u), int(v)) for u, v in G.edge_array[bad]]
    return not viol, viol


# -- exact coloring search ------------------------------------------------


def _search_order(adj: Sequence[Sequence[int]], comp: Sequence[int]) -> list[int]:
    """Highest degree first, then most already-placed neighbors."""
    comp_set = set(comp)
    placed: list[int] = []
    in_order: set[int] = set()
    weight = {v: 0 for v in comp}
    while len(placed) < len(comp):
        v = max((u for u in comp if u not in in_order),
                key=lambda u: (weight[u], len(adj[u]), -u))
        placed.append(v)
        in_order.add(v)
        for w in adj[v]:
            if w in comp_set and w not in in_order:
                weight[w] += 1
    return placed


def _count_component(adj, comp, k, cap) -> int:
    order = _search_order(adj, comp)
    pos = {v: i for i, v in enumerate(order)}
    back = [[pos[w] for w in adj[v] if w in pos and pos[w] < i] for i, v in enumerate(order)]
    L = len(order)
    col = [0] * L
    count = 0
    # first vertex pinned to color 1; colorings are symmetric in the labels

    def rec(i: int) -> None:
        nonlocal count
        used = {col[j] for j in back[i]}
        if i == L - 1:
            count += k - len(used)
            if count * k > cap:
                raise CapExceeded(cap)
            return
        for c in range(1, k + 1):
            if c not in used:
                col[i] = c
                rec(i + 1)
        col[i] = 0

    if L == 1:
        return k
    col[0] = 1
    rec(1)
    return count * k


def count_k_colorings(G: Graph, k: int, cap: int = 10**7, max_n: int = 32) -> int:
    """Exact number of legal total k-colorings (labels distinguished).

    Raises :class:`CapExceeded` once the count is known to exceed ``cap`` and
    :class:`GuardExceeded` when ``G.n > max_n``.
    """
    if G.n > max_n:
        raise GuardExceeded(f"n={G.n} exceeds exhaustive guard {max_n}")
    if k < 1:
        return 0 if G.n else 1
    adj = [[w - 1 for w in nb] for nb in G.adjacency]
    counts = []
    exceeded = False
    for comp in connected_components(G):
        try:
            counts.append(_count_component(adj, [v - 1 for v in comp], k, cap))
        except CapExceeded:
            exceeded = True
            continue
        if counts[-1] == 0:
            return 0
    if exceeded:
        raise CapExceeded(cap)
    total = math.prod(counts)
    if total > cap:
        raise CapExceeded(cap)
    return total


def enumerate_k_colorings(G: Graph, k: int, max_n: int = 32, limit: int | None = None):
    """Yield every legal total k-coloring as a tuple, lexicographic in vertex id."""
    if G.n > max_n:
        raise GuardExceeded(f"n={G.n} exceeds exhaustive guard {max_n}")
    adj = G.adjacency
    col = [0] * (G.n + 1)
    produced = 0

    def rec(v: int):
        nonlocal produced
        if v > G.n:
            produced += 1
            yield tuple(col[1:])
            return
        used = {col[w] for w in adj[v - 1] if w < v}
        for c in range(1, k + 1):
            if c not in used:
                col[v] = c
                yield from rec(v + 1)
                if limit is not None and produced >= limit:
                    return
        col[v] = 0

    yield from rec(1)


def _propagate(dom: list[int], adj, queue: list[int]) -> bool:
    """Remove fixed colors from neighbors until nothing changes; False on a wipeout."""
    while queue:
        v = queue.pop()
        bit = dom[v]
        for w in adj[v]:
            if dom[w] & bit:
                dom[w] &= ~bit
                if dom[w] == 0:
                    return False
                if dom[w] & (dom[w] - 1) == 0:
                    queue.append(w)
    return True


def _singleton_pass(dom: list[int], adj, verts: list[int]) -> bool:
    """Drop every color whose trial assignment propagates to a wipeout."""
    changed = True
    while changed:
        changed = False
        for v in verts:
            d = dom[v]
            if d & (d - 1) == 0:
                continue
            bit = 1
            while bit <= d:
                if d & bit:
                    trial = dom[:]
                    trial[v] = bit
                    if not _propagate(trial, adj, [v]):
                        dom[v] &= ~bit
                        if dom[v] == 0:
                            return False
                        changed = True
                        if dom[v] & (dom[v] - 1) == 0 and not _propagate(dom, adj, [v]):
                            return False
                bit <<= 1
            d = dom[v]
    return True


def find_k_coloring(G: Graph, k: int) -> Coloring | None:
    """Return some legal k-coloring or ``None`` if none exists.

    Backtracking per component over color domains, with neighbor propagation
    of fixed colors and a singleton-consistency pass at every node (a color
    is dropped when fixing it forces a wipeout).  Branches on a smallest
    domain, highest degree first.  Exponential in the worst case; meant for
    certification on small or highly structured graphs.
    """
    if G.n == 0:
        return Coloring(k, [])
    adj = [[w - 1 for w in nb] for nb in G.adjacency]
    full = (1 << k) - 1
    dom = [full] * G.n

    def solve(dom: list[int], verts: list[int]) -> list[int] | None:
        if not _singleton_pass(dom, adj, verts):
            return None
        open_ = [v for v in verts if dom[v] & (dom[v] - 1)]
        if not open_:
            return dom
        v = min(open_, key=lambda u: (bin(dom[u]).count("1"), -len(adj[u]), u))
        bit = 1
        while bit <= dom[v]:
            if dom[v] & bit:
                trial = dom[:]
                trial[v] = bit
                if _propagate(trial, adj, [v]):
                    got = solve(trial, verts)
                    if got is not None:
                        return got
            bit <<= 1
        return None

    for comp in connected_components(G):
        verts = [v - 1 for v in comp]
        start = max(verts, key=lambda u: (len(adj[u]), -u))
        # colors are interchangeable inside a fresh component
        dom[start] = 1
        if not _propagate(dom, adj, [start]):
            return None
        got = solve(dom, verts)
        if got is None:
            return None
        dom = got
    return Coloring(k, [d.bit_length() for d in dom])


# -- densest subgraph ------------------------------------------------------


def _densest_exhaustive(G: Graph) -> tuple[tuple[int, ...], Fraction]:
    n = G.n
    nbr_masks = [0] * n
    for u, v in G.edge_array.tolist():
        nbr_masks[u - 1] |= 1 << (v - 1)
        nbr_masks[v - 1] |= 1 << (u - 1)
    E = np.zeros(1, dtype=np.int32)
    for i in range(n):
        low = np.arange(1 << i, dtype=np.int64)
        gain = np.bitwise_count(low & (nbr_masks[i] & ((1 << i) - 1))).astype(np.int32)
        E = np.concatenate([E, E + gain])
    size = np.bitwise_count(np.arange(1 << n, dtype=np.int64)).astype(np.int32)
    size[0] = 1  # empty set excluded below
    ratio = E / size
    ratio[0] = -1.0
    i = int(np.argmax(ratio))
    best_e, best_s = int(E[i]), int(size[i])
    # exact tie set, then union (densest sets are closed under union)
    tied = np.flatnonzero(E.astype(np.int64) * best_s == best_e * size.astype(np.int64))
    tied = tied[tied > 0]
    union = int(np.bitwise_or.reduce(tied)) if len(tied) else i
    S = tuple(v + 1 for v in range(n) if union >> v & 1)
    return S, Fraction(2 * best_e, best_s)


def _max_excess_set(G: Graph, g: Fraction) -> tuple[int, ...]:
    """Largest S maximizing |E(S)| - g|S| (empty when the max is 0 only at S=())."""
    import networkx as nx

    n, m = G.n, G.m
    p, q = g.numerator, g.denominator
    deg = G.degrees.tolist()
    F = nx.DiGraph()
    s, t = "s", "t"
    for v in range(n):
        F.add_edge(s, v, capacity=q * m)
        F.add_edge(v, t, capacity=q * m + 2 * p - q * deg[v])
    for u, v in G.edge_array.tolist():
        F.add_edge(u - 1, v - 1, capacity=q)
        F.add_edge(v - 1, u - 1, capacity=q)
    R = nx.algorithms.flow.preflow_push(F, s, t)
    # vertices that can still reach t in the residual graph lie on the sink side
    # of every minimum cut; everything else forms the maximal source side
    reach = {t}
    stack = [t]
    while stack:
        x = stack.pop()
        for y in R.predecessors(x):
            e = R[y][x]
            if y not in reach and e["capacity"] - e["flow"] > 0:
                reach.add(y)
                stack.append(y)
    return tuple(v + 1 for v in range(n) if v not in reach)


def _densest_flow(G: Graph) -> tuple[tuple[int, ...], Fraction]:
    n, m = G.n, G.m
    if m == 0:
        return tuple(range(1, n + 1)), Fraction(0)
    lo = Fraction(m, n)
    best = tuple(range(1, n + 1))
    hi = Fraction(m + 1)
    # distinct achievable edge densities e/s differ by at least 1/(n(n-1))
    while hi - lo >= Fraction(1, n * n):
        mid = (lo + hi) / 2
        S = _max_excess_set(G, mid)
        if S:
            sub, _ = induced_subgraph(G, S)
            lo = Fraction(sub.m, len(S))
            best = S
        else:
            hi = mid
    maximal = _max_excess_set(G, lo) or best
    sub, _ = induced_subgraph(G, maximal)
    assert Fraction(sub.m, len(maximal)) == lo
    return maximal, 2 * lo


def max_density_subgraph(G: Graph, method: str = "auto") -> tuple[tuple[int, ...], Fraction]:
    """Densest subgraph by average degree ``2|E(S)|/|S|``.

    Returns the maximal maximizer (the union of all densest vertex sets) and
    its average degree.  ``method`` is ``"exhaustive"`` (n <= 22), ``"flow"``
    (parametric min-cut with exact rational search) or ``"auto"``.
    """
    if G.n < 1:
        raise ValueError("graph must have at least one vertex")
    if method == "auto":
        method = "exhaustive" if G.n <= 22 else "flow"
    if method == "exhaustive":
        if G.n > 22:
            raise GuardExceeded("exhaustive densest subgraph limited to n <= 22")
        return _densest_exhaustive(G)
    if method == "flow":
        return _densest_flow(G)
    raise ValueError(f"unknown method {method!r}")


def is_balanced(G: Graph) -> bool:
    """True when no subgraph has larger average degree than G itself."""
    _, dens = max_density_subgraph(G)
    return dens == Fraction(2 * G.m, G.n)
