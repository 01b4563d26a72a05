"""2SAT by implication-graph SCCs, and the 2-list coloring reduction."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .graph import Coloring, Graph, is_legal_coloring


class MalformedInstance(ValueError):
    pass


class EmptyList(ValueError):
    """A free vertex has no admissible color left."""

    def __init__(self, vertex: int):
        super().__init__(f"vertex {vertex} has an empty list")
        self.vertex = vertex


@dataclass(frozen=True)
class TwoSatInstance:
    """Clauses are pairs of nonzero ints; ``-v`` is the negation of variable ``v``."""

    num_vars: int
    clauses: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple((int(a), int(b)) for a, b in self.clauses))
        for cl in self.clauses:
            for lit in cl:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise MalformedInstance(f"literal {lit} out of range for {self.num_vars} variables")

    def satisfied_by(self, assign: Mapping[int, bool] | list[bool]) -> bool:
        def val(lit):
            x = assign[abs(lit)] if isinstance(assign, Mapping) else assign[abs(lit) - 1]
            return x if lit > 0 else not x
        return all(val(a) or val(b) for a, b in self.clauses)

    def to_text(self) -> str:
        lines = [f"p cnf {self.num_vars} {len(self.clauses)}"]
        lines += [f"{a} {b} 0" for a, b in self.clauses]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "TwoSatInstance":
        num_vars = None
        clauses = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("c"):
                continue
            parts = line.split()
            if parts[0] == "p":
                if len(parts) != 4 or parts[1] != "cnf":
                    raise MalformedInstance(f"bad header: {line!r}")
                num_vars, expected = int(parts[2]), int(parts[3])
                continue
            lits = [int(x) for x in parts]
            if len(lits) != 3 or lits[2] != 0:
                raise MalformedInstance(f"expected two literals and 0: {line!r}")
            clauses.append((lits[0], lits[1]))
        if num_vars is None:
            raise MalformedInstance("missing header")
        if len(clauses) != expected:
            raise MalformedInstance(f"header says {expected} clauses, found {len(clauses)}")
        return cls(num_vars, tuple(clauses))


def _node(lit: int) -> int:
    # variable v -> nodes 2(v-1) (true) and 2(v-1)+1 (false)
    return 2 * (abs(lit) - 1) + (lit < 0)


def _scc_ids(num_nodes: int, succ: list[list[int]]) -> list[int]:
    """Tarjan, iterative.  Components are numbered in the order they close,
    which is a reverse topological order of the condensation."""
    index = [-1] * num_nodes
    low = [0] * num_nodes
    comp = [-1] * num_nodes
    on_stack = [False] * num_nodes
    stack: list[int] = []
    counter = 0
    ncomp = 0
    for root in range(num_nodes):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            if i < len(succ[v]):
                work[-1] = (v, i + 1)
                w = succ[v][i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
    return comp


def solve_2sat(inst: TwoSatInstance) -> list[bool] | None:
    """Satisfying assignment (``result[v-1]`` is variable v) or ``None`` if UNSAT.

    Each clause (a or b) contributes implications not-a -> b and not-b -> a.  A
    variable is set true when its positive node's component closes before its
    negation's, the usual reverse-topological choice, so the answer is fixed
    for a fixed clause order.
    """
    N = 2 * inst.num_vars
    succ: list[list[int]] = [[] for _ in range(N)]
    for a, b in inst.clauses:
        succ[_node(-a)].append(_node(b))
        succ[_node(-b)].append(_node(a))
    comp = _scc_ids(N, succ)
    out = []
    for v in range(inst.num_vars):
        t, f = comp[2 * v], comp[2 * v + 1]
        if t == f:
            return None
        out.append(t < f)
    if not inst.satisfied_by(out):
        raise AssertionError("2SAT assignment failed verification")
    return out


def brute_force_2sat(inst: TwoSatInstance) -> list[bool] | None:
    """Exhaustive oracle; first satisfying assignment in binary counting order."""
    if inst.num_vars > 24:
        raise ValueError("exhaustive 2SAT limited to 24 variables")
    n = inst.num_vars
    # variable 1 is the most significant bit, matching the counting order
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    for start in range(0, 1 << n, 1 << 16):
        idx = np.arange(start, min(start + (1 << 16), 1 << n), dtype=np.int64)
        bits = ((idx[:, None] >> shifts) & 1).astype(bool)
        ok = np.ones(len(idx), dtype=bool)
        for a, b in inst.clauses:
            va = bits[:, abs(a) - 1] if a > 0 else ~bits[:, abs(a) - 1]
            vb = bits[:, abs(b) - 1] if b > 0 else ~bits[:, abs(b) - 1]
            ok &= va | vb
        hits = np.flatnonzero(ok)
        if len(hits):
            return bits[hits[0]].tolist()
    return None


@dataclass(frozen=True)
class ListColoringProblem:
    """Free vertices of ``fixed`` each carry a list of one or two colors."""

    graph: Graph
    fixed: Coloring
    lists: dict[int, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        free = set(self.fixed.free)
        if set(self.lists) != free:
            raise ValueError("lists must be given for exactly the free vertices")
        for v, lst in self.lists.items():
            if len(lst) > 2 or len(set(lst)) != len(lst):
                raise ValueError(f"vertex {v}: list must hold at most two distinct colors")
            if not all(1 <= c <= self.fixed.k for c in lst):
                raise ValueError(f"vertex {v}: color out of range")

    @classmethod
    def from_partial(cls, G: Graph, C: Coloring) -> "ListColoringProblem":
        """Lists = colors not used by colored neighbors; needs every free vertex to see one."""
        lists = {}
        for v in C.free:
            used = {C[w] for w in G.neighbors(v)}
            lists[v] = tuple(c for c in range(1, C.k + 1) if c not in used)
        return cls(G, C, lists)


def lists_to_2sat(p: ListColoringProblem) -> tuple[TwoSatInstance, "Decoder"]:
    """One variable per list vertex: true picks the first list color, false the second.

    A one-color list is forced by the clause (x or x).  For every edge, each
    pair of choices giving both ends the same color is forbidden by a clause.
    """
    order = sorted(p.lists)
    var = {v: i + 1 for i, v in enumerate(order)}
    clauses = []
    G = p.graph

    def options(v):
        lst = p.lists[v]
        return [(lst[0], var[v])] + ([(lst[1], -var[v])] if len(lst) == 2 else [])

    for v in order:
        lst = p.lists[v]
        if not lst:
            raise EmptyList(v)
        if len(lst) == 1:
            clauses.append((var[v], var[v]))
        for w in G.neighbors(v):
            if w in var:
                if w < v:
                    continue
                for cv, lv in options(v):
                    for cw, lw in options(w):
                        if cv == cw:
                            clauses.append((-lv, -lw))
            else:
                c = p.fixed[w]
                for cv, lv in options(v):
                    if cv == c:
                        clauses.append((-lv, -lv))
    return TwoSatInstance(len(order), tuple(clauses)), Decoder(p, var)


@dataclass(frozen=True)
class Decoder:
    problem: ListColoringProblem
    var: dict[int, int]

    def __call__(self, assign: list[bool]) -> Coloring:
        col = self.problem.fixed.assign.copy()
        for v, i in self.var.items():
            lst = self.problem.lists[v]
            col[v - 1] = lst[0] if (assign[i - 1] or len(lst) == 1) else lst[1]
        return Coloring(self.problem.fixed.k, col)


def solve_list_coloring(p: ListColoringProblem) -> Coloring | None:
    """Legal completion of ``p.fixed`` from the lists, or ``None``.

    ``None`` also when the fixed part already has a monochromatic edge.
    """
    if any(not lst for lst in p.lists.values()):
        return None
    if not is_legal_coloring(p.graph, p.fixed)[0]:
        return None
    inst, decode = lists_to_2sat(p)
    sol = solve_2sat(inst)
    if sol is None:
        return None
    C = decode(sol)
    G = p.graph
    e = G.edge_array
    if len(e) and (C.assign[e[:, 0] - 1] == C.assign[e[:, 1] - 1]).any():
        raise AssertionError("decoded list coloring is not legal")
    return C


def random_instance(num_vars: int, num_clauses: int, rng) -> TwoSatInstance:
    signs = rng.choice([-1, 1], size=(num_clauses, 2))
    vars_ = rng.integers(1, num_vars + 1, size=(num_clauses, 2))
    return TwoSatInstance(num_vars, tuple(map(tuple, (signs * vars_).tolist())))
