"""Refinement, uncoloring, safe recoloring and brute-force completion."""

from __future__ import annotations

import math
from collections import deque
from typing import Callable

import numpy as np

from ..graph import Coloring, Graph
from .params import BruteForceAbort, PipelineParams


def neighbor_color_counts(G: Graph, assign: np.ndarray, k: int) -> np.ndarray:
    """``counts[v-1, c]`` = number of neighbors of v with color c (c = 0 is free)."""
    n = G.n
    rows = np.repeat(np.arange(n), G.degrees)
    flat = rows * (k + 1) + assign[G.indices]
    return np.bincount(flat, minlength=n * (k + 1)).reshape(n, k + 1)


def one_step_refine(G: Graph, C: Coloring) -> Coloring:
    """Every vertex takes its neighborhood's least frequent color, simultaneously.

    Ties go to the smallest color; isolated vertices keep their color.
    """
    if not C.is_total:
        raise ValueError("one-step refinement needs a total coloring")
    counts = neighbor_color_counts(G, C.assign, C.k)[:, 1:]
    new = counts.argmin(axis=1) + 1
    new = np.where(G.degrees == 0, C.assign, new)
    return C.with_assign(new)


def iterative_recolor(G: Graph, C: Coloring, d: float, params: PipelineParams | None = None,
                      on_round: Callable[[int, Coloring], None] | None = None) -> Coloring:
    """Repeat one-step refinement for min(ceil(beta d), cap) rounds or until fixed."""
    p = params or PipelineParams()
    rounds = max(1, min(math.ceil(p.recolor_rounds_factor * d), p.recolor_rounds_cap))
    cur = C
    for r in range(1, rounds + 1):
        nxt = one_step_refine(G, cur)
        if on_round is not None:
            on_round(r, nxt)
        if nxt == cur:
            break
        cur = nxt
    return cur


def cautious_uncolor(G: Graph, C: Coloring, d: float, params: PipelineParams | None = None,
                     order: str = "id") -> Coloring:
    """Uncolor low-degree vertices, then close under the weak-neighborhood rule.

    A vertex is uncolored when its degree is below ``(2/3 - 2 e) d``, or,
    repeatedly until nothing changes, when some other color has fewer than
    ``params.class_threshold(d)`` (``d/6`` once d >= 36) colored neighbors
    around it.  Sweeps visit vertices in id order
    (``order="reverse"`` for the opposite); the fixed point does not depend on
    the order because the rule is monotone in the uncolored set.  ``e`` is
    ``params.uncolor_eps(d)``.
    """
    p = params or PipelineParams()
    if C.k != 3:
        raise ValueError("cautious uncoloring is defined for k = 3")
    assign = C.assign.copy()
    low_degree = G.degrees < (2 / 3 - 2 * p.uncolor_eps(d)) * d
    assign[low_degree] = 0
    counts = neighbor_color_counts(G, assign, 3).tolist()
    col = assign.tolist()
    adj = [[w - 1 for w in nb] for nb in G.adjacency]
    thr = p.class_threshold(d)
    others = {1: (2, 3), 2: (1, 3), 3: (1, 2)}
    seq = range(G.n) if order == "id" else range(G.n - 1, -1, -1)
    if order not in ("id", "reverse"):
        raise ValueError("order must be 'id' or 'reverse'")
    changed = True
    while changed:
        changed = False
        for v in seq:
            c = col[v]
            if c == 0:
                continue
            row = counts[v]
            a, b = others[c]
            if row[a] < thr or row[b] < thr:
                col[v] = 0
                changed = True
                for w in adj[v]:
                    counts[w][c] -= 1
                    counts[w][0] += 1
    return Coloring(3, col)


def safe_recolor(G: Graph, C: Coloring) -> Coloring:
    """Give the third color to any free vertex whose colored neighbors show exactly two colors.

    Processed first-in first-out from the free vertices in id order; a newly
    colored vertex re-queues its free neighbors.  Colored vertices are never
    changed.
    """
    if C.k != 3:
        raise ValueError("safe recoloring is defined for k = 3")
    col = C.assign.tolist()
    adj = [[w - 1 for w in nb] for nb in G.adjacency]
    queue = deque(v for v in range(G.n) if col[v] == 0)
    queued = [c == 0 for c in col]
    while queue:
        v = queue.popleft()
        queued[v] = False
        if col[v]:
            continue
        seen = {col[w] for w in adj[v]} - {0}
        if len(seen) != 2:
            continue
        col[v] = 6 - sum(seen)
        for w in adj[v]:
            if col[w] == 0 and not queued[w]:
                queued[w] = True
                queue.append(w)
    return Coloring(3, col)


def free_components(G: Graph, C: Coloring) -> list[tuple[int, ...]]:
    """Connected components (1-based, sorted) of the subgraph induced on free vertices."""
    col = C.assign
    adj = G.adjacency
    seen = set()
    comps = []
    for s in (np.flatnonzero(col == 0) + 1).tolist():
        if s in seen:
            continue
        seen.add(s)
        comp, stack = [s], [s]
        while stack:
            x = stack.pop()
            for y in adj[x - 1]:
                if col[y - 1] == 0 and y not in seen:
                    seen.add(y)
                    comp.append(y)
                    stack.append(y)
        comps.append(tuple(sorted(comp)))
    return comps


def _complete_component(G: Graph, col: list[int], comp: tuple[int, ...], k: int) -> bool:
    adj = G.adjacency
    pos = {v: i for i, v in enumerate(comp)}
    allowed = []
    earlier = []
    for v in comp:
        fixed = {col[w - 1] for w in adj[v - 1] if w not in pos} - {0}
        allowed.append([c for c in range(1, k + 1) if c not in fixed])
        earlier.append([pos[w] for w in adj[v - 1] if w in pos and pos[w] < pos[v]])
    local = [0] * len(comp)

    def rec(i: int) -> bool:
        if i == len(comp):
            return True
        used = {local[j] for j in earlier[i]}
        for c in allowed[i]:
            if c not in used:
                local[i] = c
                if rec(i + 1):
                    return True
        local[i] = 0
        return False

    if not rec(0):
        return False
    for v, c in zip(comp, local):
        col[v - 1] = c
    return True


def brute_force_components(G: Graph, C: Coloring, params: PipelineParams | None = None) -> Coloring:
    """Complete a partial coloring by exhaustive search per free component.

    Each component gets the lexicographically first completion (vertices in id
    order, colors ascending) consistent with its colored neighbors.  Raises
    :class:`BruteForceAbort` if a component exceeds the size cap or cannot be
    completed.
    """
    p = params or PipelineParams()
    cap = p.cap_for(G.n)
    comps = free_components(G, C)
    for comp in comps:
        if len(comp) > cap:
            raise BruteForceAbort("oversize", comp)
    col = C.assign.tolist()
    for comp in comps:
        if not _complete_component(G, col, comp, C.k):
            raise BruteForceAbort("unsatisfiable", comp)
    return Coloring(C.k, col)
