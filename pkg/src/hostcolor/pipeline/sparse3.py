"""3-coloring graphs with no subgraph of average degree above 3."""

from __future__ import annotations

import heapq
from collections import deque

from ..graph import Coloring, Graph, connected_components, find_k_coloring, induced_subgraph


class NotThreeColorable(ValueError):
    def __init__(self, component: tuple[int, ...]):
        super().__init__(f"core component {component} is K4")
        self.component = component


def _peel(G: Graph) -> tuple[list[int], set[int]]:
    """Remove vertices of current degree < 3, smallest degree first."""
    adj = G.neighbor_sets()
    deg = [len(a) for a in adj]
    alive = set(range(1, G.n + 1))
    heap = [(deg[v - 1], v) for v in alive]
    heapq.heapify(heap)
    order = []
    while heap:
        dv, v = heapq.heappop(heap)
        if v not in alive or dv != deg[v - 1]:
            continue
        if dv >= 3:
            break
        alive.discard(v)
        order.append(v)
        for w in adj[v - 1]:
            if w in alive:
                deg[w - 1] -= 1
                heapq.heappush(heap, (deg[w - 1], w))
    return order, alive


def _connected_without(adj: list[set[int]], verts: set[int], removed: set[int]) -> bool:
    rest = verts - removed
    if not rest:
        return True
    start = min(rest)
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y in rest and y not in seen:
                seen.add(y)
                queue.append(y)
    return len(seen) == len(rest)


def _brooks_cubic(adj: list[set[int]], verts: set[int]) -> dict[int, int] | None:
    """Lovasz's ordering: find v with nonadjacent neighbors u, w such that
    removing u, w leaves the component connected; color u, w alike, then the
    rest greedily from the leaves of a BFS tree towards v."""
    for v in sorted(verts):
        nb = sorted(adj[v])
        for i, u in enumerate(nb):
            for w in nb[i + 1:]:
                if w in adj[u] or not _connected_without(adj, verts, {u, w}):
                    continue
                dist = {v: 0}
                order = [v]
                queue = deque([v])
                while queue:
                    x = queue.popleft()
                    for y in sorted(adj[x]):
                        if y in verts and y not in dist and y not in (u, w):
                            dist[y] = dist[x] + 1
                            order.append(y)
                            queue.append(y)
                col = {u: 1, w: 1}
                for x in reversed(order):
                    used = {col[y] for y in adj[x] if y in col}
                    c = min(set((1, 2, 3)) - used)
                    col[x] = c
                return col
    return None


def sparse_3_color(G: Graph) -> Coloring:
    """Peel vertices of degree below 3, color the cubic core by Brooks, unwind greedily.

    Raises :class:`NotThreeColorable` exactly when a core component is K4.
    Assumes the sparsity precondition; a core vertex of degree above 3 is a
    ``ValueError``.
    """
    order, core = _peel(G)
    adj = G.neighbor_sets()
    col = [0] * G.n
    if core:
        sub, vmap = induced_subgraph(G, sorted(core))
        if sub.degrees.max() > 3:
            raise ValueError("graph has a subgraph of average degree above 3")
        for comp in connected_components(sub):
            verts = {vmap[i - 1] for i in comp}
            if len(verts) == 4 and all(len(adj[v - 1] & verts) == 3 for v in verts):
                raise NotThreeColorable(tuple(sorted(verts)))
            local = [set(w for w in adj[v - 1] if w in verts) for v in range(1, G.n + 1)]
            lookup = {v: local[v - 1] for v in verts}
            got = _brooks_cubic(lookup, verts)
            if got is None:
                # no suitable triple: fall back to exact search on this piece
                piece, pmap = induced_subgraph(G, sorted(verts))
                found = find_k_coloring(piece, 3)
                got = {pmap[i]: c for i, c in enumerate(found.assign.tolist())}
            for v, c in got.items():
                col[v - 1] = c
    for v in reversed(order):
        used = {col[w - 1] for w in adj[v - 1]}
        col[v - 1] = min(set((1, 2, 3)) - used)
    return Coloring(3, col)
