import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hostcolor.graph import (CapExceeded, Coloring, Graph, GuardExceeded, connected_components,
                             count_k_colorings, edges_between, enumerate_k_colorings, find_k_coloring,
                             induced_subgraph, is_balanced, is_legal_coloring, max_density_subgraph,
                             sparsity)


@st.composite
def graphs(draw, max_n=9):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph(n, [p for p, k in zip(pairs, keep) if k])


def brute_count(G, k):
    return sum(1 for c in itertools.product(range(1, k + 1), repeat=G.n)
               if all(c[u - 1] != c[v - 1] for u, v in G.edges))


def brute_densest(G):
    best = Fraction(-1)
    for r in range(1, G.n + 1):
        for S in itertools.combinations(range(1, G.n + 1), r):
            best = max(best, Fraction(edges_between(G, S, S), len(S)))
    return best


# -- construction ---------------------------------------------------------

def test_graph_rejects_loops_duplicates_and_range():
    with pytest.raises(ValueError):
        Graph(3, [(1, 1)])
    with pytest.raises(ValueError):
        Graph(3, [(1, 2), (2, 1)])
    with pytest.raises(ValueError):
        Graph(3, [(1, 4)])


def test_adjacency_symmetric_and_degrees():
    G = Graph(4, [(1, 2), (2, 3), (2, 4)])
    assert G.adjacency == ((2,), (1, 3, 4), (2,), (2,))
    assert G.degrees.tolist() == [1, 3, 1, 1]
    for v in range(1, 5):
        for w in G.neighbors(v):
            assert v in G.neighbors(w)


def test_coloring_basics():
    C = Coloring(3, [1, 0, 2, 2])
    assert not C.is_total
    assert C.free == (2,)
    assert sum(C.class_sizes()) == C.num_colored == 3
    assert Coloring(2, [1, 1, 2, 2]).same_partition(Coloring(2, [2, 2, 1, 1]))


# -- worked examples ------------------------------------------------------

def test_edges_between_examples():
    K3 = Graph.complete(3)
    assert edges_between(K3, {1}, {2, 3}) == 2
    assert edges_between(K3, {1, 2, 3}, {1, 2, 3}) == 6
    assert edges_between(Graph.path(3), {1, 3}, {2}) == 2
    with pytest.raises(ValueError):
        edges_between(K3, {4}, {1})


def test_sparsity_examples():
    assert sparsity(Graph.complete(4), {1}, 3) == Fraction(4, 3)
    G = Graph.complete(3).disjoint_union(Graph.complete(3))
    assert sparsity(G, {1, 2, 3}, 2) == 0
    assert sparsity(Graph.cycle(4), {1, 2}, 2) == 1
    with pytest.raises(ValueError):
        sparsity(G, set(), 2)
    with pytest.raises(ValueError):
        sparsity(G, range(1, 7), 2)


def test_components_examples():
    assert connected_components(Graph.empty(3)) == [(1,), (2,), (3,)]
    assert connected_components(Graph.complete(3).disjoint_union(Graph.complete(2))) == [(1, 2, 3), (4, 5)]
    assert connected_components(Graph.empty(1)) == [(1,)]


def test_induced_examples():
    H, vmap = induced_subgraph(Graph.complete(4), {1, 2, 3})
    assert H == Graph.complete(3) and vmap == (1, 2, 3)
    assert induced_subgraph(Graph.complete(4), set())[0].n == 0
    H, vmap = induced_subgraph(Graph.cycle(5), {2, 3})
    assert H.edges == [(1, 2)] and vmap == (2, 3)


def test_legal_coloring_examples():
    K3 = Graph.complete(3)
    assert is_legal_coloring(K3, Coloring(3, [1, 2, 3])) == (True, [])
    assert is_legal_coloring(K3, Coloring(3, [1, 1, 2])) == (False, [(1, 2)])
    assert is_legal_coloring(Graph.path(2), Coloring(3, [1, 0]))[0]
    with pytest.raises(ValueError):
        is_legal_coloring(K3, Coloring(3, [1, 2]))


def test_count_examples_and_guards():
    assert count_k_colorings(Graph.complete(3), 3) == 6
    assert count_k_colorings(Graph.complete(4), 3) == 0
    assert count_k_colorings(Graph.path(2), 3) == 6
    with pytest.raises(CapExceeded):
        count_k_colorings(Graph.empty(10), 3, cap=1000)
    with pytest.raises(GuardExceeded):
        count_k_colorings(Graph.empty(40), 3)


def test_densest_examples():
    S, dens = max_density_subgraph(Graph.complete(4))
    assert S == (1, 2, 3, 4) and dens == 3
    G = Graph(5, Graph.complete(4).edges + [(4, 5)])
    S, dens = max_density_subgraph(G)
    assert S == (1, 2, 3, 4) and dens == 3 and Fraction(2 * G.m, G.n) == Fraction(14, 5)
    assert not is_balanced(G)
    S, dens = max_density_subgraph(Graph.path(2))
    assert dens == 1
    # a tree is its own densest subgraph: 2(n-1)/n
    S, dens = max_density_subgraph(Graph.path(5))
    assert S == (1, 2, 3, 4, 5) and dens == Fraction(8, 5)


# -- oracles and properties ---------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(graphs(max_n=7), st.integers(2, 3))
def test_count_matches_brute_force(G, k):
    assert count_k_colorings(G, k) == brute_count(G, k)
    assert sum(1 for _ in enumerate_k_colorings(G, k)) == brute_count(G, k)


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=8), st.randoms(use_true_random=False))
def test_count_invariant_under_relabeling(G, rnd):
    perm = list(range(1, G.n + 1))
    rnd.shuffle(perm)
    assert count_k_colorings(G.relabel(perm), 3) == count_k_colorings(G, 3)


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=9))
def test_find_coloring_agrees_with_count(G):
    C = find_k_coloring(G, 3)
    assert (C is None) == (count_k_colorings(G, 3) == 0)
    if C is not None:
        assert C.is_total and is_legal_coloring(G, C)[0]


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=9))
def test_components_partition(G):
    comps = connected_components(G)
    seen = [v for c in comps for v in c]
    assert sorted(seen) == list(range(1, G.n + 1))
    which = {v: i for i, c in enumerate(comps) for v in c}
    assert all(which[u] == which[v] for u, v in G.edges)


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=9), st.data())
def test_edges_between_self_is_twice_induced(G, data):
    S = data.draw(st.sets(st.integers(1, G.n)))
    H, _ = induced_subgraph(G, S)
    assert edges_between(G, S, S) == 2 * H.m


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=9))
def test_densest_routes_agree(G):
    S1, d1 = max_density_subgraph(G, method="exhaustive")
    S2, d2 = max_density_subgraph(G, method="flow")
    assert d1 == d2 == brute_densest(G)
    assert S1 == S2
    assert d1 >= Fraction(2 * G.m, G.n)
    assert is_balanced(G) == (d1 == Fraction(2 * G.m, G.n))


def test_densest_flow_on_larger_graph():
    rng = np.random.default_rng(3)
    pairs = [(u, v) for u in range(1, 31) for v in range(u + 1, 31) if rng.random() < 0.2]
    G = Graph(35, pairs + [(u, v) for u in range(31, 36) for v in range(u + 1, 36)])
    S, dens = max_density_subgraph(G)
    assert Fraction(edges_between(G, S, S), len(S)) == dens
    assert dens >= 4
