import itertools
import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from conftest import random_4regular
from hostcolor.forge import (ForgeFail, ForgeParams, balanced_three_coloring, diamond_gadget,
                             embed_Q_via_independent_blocks, equality_fanout, find_induced_copy,
                             forge_AA, forge_k4_planting, forge_RA_adversary,
                             reduce_4regular_to_balanced, rotated_coloring, triple_copy,
                             uniqueness_check)
from hostcolor.generators import apply_planting, gen_gnp, gen_random_regular, make_instance
from hostcolor.graph import (Coloring, Graph, GuardExceeded, connected_components, count_k_colorings,
                             enumerate_k_colorings, is_legal_coloring)

OCTA = apply_planting(Graph.complete(6), Coloring(3, [1, 1, 2, 2, 3, 3]))


def all_colorings(G, k=3):
    for c in itertools.product(range(1, k + 1), repeat=G.n):
        if all(c[u - 1] != c[v - 1] for u, v in G.edges):
            yield c


# -- params ------------------------------------------------------------------

def test_forge_params():
    p = ForgeParams()
    assert p.delta0 == pytest.approx((7 + 16 * 0.01) / 15)
    assert not p.in_window()
    assert ForgeParams(delta=0.48).in_window()
    assert p.block_count(10**6) > 0
    with pytest.raises(ValueError):
        ForgeParams(delta=1.2)


# -- gadgets -------------------------------------------------------------------

def test_diamond():
    g = diamond_gadget()
    assert g.graph.n == 4 and g.graph.m == 5
    cols = list(all_colorings(g.graph))
    assert len(cols) == 6 and all(c[0] == c[1] for c in cols)
    assert count_k_colorings(g.graph, 3) == 6
    nonadj = [(u, v) for u, v in itertools.combinations(range(1, 5), 2) if not g.graph.has_edge(u, v)]
    assert nonadj == [g.ports]


def test_fanout():
    g2 = equality_fanout(2)
    assert g2.graph == diamond_gadget().graph
    g4 = equality_fanout(4)
    assert (g4.graph.n, g4.graph.m) == (10, 15)
    assert Fraction(2 * g4.graph.m, g4.graph.n) == 3
    cols = list(all_colorings(g4.graph))
    assert cols and all(len({c[p - 1] for p in g4.ports}) == 1 for c in cols)
    g7 = equality_fanout(7)
    assert g7.certified["method"] == "per-link" and (g7.graph.n, g7.graph.m) == (19, 30)
    with pytest.raises(ValueError):
        equality_fanout(1)


# -- reduction ------------------------------------------------------------------

def test_reduction_k5():
    out = reduce_4regular_to_balanced(Graph.complete(5))
    assert out.graph.n == 50 and out.graph.m == 85
    assert out.colorability == {"input_3colorable": False, "output_3colorable": False}
    assert out.average_degree == out.max_density == Fraction(17, 5)


def test_reduction_k44():
    K44 = Graph(8, [(i, j) for i in range(1, 5) for j in range(5, 9)])
    out = reduce_4regular_to_balanced(K44)
    assert out.colorability["output_3colorable"]
    assert all(len(p) == 4 for p in out.port_map.values())
    # decode a coloring built by hand: each fanout gets its vertex's color
    from hostcolor.graph import find_k_coloring
    C = find_k_coloring(out.graph, 3)
    assert is_legal_coloring(K44, out.decode(C))[0]


def test_reduction_rejects_non_regular():
    with pytest.raises(ValueError):
        reduce_4regular_to_balanced(Graph.cycle(5))


def test_reduction_random_small():
    for s in range(5):
        H4 = random_4regular(8, seed=s)
        out = reduce_4regular_to_balanced(H4)
        assert out.colorability["input_3colorable"] == (count_k_colorings(H4, 3) > 0)
        assert out.balanced


# -- triple copies -----------------------------------------------------------------

def test_triple_copy():
    T = triple_copy(Graph.complete(3))
    assert (T.n, T.m) == (9, 9)
    C = rotated_coloring(Coloring(3, [1, 2, 3]))
    assert C.class_sizes() == [3, 3, 3] and is_legal_coloring(T, C)[0]
    K44 = Graph(8, [(i, j) for i in range(1, 5) for j in range(5, 9)])
    T = triple_copy(K44)
    C = rotated_coloring(Coloring(3, [1] * 4 + [2] * 4))
    assert C.class_sizes() == [8, 8, 8] and is_legal_coloring(T, C)[0]
    assert count_k_colorings(triple_copy(Graph.complete(4)), 3) == 0


def test_balanced_three_coloring():
    assert balanced_three_coloring(OCTA.result).class_sizes() == [2, 2, 2]
    K44 = Graph(8, [(i, j) for i in range(1, 5) for j in range(5, 9)])
    assert balanced_three_coloring(K44) is None
    with pytest.raises(GuardExceeded):
        balanced_three_coloring(Graph.empty(13))


# -- A/A -------------------------------------------------------------------------------

def test_forge_AA_small():
    inst = forge_AA(OCTA.result, 150, 10, seed=2)
    cert = inst.certificate
    assert cert["H_regular"] and cert["replay_exact"] and cert["weyl_ok"] and cert["lambda_bound_ok"]
    assert inst.H.is_regular(10)
    assert apply_planting(inst.H, inst.planted).result == inst.G
    comps = connected_components(inst.G)
    assert any(set(c) == set(range(1, 7)) for c in comps)
    assert len(inst.connectors) == 6 * 6
    # connectors split by class the same way as the Q classes
    per_class = Counter(inst.planted[v] for v in inst.connectors)
    assert sorted(per_class.values()) == [12, 12, 12]


def test_forge_AA_rejects_bad_inputs():
    with pytest.raises(ValueError):
        forge_AA(Graph.cycle(6), 100, 10)
    with pytest.raises(ValueError):
        forge_AA(OCTA.result, 30, 10)
    K44 = Graph(8, [(i, j) for i in range(1, 5) for j in range(5, 9)])
    with pytest.raises(ForgeFail):
        forge_AA(K44, 200, 10)


# -- induced copies --------------------------------------------------------------------------

def test_induced_copy_examples():
    maps = {find_induced_copy(Graph.complete(3), Graph.path(2), seed=s) for s in range(60)}
    assert maps == set(itertools.permutations((1, 2, 3), 2))
    C6 = Graph.cycle(6)
    assert find_induced_copy(C6, Graph.complete(3), seed=0) is None
    maps = {find_induced_copy(Graph.path(3), Graph.path(3), seed=s) for s in range(40)}
    assert maps == {(1, 2, 3), (3, 2, 1)}
    with pytest.raises(GuardExceeded):
        find_induced_copy(Graph.complete(20), Graph.empty(13))


def test_induced_copy_is_induced():
    G = gen_gnp(60, 12, seed=3)
    Q = Graph.cycle(5)
    for s in range(10):
        m = find_induced_copy(G, Q, seed=s)
        assert m is not None and len(set(m)) == 5
        for a, b in itertools.combinations(range(1, 6), 2):
            assert Q.has_edge(a, b) == G.has_edge(m[a - 1], m[b - 1])


# -- R/A adversary -------------------------------------------------------------------------------

def test_ra_adversary_hidden_copy():
    Q = Graph.complete(3)
    rest = gen_random_regular(60, 3, seed=4)
    # attach each triangle vertex to its own outside vertices
    H = Q.disjoint_union(rest).add_edges([(1, 4), (2, 10), (3, 20)])
    for s in range(5):
        try:
            res = forge_RA_adversary(H, Q, seed=s)
        except ForgeFail as exc:
            assert exc.step in (1, 2)
            continue
        G = apply_planting(H, res.planted).result
        comps = [set(c) for c in connected_components(G)]
        assert set(res.copy) in comps
        assert sorted(res.planted.class_sizes()) == [21, 21, 21]


def test_ra_adversary_complete_host_fails_step2():
    with pytest.raises(ForgeFail) as exc:
        forge_RA_adversary(Graph.complete(12), Graph.complete(3), seed=0, chi_Q=Coloring(3, [1, 2, 3]))
    assert exc.value.step == 2


def test_ra_adversary_no_copy_fails_step1():
    with pytest.raises(ForgeFail) as exc:
        forge_RA_adversary(Graph.cycle(30), Graph.complete(3), seed=0)
    assert exc.value.step == 1


def test_ra_adversary_fail_corridor():
    # measured over seeds 0..49: 42 successes, every failure at step 2
    Q = Graph.complete(3)
    c = Counter()
    for s in range(50):
        try:
            forge_RA_adversary(gen_gnp(400, 6, seed=s), Q, seed=s)
            c["ok"] += 1
        except ForgeFail as exc:
            c[exc.step] += 1
    assert 34 <= c["ok"] <= 50
    assert set(c) <= {"ok", 1, 2}


def test_ra_adversary_guard():
    with pytest.raises(GuardExceeded):
        forge_RA_adversary(Graph.empty(401), Graph.complete(3))


# -- k = 4 planting ----------------------------------------------------------------------------------

def _k4_host():
    # triangle 1,2,3 whose only outside neighbor is 4; the other vertices form a path
    return Graph(8, [(1, 2), (2, 3), (1, 3), (1, 4), (2, 4), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8)])


def test_k4_planting_success_and_exhaustive():
    H = _k4_host()
    res = forge_k4_planting(H, Graph.complete(3), seed=1)
    P = res.planted
    assert P.k == 4 and P.class_sizes() == [2, 2, 2, 2]
    assert {P[v] for v in res.copy} == {1, 2, 3}
    outside = set().union(*(set(H.neighbors(v)) for v in res.copy)) - set(res.copy)
    assert outside and all(P[w] == 4 for w in outside)
    G = apply_planting(H, P).result
    seen = 0
    for c in enumerate_k_colorings(G, 4):
        seen += 1
        assert len({c[v - 1] for v in res.copy}) <= 3
    assert seen > 0


def test_k4_fail_s1():
    H = Graph.complete(3).disjoint_union(Graph.path(9))
    with pytest.raises(ForgeFail) as exc:
        forge_k4_planting(H, Graph.complete(3), seed=0)
    assert exc.value.step == "S1"


def test_k4_fail_s2():
    H = Graph(12, [(1, 2), (2, 3), (1, 3), (1, 4), (1, 5), (2, 6), (2, 7), (3, 8)])
    with pytest.raises(ForgeFail) as exc:
        forge_k4_planting(H, Graph.complete(3), seed=0)
    assert exc.value.step == "S2"


# -- independent-block embedding -------------------------------------------------------------------------

def test_embed_block_size_one():
    # with block size 1 the copy is exact iff the planting equals chi on the blocks
    Q = Graph.complete(3)
    chi = Coloring(3, [1, 2, 3])
    wins = []
    for perm in itertools.permutations((1, 2, 3)):
        try:
            res = embed_Q_via_independent_blocks(Q, Graph.empty(3), 1, seed=0, chi_Q=chi,
                                                 plant=Coloring(3, perm))
        except ForgeFail as exc:
            assert exc.step == "no-faithful"
            continue
        wins.append(perm)
        assert res.copy == tuple(b[0] for b in res.blocks)
        assert res.instance.result == res.host
    assert len(wins) == 1


def test_embed_triangle_rate():
    Q = Graph.complete(3)
    ok = 0
    for s in range(10):
        Hp = gen_random_regular(300, 10, seed=s)
        try:
            res = embed_Q_via_independent_blocks(Q, Hp, 12, seed=s)
        except ForgeFail:
            continue
        G = res.instance.result
        for a, b in itertools.combinations(range(1, 4), 2):
            assert G.has_edge(res.copy[a - 1], res.copy[b - 1])
        ok += 1
    assert ok >= 9


def test_embed_no_independent_set():
    with pytest.raises(ForgeFail) as exc:
        embed_Q_via_independent_blocks(Graph.complete(3), Graph.complete(10), 2, seed=0)
    assert exc.value.step == "independent-set"


# -- uniqueness -----------------------------------------------------------------------------------------

def test_uniqueness_examples():
    r = uniqueness_check(OCTA)
    assert r.count == 6 and r.unique
    r = uniqueness_check(apply_planting(Graph.empty(3), Coloring(3, [1, 2, 3])))
    assert r.count == 27 and not r.unique


def test_uniqueness_dense_regular():
    good = sum(uniqueness_check(make_instance("RR", n=24, k=3, d=16, seed=s, host_kind="regular")).unique
               for s in range(5))
    assert good >= 4
