import itertools
from math import comb, factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from quasihyper.cdells import (
    VertexKPartition,
    augment_F,
    base_case_identity,
    cliques_of_type,
    complement_threshold_check,
    ie_counts,
    overcount_identity_check,
    pattern_sums,
    restrict,
    transfer_check,
    transversal_counts,
)
from quasihyper.hypercore import Hypergraph, SubsetFamily
from strategies import families, hypergraph_on

PATTERNS = list(itertools.combinations(range(3), 2))


@st.composite
def vertex_partitions(draw, n, k=3):
    # force every part nonempty by pinning the first k vertices of a random order
    order = draw(st.permutations(range(n)))
    labels = [0] * n
    for i in range(k):
        labels[order[i]] = i
    for v in order[k:]:
        labels[v] = draw(st.integers(0, k - 1))
    return VertexKPartition(tuple(labels), k)


def _loop_W(G, P, s, H, k=3):
    """Transversal k-sets with exactly s induced G-edges, and those that are H-edges."""
    EG, EH = oracles.edge_set(G), oracles.edge_set(H)
    w = wh = 0
    for T in itertools.combinations(range(G.n), k):
        if {P.labels[v] for v in T} != set(range(P.k)):
            continue
        if sum(1 for X in itertools.combinations(T, G.k) if X in EG) == s:
            w += 1
            wh += T in EH
    return w, wh


def test_partition_validation():
    P = VertexKPartition.from_parts([[0, 3], [1], [2, 4]])
    assert P.labels == (0, 1, 2, 0, 2) and P.n == 5
    assert P.pattern([0, 4]) == frozenset({0, 2})
    assert P.parts() == [(0, 3), (1,), (2, 4)]
    with pytest.raises(ValueError):
        VertexKPartition((0, 0, 1), 3)
    with pytest.raises(ValueError):
        VertexKPartition.from_parts([[0], [0, 1]])


@given(hypergraph_on(6, 2), hypergraph_on(6, 3), vertex_partitions(6), st.integers(1, 3))
def test_transversal_counts_match_loops(G, H, P, s):
    assert transversal_counts(G, P, s, H=H) == _loop_W(G, P, s, H)


@given(hypergraph_on(6, 2), vertex_partitions(6), st.sets(st.sampled_from(PATTERNS)))
def test_restrict_keeps_only_listed_patterns(G, P, R):
    GR = restrict(G, P, R)
    for X in itertools.combinations(range(6), 2):
        assert (X in GR) == (X in G and P.pattern(X) in {frozenset(r) for r in R})


@given(hypergraph_on(6, 2), vertex_partitions(6), st.sampled_from(PATTERNS))
def test_augment_adds_full_pattern_class(G, P, I):
    F = augment_F(G, P, I)
    for X in itertools.combinations(range(6), 2):
        assert (X in F) == (X in G or P.pattern(X) == frozenset(I))


@given(hypergraph_on(6, 2), hypergraph_on(6, 3), vertex_partitions(6), st.integers(1, 3))
def test_ie_counts_match_loops_and_invert(F, H, P, t):
    ie = ie_counts(F, P, H, t)
    assert ie.mobius_ok()
    EF, EH = oracles.edge_set(F), oracles.edge_set(H)
    for A in range(8):
        parts = {i for i in range(3) if A >> i & 1}
        f = g = 0
        for T in itertools.combinations(range(6), 3):
            if sum(1 for X in itertools.combinations(T, 2) if X in EF) < t:
                continue
            met = {P.labels[v] for v in T}
            f += met == parts
            g += met <= parts
        assert (ie.f_K[A], ie.g_K[A]) == (f, g)


@given(hypergraph_on(6, 2), hypergraph_on(6, 3), vertex_partitions(6), st.data())
def test_transfer(G, H, P, data):
    s = data.draw(st.integers(1, 2))
    R = data.draw(st.lists(st.sampled_from(PATTERNS), min_size=s, max_size=s, unique=True))
    I = data.draw(st.sampled_from([p for p in PATTERNS if p not in R]))
    rep = transfer_check(G, H, P, R, I)
    assert rep.passed
    assert rep.W_G == _loop_W(restrict(G, P, R), P, s, H)


def test_transfer_rejects_I_in_R():
    G, H = Hypergraph.empty(4, 2), Hypergraph.empty(4, 3)
    P = VertexKPartition((0, 1, 2, 0), 3)
    with pytest.raises(ValueError):
        transfer_check(G, H, P, [(0, 1)], (0, 1))


def _loop_pattern_sum(G, H, s, k=3):
    """Sum over every ordered k-partition and every s-set of patterns of |W(G_{P,R},P,s)|."""
    tot = tot_H = 0
    for labels in itertools.product(range(k), repeat=G.n):
        if set(labels) != set(range(k)):
            continue
        P = VertexKPartition(labels, k)
        for R in itertools.combinations(PATTERNS, s):
            w, wh = _loop_W(restrict(G, P, R), P, s, H)
            tot += w
            tot_H += wh
    return tot, tot_H


@given(hypergraph_on(5, 2), hypergraph_on(5, 3), st.integers(1, 3))
@settings(max_examples=15)
def test_pattern_sums_match_loops(G, H, s):
    sums, sums_H, parts = pattern_sums(G, 3, H, [s])
    assert (sums[s], sums_H[s]) == _loop_pattern_sum(G, H, s)
    assert parts == 150  # 3! S(5,3)


@given(hypergraph_on(6, 2), hypergraph_on(6, 3), st.integers(1, 3))
@settings(max_examples=25)
def test_overcount_moment_and_inversion(G, H, s):
    rep = overcount_identity_check(G, s, 3, H)
    assert rep.norm == factorial(3) * 3 ** 3
    assert rep.moment_ok and rep.inversion_ok


def test_literal_overcount_counts_heavy_sets_repeatedly():
    # a triangle: the one triple has 3 edges, so at s = 1 it is counted C(3,1) = 3 times
    G = Hypergraph.from_edges(4, 2, [(0, 1), (0, 2), (1, 2)])
    rep = overcount_identity_check(G, 1, 3)
    assert rep.exact_count == 3 and rep.binomial_moment == 3 + 3
    assert rep.sum_W == rep.norm * rep.binomial_moment
    assert not rep.literal_ok
    # with no triple above the threshold the literal form holds
    assert overcount_identity_check(G, 3, 3).literal_ok


@given(hypergraph_on(7, 2), hypergraph_on(7, 3), st.integers(1, 3))
def test_complement_identity(G, H, s):
    rep = complement_threshold_check(G, H, s)
    assert rep.passed and rep.total == comb(7, 3)


def test_complement_clique_case():
    G = Hypergraph.complete(5, 2)
    rep = complement_threshold_check(G, Hypergraph.complete(5, 3), 1)
    assert rep.A == 0 and rep.B == comb(5, 3) and rep.B_H == rep.edges_H


@given(families(2, 7, range(4)), families(2, 7, range(4, 7)))
def test_base_case(S1, S2):
    for i, k in [(0, 3), (1, 3), (0, 2), (0, 4)]:
        lhs, rhs = base_case_identity([S1, S2], i, k)
        assert lhs == rhs


def test_cliques_of_type_mixed():
    S1 = SubsetFamily.of(2, 6, [(0, 1), (0, 2)])
    S2 = SubsetFamily.of(1, 6, [(3,), (4,)])
    assert cliques_of_type([S1, S2], [2, 1]) == {(0, 1, 3), (0, 1, 4), (0, 2, 3), (0, 2, 4)}
    with pytest.raises(ValueError):
        cliques_of_type([S1, SubsetFamily.of(1, 6, [(0,)])], [2, 1])
