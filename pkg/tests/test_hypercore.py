import itertools
from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from quasihyper.hypercore import (
    Hypergraph,
    RationalDensity,
    SubsetFamily,
    all_ksubsets,
    cliques,
    dumps,
    dumps_families,
    edge_counts_in_ksets,
    enumerate_ksubsets,
    induced_count_in_kset,
    induced_edge_count,
    loads,
    loads_families,
    rank,
    rank_array,
    read_hypergraph,
    sorted_distinct,
    unrank,
    write_hypergraph,
)
from strategies import families, hypergraph_on, hypergraphs


@pytest.mark.parametrize("n,r", [(0, 0), (4, 0), (5, 1), (6, 3), (7, 4), (3, 5)])
def test_enumeration_is_colex(n, r):
    assert list(enumerate_ksubsets(n, r)) == oracles.colex_order(n, r)


@pytest.mark.parametrize("n,r", [(6, 2), (8, 3), (7, 7)])
def test_ranks_follow_enumeration(n, r):
    for i, s in enumerate(enumerate_ksubsets(n, r)):
        assert rank(s) == i
        assert unrank(i, r) == s
    arr = all_ksubsets(n, r)
    assert arr.shape == (comb(n, r), r)
    assert np.array_equal(rank_array(arr, n), np.arange(comb(n, r)))


def test_small_ranks():
    assert rank((0, 1, 2)) == 0
    assert rank((0, 1, 3)) == 1
    assert rank((2, 3, 4)) == comb(5, 3) - 1
    assert rank([4, 2, 3]) == rank((2, 3, 4))


@given(st.integers(0, 5000), st.integers(1, 6))
def test_unrank_rank_roundtrip(r, arity):
    assert rank(unrank(r, arity)) == r


def test_negative_rank_rejected():
    with pytest.raises(ValueError):
        unrank(-1, 2)


def test_sorted_distinct():
    s, d = sorted_distinct(np.array([[3, 1, 2], [1, 1, 2], [0, 5, 4]]))
    assert s.tolist() == [[1, 2, 3], [1, 1, 2], [0, 4, 5]]
    assert d.tolist() == [True, False, True]


def test_density_parsing():
    p = RationalDensity.parse("3/10")
    assert (p.a, p.b) == (3, 10) and p.value == Fraction(3, 10) and str(p) == "3/10"
    assert RationalDensity.parse("2/4") == RationalDensity(1, 2)
    for bad in [(0, 1), (1, 1), (3, 2), (2, 4)]:
        with pytest.raises(ValueError):
            RationalDensity(*bad)


def test_hypergraph_basics():
    H = Hypergraph.from_edges(5, 3, [(0, 1, 2), (4, 3, 1)])
    assert len(H) == 2 and H.edge_count == 2
    assert (1, 3, 4) in H and (0, 1, 3) not in H and (0, 0, 1) not in H
    assert H.has_edge([2, 1, 0])
    assert list(H.edges()) == [(0, 1, 2), (1, 3, 4)]
    assert H.density() == pytest.approx(2 / 10)
    assert Hypergraph.complete(5, 3).complement() == Hypergraph.empty(5, 3)


def test_mask_is_read_only():
    H = Hypergraph.empty(4, 2)
    with pytest.raises(ValueError):
        H.mask[0] = True


@pytest.mark.parametrize(
    "edges",
    [[(0, 1)], [(0, 1, 1)], [(0, 1, 9)]],
)
def test_bad_edges_rejected(edges):
    with pytest.raises(ValueError):
        Hypergraph.from_edges(5, 3, edges)


def test_wrong_mask_length():
    with pytest.raises(ValueError):
        Hypergraph(5, 3, np.zeros(9, bool))


def test_mask_guard():
    with pytest.raises(MemoryError):
        Hypergraph(10**4, 4, np.zeros(1, bool))


@given(hypergraphs())
def test_text_roundtrip(H):
    assert loads(dumps(H)) == H


def test_file_roundtrip(tmp_path):
    H = Hypergraph.from_edges(6, 3, [(0, 2, 5), (1, 2, 3)])
    write_hypergraph(H, tmp_path / "h.txt")
    assert (tmp_path / "h.txt").read_text() == "3 6 2\n0 2 5\n1 2 3\n"
    assert read_hypergraph(tmp_path / "h.txt") == H


def test_header_mismatch():
    with pytest.raises(ValueError):
        loads("3 5 2\n0 1 2\n")
    with pytest.raises(ValueError):
        loads("")


@given(families(2, 6), families(1, 6))
def test_family_roundtrip(a, b):
    assert loads_families(dumps_families([a, b])) == [a, b]


def test_family_validation():
    with pytest.raises(ValueError):
        SubsetFamily.of(2, 4, [(0, 1, 2)])
    with pytest.raises(ValueError):
        SubsetFamily.of(2, 4, [(0, 7)])
    f = SubsetFamily.of(2, 6, [(0, 1), (2, 5), (3, 4)])
    assert f.support == {0, 1, 2, 3, 4, 5}
    assert f.restricted_to(range(3)).members == {(0, 1)}


@given(hypergraphs(n=(0, 7), k=(1, 3)), st.data())
def test_induced_edge_count_matches_loop(H, data):
    U = data.draw(st.sets(st.integers(0, max(0, H.n - 1)), max_size=H.n)) if H.n else set()
    E = oracles.edge_set(H)
    want = sum(1 for T in itertools.combinations(sorted(U), H.k) if T in E)
    assert induced_edge_count(H, U) == want
    assert len(H.induced(U)) == want


@given(hypergraph_on(6, 2), st.integers(2, 5))
def test_cliques_match_loop(G, k):
    assert cliques(G, k) == oracles.cliques(oracles.edge_set(G), 6, k, 2)


@given(hypergraph_on(6, 2), st.integers(2, 5))
def test_full_induced_count_characterises_cliques(G, k):
    T = all_ksubsets(6, k)
    full = sum(1 for row in T if induced_count_in_kset(G, row) == comb(k, 2))
    assert full == len(cliques(G, k))
    assert np.array_equal(edge_counts_in_ksets(G, T), [induced_count_in_kset(G, row) for row in T])


def test_clique_size_below_uniformity():
    with pytest.raises(ValueError):
        cliques(Hypergraph.empty(5, 3), 2)


@given(hypergraphs())
def test_complement_is_involution(H):
    assert H.complement().complement() == H
    assert len(H) + len(H.complement()) == comb(H.n, H.k)
