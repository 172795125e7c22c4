import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from quasihyper.constructions import (
    CensusReport,
    almost_equal_parts,
    color_class_graph,
    keyed_uniform,
    derive_key,
    octahedron_parity_census,
    sample_A,
    sample_B,
    sample_D,
    witness_cd_from_A,
    witness_expand_from_B,
)
from quasihyper.hypercore import cliques
from quasihyper.measures import expansion_count
from strategies import seeds


def test_keyed_uniform_is_deterministic_and_in_range():
    key = derive_key(5, "x")
    a = keyed_uniform(key, np.arange(20000), 3)
    assert np.array_equal(a, keyed_uniform(key, np.arange(20000), 3))
    assert set(np.unique(a)) == {0, 1, 2}
    counts = np.bincount(a, minlength=3) / len(a)
    assert np.all(np.abs(counts - 1 / 3) < 0.02)
    assert not np.array_equal(a, keyed_uniform(derive_key(6, "x"), np.arange(20000), 3))


@given(seeds, st.integers(7, 9))
@settings(max_examples=15)
def test_A_edge_rule(seed, n):
    h = sample_A(n, 3, 2, 1, 2, seed)
    H = h.hypergraph
    for T in itertools.combinations(range(n), 3):
        total = sum(h.coloring(X) for X in itertools.combinations(T, 2)) % 2
        assert (T in H) == (total < 1)
    assert h.is_edge(list(reversed(T))) == (T in H)
    assert not h.is_edge([0, 0, 1])


@given(seeds)
@settings(max_examples=15)
def test_B_edge_rule(seed):
    h = sample_B(8, (2, 1), 1, 3, seed)
    c0, c1 = h.block_colorings
    for T in itertools.combinations(range(8), 3):
        assert (T in h.hypergraph) == ((c0(T[:2]) + c1(T[2:])) % 3 < 1)


@given(seeds, st.integers(3, 4))
@settings(max_examples=15)
def test_D_edge_rule(seed, k):
    h = sample_D(7, k, seed)
    for T in itertools.combinations(range(7), k):
        head = h.heads.head(T)
        assert len(head) == k - 2 and set(head) < set(T)
        y, z = sorted(set(T) - set(head))
        gy = h.G_coloring(head + (y,)) == 1
        gz = h.G_coloring(head + (z,)) == 1
        assert (T in h.hypergraph) == (gy == gz)


def test_forced_G_makes_D_complete():
    h = sample_D(6, 3, 0)
    object.__setattr__(h, "forced_G", True)
    assert h.hypergraph.edge_count == comb(6, 3)


def test_constructions_are_pure_functions_of_parameters():
    a = sample_A(20, 3, 2, 1, 2, 11).hypergraph
    assert a == sample_A(20, 3, 2, 1, 2, 11).hypergraph
    assert a != sample_A(20, 3, 2, 1, 2, 12).hypergraph
    assert sample_D(15, 3, 1).hypergraph == sample_D(15, 3, 1).hypergraph


@pytest.mark.parametrize(
    "make",
    [
        lambda: sample_A(10, 3, 3, 1, 2, 0),
        lambda: sample_A(10, 3, 1, 1, 2, 0),
        lambda: sample_A(10, 3, 2, 2, 2, 0),
        lambda: sample_B(10, (2, 1), 0, 2, 0),
        lambda: sample_D(10, 2, 0),
        lambda: sample_D(-1, 3, 0),
    ],
)
def test_bad_parameters(make):
    with pytest.raises(ValueError):
        make()


@pytest.mark.parametrize("n,t", [(10, 3), (7, 2), (2, 3)])
def test_almost_equal_parts(n, t):
    parts = almost_equal_parts(n, t)
    sizes = [len(p) for p in parts]
    assert sum(sizes) == n and max(sizes) - min(sizes) <= 1
    assert [v for p in parts for v in p] == list(range(n))


@given(seeds)
@settings(max_examples=10)
def test_cd_witness_cliques_are_edges(seed):
    h = sample_A(16, 3, 2, 1, 2, seed)
    G = witness_cd_from_A(h)
    assert all(T in h.hypergraph for T in cliques(G, 3))
    ones = color_class_graph(h, 1)
    assert len(G) + len(ones) == comb(16, 2)


@given(seeds)
@settings(max_examples=10)
def test_expand_witness_spans_no_edges(seed):
    h = sample_B(18, (2, 1), 1, 2, seed)
    S = witness_expand_from_B(h)
    assert [f.arity for f in S] == [2, 1]
    assert expansion_count(h.hypergraph, S) == 0
    assert oracles.expansion_count(oracles.edge_set(h.hypergraph), S) == 0


def test_witness_requires_matching_kind():
    with pytest.raises(ValueError):
        witness_expand_from_B(sample_D(6, 3, 0))
    with pytest.raises(ValueError):
        color_class_graph(sample_D(6, 3, 0))


@pytest.mark.parametrize(
    "make,filt",
    [
        (lambda s: sample_A(9, 3, 2, 1, 2, s), "A"),
        (lambda s: sample_B(9, (2, 1), 1, 2, s), "B"),
        (lambda s: sample_B(9, (2, 1), 1, 2, s), "B1"),
        (lambda s: sample_B(9, (2, 1), 1, 2, s), "B2"),
        (lambda s: sample_D(9, 3, s), "D"),
    ],
)
@pytest.mark.parametrize("seed", [0, 1])
def test_censuses_have_no_odd_members(make, filt, seed):
    rep = octahedron_parity_census(make(seed), case_filter=filt)
    assert isinstance(rep, CensusReport)
    assert rep.examined > 0 and rep.odd == 0 and rep.passed
    assert rep.even == rep.examined


def test_census_filters_select_expected_rows():
    # rows are x, y0, y1, z0, z1; B1 puts the z pair last, B2 the y pair
    h = sample_B(9, (2, 1), 1, 2, 0)
    from quasihyper.constructions import census_filter_mask

    rows = np.array([[0, 1, 2, 7, 8], [0, 7, 8, 1, 2], [7, 0, 8, 1, 2]])
    assert census_filter_mask(h, rows, 2, "B1").tolist() == [True, False, False]
    assert census_filter_mask(h, rows, 2, "B2").tolist() == [False, True, False]


def test_census_detects_odd_octahedra_elsewhere():
    # the unfiltered A census at level 2 is far from all-even
    h = sample_A(9, 3, 2, 1, 2, 0)
    from quasihyper.constructions import _rows_parity, _distinct_rows_exhaustive

    odd = sum(int((_rows_parity(h.hypergraph, r, 2) < 0).sum()) for r in _distinct_rows_exhaustive(9, 5))
    assert odd > 0


def test_sampled_census_is_reproducible():
    h = sample_D(20, 3, 3)
    a = octahedron_parity_census(h, mode="sampled", samples=5000, seed=1)
    b = octahedron_parity_census(h, mode="sampled", samples=5000, seed=1)
    assert a == b and a.examined == 5000 and a.odd == 0


def test_census_rejects_mismatched_filter():
    with pytest.raises(ValueError):
        octahedron_parity_census(sample_D(8, 3, 0), case_filter="A")
    with pytest.raises(ValueError):
        octahedron_parity_census(sample_A(8, 3, 2, 1, 2, 0), l=2)
