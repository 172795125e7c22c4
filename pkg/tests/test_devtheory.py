import itertools
from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from quasihyper.devtheory import (
    cauchy_step_check,
    clique_predicate,
    devtoexp_pipeline_check,
    family_predicate,
    gamma_oracle,
    nonnegativity_check,
    subdev_inequality_check,
)
from quasihyper.hypercore import Hypergraph, SubsetFamily
from quasihyper.measures import FactoredPredicate, deviation
from strategies import families, hypergraph_on


@st.composite
def factors(draw, n, k, coords):
    i = draw(st.sampled_from(coords))
    bits = draw(st.lists(st.booleans(), min_size=n ** (k - 1), max_size=n ** (k - 1)))
    return FactoredPredicate.complete_in(n, k, i, np.array(bits, dtype=bool).reshape((n,) * (k - 1)))


@st.composite
def doubled_predicates(draw, n, k, l):
    """P complete in every doubled coordinate, possibly with an all-true predicate."""
    P = FactoredPredicate.all(n, k)
    for i in range(k - l, k):
        if draw(st.booleans()):
            P = P.intersect(draw(factors(n, k, [i])))
    return P


@given(hypergraph_on(4, 3), st.integers(1, 3), st.data())
@settings(max_examples=25)
def test_gamma_oracle_equals_tuple_deviation(H, l, data):
    P = data.draw(doubled_predicates(4, 3, l))
    j = data.draw(st.integers(0, l - 1))
    squares, smallest = gamma_oracle(H, l, P, j)
    assert squares == deviation(H, l, P, semantics="tuple").value
    assert smallest >= 0


@given(hypergraph_on(5, 3), st.integers(1, 3), st.data())
def test_subdev_inequality(H, l, data):
    P = data.draw(st.one_of(st.none(), doubled_predicates(5, 3, l)))
    Q = data.draw(factors(5, 3, list(range(3 - l, 3))))
    rep = subdev_inequality_check(H, l, P, Q)
    assert rep.passed and rep.lhs <= rep.rhs


@given(hypergraph_on(5, 3), st.integers(1, 3), st.data())
def test_cauchy_step(H, l, data):
    P = data.draw(st.one_of(st.none(), doubled_predicates(5, 3, l)))
    rep = cauchy_step_check(H, l, P)
    assert rep.passed


@given(hypergraph_on(5, 3), st.integers(1, 3), st.data())
def test_nonnegativity(H, l, data):
    P = data.draw(doubled_predicates(5, 3, l))
    assert nonnegativity_check(H, l, P).passed


def test_set_form_can_break_the_cauchy_step():
    # a documented gap: the literal set form is not a sum of squares on repeated-vertex placements
    rng = np.random.default_rng(0)
    broken = 0
    for _ in range(40):
        H = Hypergraph(5, 3, rng.random(10) < 0.5)
        broken += not cauchy_step_check(H, 2, semantics="set").passed
        assert cauchy_step_check(H, 2).passed
    assert broken > 0


def test_Q_validation():
    H = Hypergraph.empty(4, 3)
    ones = np.ones((4, 4), dtype=bool)
    with pytest.raises(ValueError):
        subdev_inequality_check(H, 1, None, FactoredPredicate.complete_in(4, 3, 0, ones))
    with pytest.raises(ValueError):
        subdev_inequality_check(H, 2, None, FactoredPredicate.from_dense(np.ones((4, 4, 4), bool)))
    with pytest.raises(ValueError):
        cauchy_step_check(H, 0)
    with pytest.raises(ValueError):
        gamma_oracle(H, 1, None, 1)


@given(hypergraph_on(6, 2))
def test_clique_predicate_is_clique_tuples(G):
    P = clique_predicate(G, 3, 3)
    dense = P.to_dense()
    cl = oracles.cliques(oracles.edge_set(G), 6, 3, 2)
    for t in itertools.product(range(6), repeat=3):
        assert dense[t] == (len(set(t)) == 3 and tuple(sorted(t)) in cl)
    assert P.complete_coordinates() == {0, 1, 2}


def test_clique_predicate_uniformity():
    with pytest.raises(ValueError):
        clique_predicate(Hypergraph.empty(5, 2), 3, 2)


@given(families(2, 6))
def test_family_predicate(S):
    F = Hypergraph.from_edges(6, 2, S.members)
    P = family_predicate(6, 3, 2, [0, 1], F)
    for t in itertools.product(range(6), repeat=3):
        assert P.contains(t) == (t[0] != t[1] and tuple(sorted(t[:2])) in S.members)


@given(hypergraph_on(5, 3), families(2, 5), families(1, 5))
@settings(max_examples=40)
def test_devtoexp_pipeline(H, S1, S2):
    rep = devtoexp_pipeline_check(H, 2, 1, S1, S2)
    assert rep.identity_ok and rep.passed
    assert rep.factor == factorial(2) * factorial(1)
    assert rep.e == oracles.expansion_count(oracles.edge_set(H), [S1, S2])


def test_devtoexp_trivial_cases():
    S1 = SubsetFamily.of(2, 5, [(0, 1), (2, 3)])
    S2 = SubsetFamily.of(1, 5, [(4,)])
    full = devtoexp_pipeline_check(Hypergraph.complete(5, 3), 2, 1, S1, S2)
    assert (full.e, full.miss, full.dev0) == (2, 0, -4)
    empty = devtoexp_pipeline_check(Hypergraph.empty(5, 3), 2, 1, S1, S2)
    assert (empty.e, empty.miss, empty.dev0) == (0, 2, 4)
    none = devtoexp_pipeline_check(Hypergraph.empty(5, 3), 2, 1, SubsetFamily.of(2, 5, []), S2)
    assert none.dev0 == 0 and none.passed
    with pytest.raises(ValueError):
        devtoexp_pipeline_check(Hypergraph.empty(5, 3), 2, 2, S1, S2)
