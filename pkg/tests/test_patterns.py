from math import perm

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from quasihyper.hypercore import Hypergraph
from quasihyper.measures import EnumerationTooLarge, MeasureConfig
from quasihyper.partitions import Partition
from quasihyper.patterns import (
    PatternHypergraph,
    PiLinearCertificate,
    build_cycle,
    count_labeled,
    pi_linear_certificate,
    verify_certificate,
)
from strategies import hypergraph_on


@st.composite
def patterns(draw, v=6, k=3, max_edges=4):
    import itertools

    pool = list(itertools.combinations(range(v), k))
    edges = draw(st.lists(st.sampled_from(pool), unique=True, min_size=1, max_size=max_edges))
    return PatternHypergraph(v, k, tuple(edges))


def test_cycle_shape():
    C = build_cycle(2, 1)
    assert C.v == 6 and C.k == 3 and C.m == 4
    assert set(C.edges) == {(0, 1, 4), (0, 1, 5), (2, 3, 4), (2, 3, 5)}
    assert C.groups["Y2"] == (5,)


@pytest.mark.parametrize("k1,k2", [(2, 1), (1, 2), (2, 2), (3, 1)])
def test_cycle_is_pi_linear(k1, k2):
    C = build_cycle(k1, k2)
    cert = pi_linear_certificate(C, Partition.of(k1, k2))
    assert cert is not None and verify_certificate(C, cert)


def test_cycle_not_linear_for_finer_partition():
    # the last edge shares X with one edge and Y with another
    assert pi_linear_certificate(build_cycle(2, 1), Partition.of(1, 1, 1)) is None


@given(patterns(), st.sampled_from([(2, 1), (1, 1, 1)]))
@settings(max_examples=80)
def test_certificate_search_matches_brute_force(F, parts):
    cert = pi_linear_certificate(F, Partition(parts))
    assert (cert is not None) == oracles.is_pi_linear(F.edges, parts)
    if cert is not None:
        assert verify_certificate(F, cert)


@given(patterns(v=7, k=4, max_edges=4), st.sampled_from([(2, 2), (3, 1), (2, 1, 1)]))
@settings(max_examples=40)
def test_certificate_search_k4(F, parts):
    cert = pi_linear_certificate(F, Partition(parts))
    assert (cert is not None) == oracles.is_pi_linear(F.edges, parts)


def test_verify_rejects_tampered_certificate():
    C = build_cycle(2, 1)
    cert = pi_linear_certificate(C, Partition.of(2, 1))
    bad = PiLinearCertificate(cert.pi, cert.order, cert.parts[:-1] + (tuple(reversed(cert.parts[-1])),))
    assert not verify_certificate(C, bad)
    assert '"pi": [2, 1]' in cert.dumps()


def test_pattern_validation():
    with pytest.raises(ValueError):
        PatternHypergraph(4, 3, ((0, 1, 1),))
    with pytest.raises(ValueError):
        PatternHypergraph(4, 3, ((0, 1, 5),))
    with pytest.raises(ValueError):
        PatternHypergraph(4, 3, ((0, 1, 2), (2, 1, 0)))
    with pytest.raises(ValueError):
        pi_linear_certificate(build_cycle(2, 1), Partition.of(2, 2))


@given(hypergraph_on(7, 3), patterns(v=5, k=3, max_edges=3))
@settings(max_examples=40)
def test_count_matches_oracle(H, F):
    want = oracles.count_labeled(F.edges, F.v, oracles.edge_set(H), H.n)
    assert count_labeled(F, H).value == want


def test_cycle_count_matches_oracle():
    rng = np.random.default_rng(0)
    H = Hypergraph(8, 3, rng.random(56) < 0.5)
    C = build_cycle(2, 1)
    assert count_labeled(C, H).value == oracles.count_labeled(C.edges, C.v, oracles.edge_set(H), 8)


def test_complete_host_counts_all_injections():
    H = Hypergraph.complete(9, 3)
    assert count_labeled(build_cycle(2, 1), H).value == perm(9, 6)
    est = count_labeled(build_cycle(2, 1), H, MeasureConfig(mode="sampled", sample_count=1000))
    assert est.value == perm(9, 6) and est.standard_error == 0


def test_sampled_count_close_to_exact():
    rng = np.random.default_rng(4)
    H = Hypergraph(10, 3, rng.random(120) < 0.6)
    C = build_cycle(2, 1)
    exact = count_labeled(C, H).value
    est = count_labeled(C, H, MeasureConfig(mode="sampled", sample_count=200_000, seed=1))
    assert abs(est.value - exact) < 5 * est.standard_error
    assert est.samples == 200_000


def test_count_guards():
    with pytest.raises(EnumerationTooLarge):
        count_labeled(build_cycle(2, 1), Hypergraph.empty(40, 3), MeasureConfig(exact_threshold=10**6))
    with pytest.raises(ValueError):
        count_labeled(build_cycle(1, 1), Hypergraph.empty(5, 3))
    assert count_labeled(build_cycle(2, 1), Hypergraph.empty(5, 3)).value == 0
