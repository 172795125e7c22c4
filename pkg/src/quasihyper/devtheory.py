"""Exact deviation inequalities: restriction monotonicity, the Cauchy step, and the
dev_0 -> expansion bridge, with loop-level oracles for cross-checking.

The inequalities are exact for the tuple form of the deviation, which is the default here. Every
check takes ``semantics='set'`` as well; for that form they hold only up to the contribution of
placements with a repeated vertex.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import factorial
from typing import Sequence

import numpy as np

from .hypercore import Hypergraph, SubsetFamily, rank_array, sorted_distinct
from .measures import FactoredPredicate, MeasureConfig, deviation, expansion_count

EXACT = MeasureConfig(exact_threshold=2**40)


@dataclass(frozen=True)
class InequalityReport:
    name: str
    lhs: int
    rhs: int
    passed: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _dev(H, l, P, cfg, semantics="tuple"):
    return int(deviation(H, l, P, cfg, semantics).value)


def subdev_inequality_check(
    H: Hypergraph,
    l: int,
    P: FactoredPredicate | None,
    Q: FactoredPredicate,
    cfg: MeasureConfig = EXACT,
    semantics: str = "tuple",
) -> InequalityReport:
    """dev_{l, P & Q} <= dev_{l, P} when Q is complete in one of the last l coordinates (0-based)."""
    k, n = H.k, H.n
    if Q.general is not None or len(Q.factors) != 1:
        raise ValueError("Q must be a single coordinate-complete factor")
    i = Q.factors[0][0]
    if not k - l <= i <= k - 1:
        raise ValueError(f"Q must be complete in a doubled coordinate, i in [{k - l}, {k - 1}]")
    P = P if P is not None else FactoredPredicate.all(n, k)
    lhs = _dev(H, l, P.intersect(Q), cfg, semantics)
    rhs = _dev(H, l, P, cfg, semantics)
    return InequalityReport("subdev", lhs, rhs, lhs <= rhs)


def cauchy_step_check(
    H: Hypergraph, l: int, P: FactoredPredicate | None = None, cfg: MeasureConfig = EXACT, semantics: str = "tuple"
) -> InequalityReport:
    """(dev_{l-1,P})^2 <= n^(k+l-2) dev_{l,P}."""
    k, n = H.k, H.n
    if not 1 <= l <= k:
        raise ValueError(f"l must lie in [1, {k}]")
    lower = _dev(H, l - 1, P, cfg, semantics)
    upper = _dev(H, l, P, cfg, semantics)
    lhs, rhs = lower * lower, n ** (k + l - 2) * upper
    return InequalityReport("cauchy", lhs, rhs, lhs <= rhs and upper >= 0)


def nonnegativity_check(
    H: Hypergraph, l: int, P: FactoredPredicate | None = None, cfg: MeasureConfig = EXACT, semantics: str = "tuple"
) -> InequalityReport:
    v = _dev(H, l, P, cfg, semantics)
    return InequalityReport("nonnegative", 0, v, v >= 0)


def gamma_oracle(H: Hypergraph, l: int, P: FactoredPredicate | None = None, j: int = 0) -> tuple[int, int]:
    """Loop-level split of dev_{l,P} by even/odd vertices in doubled slot j (0-based among the l pairs).

    Returns (sum over the other coordinates of (Gamma_0 - Gamma_1)^2, smallest inner sum computed
    by the direct double loop over the slot's two vertices). The first must equal the tuple form of
    dev_{l,P}; the second must be >= 0.
    """
    k, n = H.k, H.n
    if not 0 <= j < l:
        raise ValueError("slot out of range")
    E = {tuple(e) for e in H.edges()}
    contains = (lambda t: True) if P is None or P.is_all else P.contains

    def octa(xs, pairs):
        tups = list(itertools.product(*([(x,) for x in xs] + list(pairs))))
        if not all(contains(t) for t in tups):
            return None
        odd = sum(1 for t in tups if len(set(t)) == k and tuple(sorted(t)) in E) % 2
        return -1 if odd else 1

    total, smallest = 0, None
    for xs in itertools.product(range(n), repeat=k - l):
        for flat in itertools.product(range(n), repeat=2 * (l - 1)):
            others = [(flat[2 * a], flat[2 * a + 1]) for a in range(l - 1)]
            sign = {}
            for z in range(n):
                pairs = others[:j] + [(z,)] + others[j:]
                sign[z] = octa(xs, pairs)
            N = [z for z in range(n) if sign[z] is not None]
            g0 = sum(1 for z in N if sign[z] == 1)
            g1 = len(N) - g0
            total += (g0 - g1) ** 2
            inner = 0
            for y0, y1 in itertools.product(range(n), repeat=2):
                pairs = others[:j] + [(y0, y1)] + others[j:]
                v = octa(xs, pairs)
                inner += 0 if v is None else v
            smallest = inner if smallest is None else min(smallest, inner)
    return total, (0 if smallest is None else smallest)


# ---------------------------------------------------------------------------
# predicates built from set families
# ---------------------------------------------------------------------------

def _tuples(n: int, width: int) -> np.ndarray:
    return np.indices((n,) * width).reshape(width, -1).T


def _set_membership(family: Hypergraph, cols: np.ndarray) -> np.ndarray:
    s, d = sorted_distinct(cols)
    out = np.zeros(len(cols), dtype=bool)
    if d.any():
        out[d] = family.mask[rank_array(s[d], family.n)]
    return out


def family_predicate(n: int, k: int, coord: int, positions: Sequence[int], family: Hypergraph) -> FactoredPredicate:
    """Complete in ``coord``: the entries at ``positions`` (indices into the other k-1 coordinates)
    are distinct and form a member of ``family``."""
    idx = _tuples(n, k - 1)
    Pp = _set_membership(family, idx[:, list(positions)]).reshape((n,) * (k - 1))
    return FactoredPredicate.complete_in(n, k, coord, Pp)


def clique_predicate(G: Hypergraph, k: int, l: int) -> FactoredPredicate:
    """Intersection over the last l coordinates i of: the other k-1 entries are distinct and form a
    (k-1)-clique of the (l-1)-graph G. The intersection is the set of k-cliques of G as tuples."""
    n, r = G.n, G.k
    if r != l - 1:
        raise ValueError("G must be (l-1)-uniform")
    idx = _tuples(n, k - 1)
    s, d = sorted_distinct(idx)
    ok = d.copy()
    live = np.flatnonzero(d)
    for pos in itertools.combinations(range(k - 1), r):
        ok[live] &= G.mask[rank_array(s[live][:, list(pos)], n)]
    Pp = ok.reshape((n,) * (k - 1))
    factors = tuple((i, Pp) for i in range(k - l, k))
    return FactoredPredicate(n, k, factors)


@dataclass(frozen=True)
class DevToExpReport:
    dev0: int
    e: int
    miss: int
    product: int
    factor: int
    chain: tuple[int, int, int]  # dev_{2,P1&P2} <= dev_{2,P1} <= dev_2
    cauchy: tuple[int, int]  # dev_{1,P1&P2}^2 <= n^(k-1) dev_{2,P1&P2}, and dev_0^2 <= n^(k-2) dev_1

    @property
    def identity_ok(self) -> bool:
        return self.dev0 == self.factor * (self.miss - self.e)

    @property
    def passed(self) -> bool:
        a, b, c = self.chain
        return self.identity_ok and a <= b <= c and all(self.cauchy)


def devtoexp_pipeline_check(
    H: Hypergraph, k1: int, k2: int, S1: SubsetFamily, S2: SubsetFamily, cfg: MeasureConfig = EXACT
) -> DevToExpReport:
    """Build the two coordinate-complete predicates from S1, S2 and check
    dev_{0,P1&P2}(H) = k1! k2! (miss - e), where miss = |S1||S2| - e counts pairs whose union is not
    an edge (overlapping pairs included)."""
    n, k = H.n, H.k
    if k1 + k2 != k or k1 < 1 or k2 < 1:
        raise ValueError("k1 + k2 must equal k")
    F1 = Hypergraph.from_edges(n, k1, S1.members)
    F2 = Hypergraph.from_edges(n, k2, S2.members)
    # coordinates 0..k-3 are x_1..x_{k-2}, k-2 is y, k-1 is z
    # P1: {x_1..x_{k1-1}, y} in S1, complete in z; P2: {x_{k1}..x_{k-2}, z} in S2, complete in y
    P1 = family_predicate(n, k, k - 1, list(range(k1 - 1)) + [k - 2], F1)
    P2 = family_predicate(n, k, k - 2, list(range(k1 - 1, k - 2)) + [k - 2], F2)
    both = P1.intersect(P2)
    dev0 = _dev(H, 0, both, cfg)
    e = expansion_count(H, [S1, S2])
    product = len(S1) * len(S2)
    d2_both = _dev(H, 2, both, cfg) if k >= 2 else 0
    d2_P1 = _dev(H, 2, P1, cfg)
    d2 = _dev(H, 2, None, cfg)
    d1_both = _dev(H, 1, both, cfg)
    cauchy = (d1_both**2 <= n ** (k) * d2_both, dev0**2 <= n ** (k - 1) * d1_both)
    return DevToExpReport(
        dev0=dev0,
        e=e,
        miss=product - e,
        product=product,
        factor=factorial(k1) * factorial(k2),
        chain=(d2_both, d2_P1, d2),
        cauchy=cauchy,
    )
