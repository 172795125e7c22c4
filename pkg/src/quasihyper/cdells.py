"""Finite identities behind the collapse of CD(l, s) onto CD(l).

Restrictions G_{P,R} of an l-graph to intersection patterns over an ordered k-partition,
transversal counts W(G,P,s), the f/g inclusion-exclusion maps, the partition overcount and the
complement trick, each checked by exact enumeration at small n'.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb, factorial
from typing import Iterable, Sequence

import numpy as np

from .hypercore import (
    Hypergraph,
    SubsetFamily,
    all_ksubsets,
    cliques,
    edge_counts_in_ksets,
)
from .measures import EnumerationTooLarge, MeasureConfig, surjections


@dataclass(frozen=True)
class VertexKPartition:
    """Ordered partition (P_1..P_k) of range(n) into nonempty parts, stored as part labels."""

    labels: tuple[int, ...]
    k: int

    def __post_init__(self):
        labels = tuple(int(x) for x in self.labels)
        if any(not 0 <= x < self.k for x in labels):
            raise ValueError("part labels must lie in range(k)")
        if set(labels) != set(range(self.k)):
            raise ValueError("every part must be nonempty")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_parts(cls, parts: Sequence[Iterable[int]], n: int | None = None) -> "VertexKPartition":
        parts = [sorted(p) for p in parts]
        flat = [v for p in parts for v in p]
        n = len(flat) if n is None else n
        if sorted(flat) != list(range(n)):
            raise ValueError("parts must be disjoint and cover range(n)")
        labels = [0] * n
        for i, p in enumerate(parts):
            for v in p:
                labels[v] = i
        return cls(tuple(labels), len(parts))

    @property
    def n(self) -> int:
        return len(self.labels)

    def parts(self) -> list[tuple[int, ...]]:
        return [tuple(v for v, x in enumerate(self.labels) if x == i) for i in range(self.k)]

    def pattern(self, X: Iterable[int]) -> frozenset:
        """{i : X meets P_i}."""
        return frozenset(self.labels[v] for v in X)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.labels, dtype=np.int64)


def _check_partition(G: Hypergraph, P: VertexKPartition):
    if P.n != G.n:
        raise ValueError("partition must cover V(G) exactly")


def _patterns(R: Iterable[Iterable[int]], l: int) -> frozenset:
    R = frozenset(frozenset(r) for r in R)
    if any(len(r) != l for r in R):
        raise ValueError(f"patterns must have size {l}")
    return R


def restrict(G: Hypergraph, P: VertexKPartition, R: Iterable[Iterable[int]]) -> Hypergraph:
    """G_{P,R}: edges of G whose set of met parts lies in R."""
    _check_partition(G, P)
    R = _patterns(R, G.k)
    if any(max(r) >= P.k for r in R if r):
        raise ValueError("pattern index out of range")
    keep = np.zeros_like(G.mask)
    for r in np.flatnonzero(G.mask):
        X = _unrank(int(r), G.k)
        if P.pattern(X) in R:
            keep[r] = True
    return Hypergraph(G.n, G.k, keep)


def _unrank(r, k):
    from .hypercore import unrank

    return unrank(r, k)


def augment_F(G_restricted: Hypergraph, P: VertexKPartition, I: Iterable[int]) -> Hypergraph:
    """G_{P,R} together with every l-set whose met-part set is exactly I."""
    _check_partition(G_restricted, P)
    I = frozenset(I)
    l = G_restricted.k
    if len(I) != l:
        raise ValueError(f"I must have size {l}")
    X = all_ksubsets(G_restricted.n, l)
    labels = P.as_array()
    codes = np.zeros(len(X), dtype=np.int64)
    for j in range(l):
        codes |= np.left_shift(np.int64(1), labels[X[:, j]])
    want = sum(1 << i for i in I)
    return Hypergraph(G_restricted.n, l, G_restricted.mask | (codes == want))


def transversal_counts(
    G: Hypergraph, P: VertexKPartition, s: int, k: int | None = None, H: Hypergraph | None = None
) -> tuple[int, int | None]:
    """(|W(G,P,s)|, |W(G,P,s) & E(H)|): k-sets meeting every part with exactly s induced edges."""
    _check_partition(G, P)
    k = P.k if k is None else k
    if not 1 <= s <= comb(k, G.k):
        raise ValueError(f"s must lie in [1, C({k},{G.k})]")
    T = all_ksubsets(G.n, k)
    if not len(T):
        return 0, (0 if H is not None else None)
    labels = P.as_array()[T]
    meets_all = np.ones(len(T), dtype=bool)
    for i in range(P.k):
        meets_all &= (labels == i).any(axis=1)
    sel = meets_all & (edge_counts_in_ksets(G, T) == s)
    w = int(sel.sum())
    if H is None:
        return w, None
    return w, int(H.sorted_is_edge(T[sel]).sum()) if w else 0


# ---------------------------------------------------------------------------
# f / g maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IECounts:
    k: int
    f_K: dict
    f_H: dict
    g_K: dict
    g_H: dict

    def mobius_ok(self) -> bool:
        """g = sum over subsets of f, and f = signed sum over subsets of g, for both pairs."""
        subsets = range(1 << self.k)
        for f, g in ((self.f_K, self.g_K), (self.f_H, self.g_H)):
            for A in subsets:
                sub = [B for B in subsets if B & ~A == 0]
                if g[A] != sum(f[B] for B in sub):
                    return False
                if f[A] != sum((-1) ** (bin(A).count("1") - bin(B).count("1")) * g[B] for B in sub):
                    return False
        return True


def ie_counts(F: Hypergraph, P: VertexKPartition, H: Hypergraph, threshold: int, k: int | None = None) -> IECounts:
    """f(A): k-sets with e_F >= threshold meeting exactly the parts A; g(A): meeting only parts in A.

    Subsets of [k] are bitmasks. The H variants keep only k-sets that are edges of H.
    """
    _check_partition(F, P)
    k = P.k if k is None else k
    T = all_ksubsets(F.n, k)
    heavy = edge_counts_in_ksets(F, T) >= threshold
    labels = P.as_array()[T]
    code = np.bitwise_or.reduce(np.left_shift(np.int64(1), labels), axis=1)
    inH = H.sorted_is_edge(T) if H.n == F.n else H.tuple_is_edge(T)
    f_K, f_H, g_K, g_H = {}, {}, {}, {}
    for A in range(1 << P.k):
        exact = heavy & (code == A)
        within = heavy & ((code & ~A) == 0)
        f_K[A], f_H[A] = int(exact.sum()), int((exact & inH).sum())
        g_K[A], g_H[A] = int(within.sum()), int((within & inH).sum())
    return IECounts(P.k, f_K, f_H, g_K, g_H)


@dataclass(frozen=True)
class TransferReport:
    W_F: tuple[int, int]  # |W(F,P,s+1)|, with H
    W_G: tuple[int, int]  # |W(G_{P,R},P,s)|, with H
    f_full: tuple[int, int]  # f_K([k]), f_H([k])
    mobius: bool

    @property
    def passed(self) -> bool:
        return self.W_F == self.W_G == self.f_full and self.mobius


def transfer_check(
    G: Hypergraph, H: Hypergraph, P: VertexKPartition, R: Iterable[Iterable[int]], I: Iterable[int]
) -> TransferReport:
    """Build G_{P,R} and F for |R| = s, I not in R, and compare the transversal counts."""
    R = _patterns(R, G.k)
    I = frozenset(I)
    if I in R:
        raise ValueError("I must not belong to R")
    s = len(R)
    GR = restrict(G, P, R)
    F = augment_F(GR, P, I)
    wf = transversal_counts(F, P, s + 1, H=H)
    wg = transversal_counts(GR, P, s, H=H) if s >= 1 else _zero_pattern_counts(GR, P, H)
    ie = ie_counts(F, P, H, s + 1)
    full = (1 << P.k) - 1
    return TransferReport(wf, wg, (ie.f_K[full], ie.f_H[full]), ie.mobius_ok())


def _zero_pattern_counts(GR, P, H):
    # s = 0 is outside the stated range; count transversals with no induced edge directly
    T = all_ksubsets(GR.n, P.k)
    labels = P.as_array()[T]
    ok = np.ones(len(T), dtype=bool)
    for i in range(P.k):
        ok &= (labels == i).any(axis=1)
    ok &= edge_counts_in_ksets(GR, T) == 0
    return int(ok.sum()), int(H.sorted_is_edge(T[ok]).sum()) if ok.any() else 0


# ---------------------------------------------------------------------------
# overcount identity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OvercountReport:
    k: int
    l: int
    s: int
    n: int
    partitions: int
    exact_count: int  # |{T : e_G(T) = s}|
    exact_count_H: int
    norm: int  # k! k^(n'-k)
    sum_W: int  # sum over (P, R), |R| = s, of |W(G_{P,R},P,s)|
    sum_W_H: int
    binomial_moment: int  # sum over T of C(e_G(T), s)
    binomial_moment_H: int
    inverted: int  # exact count recovered from the pattern sums by binomial inversion
    inverted_H: int

    @property
    def literal_ok(self) -> bool:
        return self.norm * self.exact_count == self.sum_W and self.norm * self.exact_count_H == self.sum_W_H

    @property
    def moment_ok(self) -> bool:
        return self.norm * self.binomial_moment == self.sum_W and self.norm * self.binomial_moment_H == self.sum_W_H

    @property
    def inversion_ok(self) -> bool:
        return self.inverted == self.exact_count and self.inverted_H == self.exact_count_H

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d.update(literal_ok=self.literal_ok, moment_ok=self.moment_ok, inversion_ok=self.inversion_ok)
        return d


def pattern_sums(
    G: Hypergraph, k: int, H: Hypergraph | None, sizes: Iterable[int], cfg: MeasureConfig = MeasureConfig()
) -> tuple[dict[int, int], dict[int, int], int]:
    """For each j in ``sizes``: sum over ordered k-partitions P and j-sets R of |W(G_{P,R},P,j)|.

    Evaluated from the definitions in one vectorised sweep over partitions: for every P, k-set T
    and pattern set R, e_{G_{P,R}}(T) counts the edges of G[T] whose met-part set lies in R.
    """
    n, l = G.n, G.k
    if k**n > cfg.exact_threshold:
        raise EnumerationTooLarge(f"{k}^{n} partitions exceeds exact_threshold")
    pats = list(itertools.combinations(range(k), l))
    pat_index = np.full(1 << k, -1, dtype=np.int64)
    for i, pt in enumerate(pats):
        pat_index[sum(1 << x for x in pt)] = i
    sizes = sorted(set(sizes))
    Rs = {j: list(itertools.combinations(range(len(pats)), j)) for j in sizes}

    T = all_ksubsets(n, k)
    if not len(T):
        return {j: 0 for j in sizes}, {j: 0 for j in sizes}, 0
    inH = np.zeros(len(T), bool) if H is None else (H.sorted_is_edge(T) if H.n == n else H.tuple_is_edge(T))
    subpos = list(itertools.combinations(range(k), l))
    edge_TX = np.stack([G.sorted_is_edge(T[:, list(pos)]) for pos in subpos], axis=1)  # (N_T, C(k,l))

    tot = {j: 0 for j in sizes}
    tot_H = {j: 0 for j in sizes}
    n_parts = 0
    for A in surjections(n, k, cfg.chunk):
        n_parts += len(A)
        lab = A[:, T].astype(np.int64)  # (P, N_T, k)
        transversal = np.ones(lab.shape[:2], dtype=bool)
        for i in range(k):
            transversal &= (lab == i).any(axis=2)
        pidx = np.stack(
            [pat_index[np.bitwise_or.reduce(np.left_shift(np.int64(1), lab[:, :, list(pos)]), axis=2)] for pos in subpos],
            axis=2,
        )  # (P, N_T, C(k,l)) index of the met-part set, or -1
        for j in sizes:
            for R in Rs[j]:
                inR = np.isin(pidx, R)
                e = (inR & edge_TX[None]).sum(axis=2)
                w = transversal & (e == j)
                tot[j] += int(w.sum())
                tot_H[j] += int((w & inH[None]).sum())
    return tot, tot_H, n_parts


def overcount_identity_check(
    G: Hypergraph, s: int, k: int, H: Hypergraph | None = None, cfg: MeasureConfig = MeasureConfig()
) -> OvercountReport:
    """Compare k!k^(n'-k) |{T : e_G(T) = s}| with the sum of |W(G_{P,R},P,s)| over P and |R| = s.

    Also reports the binomial-moment form of the same sum and recovers the exact count from the
    sums at every level j >= s by binomial inversion.
    """
    l, n = G.k, G.n
    top = comb(k, l)
    if not 1 <= s <= top:
        raise ValueError(f"s must lie in [1, {top}]")
    if H is None:
        H = Hypergraph.empty(n, k)
    T = all_ksubsets(n, k)
    e = edge_counts_in_ksets(G, T) if len(T) else np.zeros(0, np.int64)
    inH = H.sorted_is_edge(T) if len(T) else np.zeros(0, bool)
    sums, sums_H, parts = pattern_sums(G, k, H, range(s, top + 1), cfg)
    norm = factorial(k) * k ** max(0, n - k)
    moments = {j: sum(comb(int(x), j) for x in e) for j in range(s, top + 1)}
    moments_H = {j: sum(comb(int(x), j) for x in e[inH]) for j in range(s, top + 1)}

    def invert(S):
        return sum((-1) ** (j - s) * comb(j, s) * S[j] for j in range(s, top + 1)) // norm

    return OvercountReport(
        k=k,
        l=l,
        s=s,
        n=n,
        partitions=parts,
        exact_count=int((e == s).sum()),
        exact_count_H=int(((e == s) & inH).sum()),
        norm=norm,
        sum_W=sums[s],
        sum_W_H=sums_H[s],
        binomial_moment=moments[s],
        binomial_moment_H=moments_H[s],
        inverted=invert(sums),
        inverted_H=invert(sums_H),
    )


# ---------------------------------------------------------------------------
# complement trick
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ComplementReport:
    s: int
    total: int  # C(n', k)
    A: int  # |{T : e_{G-bar}(T) >= s}|
    B: int  # |{T : e_G(T) >= C(k,l) - s + 1}|
    edges_H: int  # |E(H[V(G)])|
    A_H: int
    B_H: int

    @property
    def passed(self) -> bool:
        return self.B == self.total - self.A and self.B_H == self.edges_H - self.A_H


def complement_threshold_check(G: Hypergraph, H: Hypergraph, s: int = 1) -> ComplementReport:
    """|B| = C(n',k) - |A| with A = {e_{G-bar} >= s}, B = {e_G >= C(k,l)-s+1}, raw and inside E(H).

    s = 1 is the clique case (B = cliques of G).
    """
    k, l = H.k, G.k
    top = comb(k, l)
    if not 1 <= s <= top:
        raise ValueError(f"s must lie in [1, {top}]")
    T = all_ksubsets(G.n, k)
    if not len(T):
        return ComplementReport(s, 0, 0, 0, 0, 0, 0)
    Gbar = G.complement()
    a = edge_counts_in_ksets(Gbar, T) >= s
    b = edge_counts_in_ksets(G, T) >= top - s + 1
    inH = H.sorted_is_edge(T) if H.n == G.n else H.tuple_is_edge(T)
    return ComplementReport(
        s=s,
        total=len(T),
        A=int(a.sum()),
        B=int(b.sum()),
        edges_H=int(inH.sum()),
        A_H=int((a & inH).sum()),
        B_H=int((b & inH).sum()),
    )


# ---------------------------------------------------------------------------
# cliques of a given type (base case only)
# ---------------------------------------------------------------------------

def cliques_of_type(families: Sequence[SubsetFamily], m: Sequence[int]) -> set[tuple[int, ...]]:
    """k-sets A inside the union of supports with |A & V(S_i)| = m_i and every k_i-subset of
    A & V(S_i) in S_i. Families must have disjoint supports."""
    k = sum(m)
    supports = [f.support for f in families]
    for i, j in itertools.combinations(range(len(families)), 2):
        if supports[i] & supports[j]:
            raise ValueError("families must have disjoint supports")
    universe = sorted(set().union(*supports))
    out = set()
    for A in itertools.combinations(universe, k):
        ok = True
        for f, Vi, mi in zip(families, supports, m):
            inside = [v for v in A if v in Vi]
            if len(inside) != mi or any(c not in f.members for c in itertools.combinations(inside, f.arity)):
                ok = False
                break
        if ok:
            out.add(A)
    return out


def family_as_hypergraph(f: SubsetFamily) -> Hypergraph:
    return Hypergraph.from_edges(f.n, f.arity, f.members)


def base_case_identity(families: Sequence[SubsetFamily], i: int, k: int) -> tuple[set, set]:
    """(cliques of type k at coordinate i, k-cliques of S_i restricted to its support)."""
    m = [0] * len(families)
    m[i] = k
    lhs = cliques_of_type(families, m)
    S = families[i]
    if k <= S.arity:
        rhs = {tuple(c) for c in S.members} if k == S.arity else set()
    else:
        rhs = cliques(family_as_hypergraph(S), k, S.support)
    return lhs, rhs
