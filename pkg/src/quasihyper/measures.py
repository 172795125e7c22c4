"""Exact and sampled quasirandomness measures: Disc, Expand, CD thresholds, eta, deviation."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, prod
from typing import Iterable, Sequence

import numpy as np

from .hypercore import (
    Hypergraph,
    RationalDensity,
    SubsetFamily,
    _ksets_over,
    edge_counts_in_ksets,
    rank_array,
    sorted_distinct,
)

DEFAULT_THRESHOLD = 2**25


@dataclass(frozen=True)
class MeasureConfig:
    mode: str = "exact"
    sample_count: int = 10_000
    seed: int = 0
    exact_threshold: int = DEFAULT_THRESHOLD
    chunk: int = 1 << 16

    def __post_init__(self):
        if self.mode not in ("exact", "sampled"):
            raise ValueError(f"mode must be 'exact' or 'sampled', got {self.mode!r}")
        if self.mode == "sampled" and self.sample_count <= 0:
            raise ValueError("sample_count must be positive in sampled mode")
        if self.exact_threshold <= 0:
            raise ValueError("exact_threshold must be positive")

    def rng(self, *label: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence([self.seed & (2**64 - 1), *label]))


class EnumerationTooLarge(ValueError):
    pass


def _frac_json(x):
    if isinstance(x, Fraction):
        return {"fraction": f"{x.numerator}/{x.denominator}", "float": float(x)}
    return x


# ---------------------------------------------------------------------------
# Disc
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscResult:
    defect: Fraction
    witness: frozenset
    mode: str
    lower_bound: bool  # sampled mode only certifies a lower bound

    def to_json(self, p: RationalDensity | None = None) -> dict:
        return {
            "measure": "disc",
            "parameters": {"p": str(p)} if p else {},
            "mode": self.mode,
            "value": _frac_json(self.defect),
            "witness": sorted(self.witness),
            "lower_bound": self.lower_bound,
        }


def subset_edge_counts(H: Hypergraph) -> np.ndarray:
    """counts[U] = |E(H[U])| for every bitmask U, by a superset-sum transform."""
    n = H.n
    dtype = np.int32 if comb(n, H.k) < 2**31 else np.int64
    f = np.zeros(1 << n, dtype=dtype)
    E = H.edge_array()
    if len(E):
        masks = np.bitwise_or.reduce(np.left_shift(np.int64(1), E), axis=1)
        f[masks] = 1
    for i in range(n):
        v = f.reshape(-1, 2, 1 << i)
        v[:, 1, :] += v[:, 0, :]
    return f


def _popcount(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.uint64)
    out = np.zeros(x.shape, dtype=np.int64)
    while x.any():
        out += (x & np.uint64(1)).astype(np.int64)
        x >>= np.uint64(1)
    return out


def disc_defect(H: Hypergraph, p: RationalDensity, cfg: MeasureConfig = MeasureConfig()) -> DiscResult:
    n, k, a, b = H.n, H.k, p.a, p.b
    if cfg.mode == "exact":
        if 2**n > cfg.exact_threshold:
            raise EnumerationTooLarge(f"2^{n} subsets exceeds exact_threshold; use sampled mode")
        counts = subset_edge_counts(H).astype(np.int64)
        sizes = _popcount(np.arange(1 << n, dtype=np.int64))
        binoms = np.array([comb(s, k) for s in range(n + 1)], dtype=np.int64)
        scaled = np.abs(b * counts - a * binoms[sizes])
        best = int(np.argmax(scaled))
        witness = frozenset(i for i in range(n) if best >> i & 1)
        return DiscResult(Fraction(int(scaled[best]), b), witness, "exact", False)

    rng = cfg.rng(0xD15C)
    E = H.edge_array()
    prefixes = np.tri(n, n, 0, dtype=bool)  # row i is the prefix {0..i}
    best_val, best_U = -1, None
    remaining = cfg.sample_count
    batches = [prefixes]
    while remaining > 0:
        m = min(remaining, 4096)
        batches.append(rng.random((m, n)) < 0.5)
        remaining -= m
    for U in batches:
        if len(E):
            inside = np.ones((U.shape[0], len(E)), dtype=bool)
            for j in range(k):
                inside &= U[:, E[:, j]]
            cnt = inside.sum(axis=1).astype(np.int64)
        else:
            cnt = np.zeros(U.shape[0], dtype=np.int64)
        sizes = U.sum(axis=1)
        binoms = np.array([comb(int(s), k) for s in sizes], dtype=np.int64)
        scaled = np.abs(b * cnt - a * binoms)
        i = int(np.argmax(scaled))
        if scaled[i] > best_val:
            best_val, best_U = int(scaled[i]), frozenset(np.flatnonzero(U[i]).tolist())
    return DiscResult(Fraction(best_val, b), best_U, "sampled", True)


def disc_value(H: Hypergraph, p: RationalDensity, U: Iterable[int]) -> Fraction:
    from .hypercore import induced_edge_count

    U = set(U)
    return abs(induced_edge_count(H, U) - p.value * comb(len(U), H.k))


# ---------------------------------------------------------------------------
# Expand
# ---------------------------------------------------------------------------

def _disjoint_tuples(families: Sequence[SubsetFamily], chunk: int = 1 << 18):
    """Yield arrays (rows = concatenated members, one per family) for pairwise-disjoint choices,
    with an index array recording which member of each family was chosen."""
    arrays = [f.as_array() for f in families]
    if any(len(a) == 0 for a in arrays):
        return
    # grow the product family by family, filtering overlaps as we go
    rows = arrays[0]
    idx = np.arange(len(arrays[0]), dtype=np.int64)[:, None]
    for arr in arrays[1:]:
        out_rows, out_idx = [], []
        step = max(1, chunk // max(1, len(arr)))
        for s in range(0, len(rows), step):
            r = rows[s : s + step]
            ri = idx[s : s + step]
            R = np.repeat(r, len(arr), axis=0)
            I = np.repeat(ri, len(arr), axis=0)
            A = np.tile(arr, (len(r), 1))
            J = np.tile(np.arange(len(arr), dtype=np.int64), len(r))[:, None]
            ok = np.ones(len(R), dtype=bool)
            for c in range(A.shape[1]):
                ok &= ~(R == A[:, c : c + 1]).any(axis=1)
            out_rows.append(np.hstack([R[ok], A[ok]]))
            out_idx.append(np.hstack([I[ok], J[ok]]))
        rows = np.vstack(out_rows) if out_rows else np.zeros((0, rows.shape[1] + arr.shape[1]), np.int64)
        idx = np.vstack(out_idx) if out_idx else np.zeros((0, idx.shape[1] + 1), np.int64)
    yield rows, idx


def _check_families(H: Hypergraph, S: Sequence[SubsetFamily]):
    if sum(f.arity for f in S) != H.k:
        raise ValueError(f"family arities sum to {sum(f.arity for f in S)}, expected k={H.k}")
    for f in S:
        if f.n != H.n:
            raise ValueError("families must live on the hypergraph's vertex set")


def expansion_count(H: Hypergraph, S: Sequence[SubsetFamily]) -> int:
    """Number of tuples (s_1..s_t), s_i in S_i, with pairwise disjoint members whose union is an edge."""
    _check_families(H, S)
    total = 0
    for rows, _ in _disjoint_tuples(S):
        if len(rows):
            total += int(H.tuple_is_edge(rows).sum())
    return total


def expansion_defect(H: Hypergraph, S: Sequence[SubsetFamily], p: RationalDensity) -> tuple[Fraction, int, int]:
    """(|e - p prod|S_i||, e, prod|S_i|)."""
    e = expansion_count(H, S)
    size = prod(len(f) for f in S)
    return abs(e - p.value * size), e, size


@dataclass(frozen=True)
class PartiteIdentityReport:
    partitions: int
    stirling_check: bool
    size_lhs: int  # t^(n-k) * prod |S_i|
    size_rhs: int  # sum over partitions of prod |S_i[P_i]|
    e_lhs: int
    e_rhs: int

    @property
    def passed(self) -> bool:
        return self.stirling_check and self.size_lhs == self.size_rhs and self.e_lhs == self.e_rhs


def stirling2(n: int, t: int) -> int:
    return sum((-1) ** j * comb(t, j) * (t - j) ** n for j in range(t + 1)) // factorial(t)


def surjections(n: int, t: int, chunk: int = 1 << 16):
    """All maps range(n) -> range(t) that hit every value, as (m, n) int8 arrays in chunks."""
    total = t**n
    powers = t ** np.arange(n - 1, -1, -1, dtype=np.int64)
    for s in range(0, total, chunk):
        codes = np.arange(s, min(total, s + chunk), dtype=np.int64)
        A = (codes[:, None] // powers) % t
        onto = np.ones(len(A), dtype=bool)
        for i in range(t):
            onto &= (A == i).any(axis=1)
        yield A[onto].astype(np.int8)


def partite_expansion_identity_check(
    H: Hypergraph, S: Sequence[SubsetFamily], cfg: MeasureConfig = MeasureConfig()
) -> PartiteIdentityReport:
    _check_families(H, S)
    t, n, k = len(S), H.n, H.k
    supports = [f.support for f in S]
    for i, j in itertools.combinations(range(t), 2):
        if supports[i] & supports[j]:
            raise ValueError("families must have pairwise disjoint vertex supports")
    if t**n > cfg.exact_threshold:
        raise EnumerationTooLarge(f"{t}^{n} ordered partitions exceeds exact_threshold")
    arrays = [f.as_array() for f in S]
    tuples = list(_disjoint_tuples(S))
    if tuples:
        rows, idx = tuples[0]
        is_edge = H.tuple_is_edge(rows) if len(rows) else np.zeros(0, bool)
        edge_idx = idx[is_edge]
    else:
        edge_idx = np.zeros((0, t), np.int64)

    n_parts, size_rhs, e_rhs = 0, 0, 0
    for A in surjections(n, t, cfg.chunk):
        n_parts += len(A)
        inside = []
        for i, arr in enumerate(arrays):
            if len(arr) == 0:
                inside.append(np.zeros((len(A), 0), bool))
                continue
            inside.append((A[:, arr] == i).all(axis=2))  # (P, |S_i|)
        size_rhs += int(np.prod(np.stack([m.sum(axis=1) for m in inside]), axis=0, dtype=object).sum())
        if len(edge_idx):
            ok = np.ones((len(A), len(edge_idx)), dtype=bool)
            for i in range(t):
                ok &= inside[i][:, edge_idx[:, i]]
            e_rhs += int(ok.sum())
    norm = t ** (n - k)
    return PartiteIdentityReport(
        partitions=n_parts,
        stirling_check=n_parts == factorial(t) * stirling2(n, t),
        size_lhs=norm * prod(len(f) for f in S),
        size_rhs=size_rhs,
        e_lhs=norm * len(edge_idx),
        e_rhs=e_rhs,
    )


# ---------------------------------------------------------------------------
# CD(l, s)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CDResult:
    defect: Fraction
    hits: int
    total: int

    def to_json(self) -> dict:
        return {"measure": "cd", "value": _frac_json(self.defect), "hits": self.hits, "total": self.total}


def cd_threshold_defect(
    H: Hypergraph,
    G: Hypergraph,
    s: int,
    p: RationalDensity,
    vertices: Iterable[int] | None = None,
    spanning: bool = False,
) -> CDResult:
    """Threshold k-sets T (inside V(G), e_G(T) >= s) and how many of them are H-edges.

    ``vertices`` is V(G) as a subset of V(H) (default: range(G.n)). With ``spanning`` the
    k-sets range over all of V(H) instead.
    """
    k, l = H.k, G.k
    if not 1 <= s <= comb(k, l):
        raise ValueError(f"s must lie in [1, C({k},{l})]")
    if G.n > H.n:
        raise ValueError("G must live on a subset of V(H)")
    if spanning:
        vertices = None
        if G.n < H.n:
            G = Hypergraph(H.n, l, np.concatenate([G.mask, np.zeros(comb(H.n, l) - comb(G.n, l), bool)]))
    elif vertices is None:
        vertices = range(G.n)
    T = _ksets_over(H.n if spanning else G.n, k, vertices)
    if len(T) == 0:
        return CDResult(Fraction(0), 0, 0)
    sel = edge_counts_in_ksets(G, T) >= s
    total = int(sel.sum())
    hits = int(H.sorted_is_edge(T[sel]).sum()) if total else 0
    return CDResult(abs(hits - p.value * total), hits, total)


# ---------------------------------------------------------------------------
# Octahedra and eta
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OctahedronSpec:
    """k - l single vertices followed by l vertex pairs; repeats allowed."""

    singles: tuple[int, ...]
    pairs: tuple[tuple[int, int], ...]

    @property
    def l(self) -> int:
        return len(self.pairs)

    @property
    def k(self) -> int:
        return len(self.singles) + len(self.pairs)

    def parts(self) -> list[tuple[int, ...]]:
        return [(x,) for x in self.singles] + [tuple(p) for p in self.pairs]

    def tuples(self) -> list[tuple[int, ...]]:
        """The 2^l ordered k-tuples, one choice per pair (with multiplicity)."""
        return list(itertools.product(*self.parts()))

    def ksets(self) -> set[tuple[int, ...]]:
        """Non-degenerate k-sets of the octahedron (collapsed choices dropped)."""
        return {tuple(sorted(t)) for t in self.tuples() if len(set(t)) == self.k}

    def is_distinct(self) -> bool:
        vs = list(self.singles) + [v for p in self.pairs for v in p]
        return len(set(vs)) == len(vs)


def eta(H: Hypergraph, parts: Sequence[Iterable[int]]) -> int:
    """+1 if the octahedron's non-degenerate k-sets contain an even number of edges, else -1."""
    parts = [tuple(sorted(set(p))) for p in parts]
    if len(parts) != H.k:
        raise ValueError(f"expected {H.k} parts")
    if any(len(p) not in (1, 2) for p in parts):
        raise ValueError("each part must have one or two vertices")
    sets = {tuple(sorted(t)) for t in itertools.product(*parts) if len(set(t)) == H.k}
    odd = sum(1 for T in sets if H.mask[sum(comb(v, i + 1) for i, v in enumerate(T))]) % 2
    return -1 if odd else 1


def eta_tuple(H: Hypergraph, spec: OctahedronSpec) -> int:
    """Parity over the 2^l choice tuples counted with multiplicity (the reading used by deviation)."""
    odd = sum(1 for t in spec.tuples() if len(set(t)) == H.k and t in H) % 2
    return -1 if odd else 1


# ---------------------------------------------------------------------------
# predicates on V^k
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FactoredPredicate:
    """Intersection of coordinate-complete factors, optionally with a general k-tuple set.

    A factor ``(i, Pp)`` with ``Pp`` a bool array of shape (n,)*(k-1) is the set of k-tuples whose
    coordinates other than i (0-based) lie in Pp. ``general`` is a bool array of shape (n,)*k.
    """

    n: int
    k: int
    factors: tuple[tuple[int, np.ndarray], ...] = ()
    general: np.ndarray | None = None

    def __post_init__(self):
        coords = [i for i, _ in self.factors]
        if len(set(coords)) != len(coords):
            raise ValueError("factor coordinates must be distinct")
        for i, Pp in self.factors:
            if not 0 <= i < self.k:
                raise ValueError(f"coordinate {i} out of range for k={self.k}")
            if Pp.shape != (self.n,) * (self.k - 1):
                raise ValueError("factor array must have shape (n,)*(k-1)")
        if self.general is not None and self.general.shape != (self.n,) * self.k:
            raise ValueError("general array must have shape (n,)*k")

    @classmethod
    def all(cls, n: int, k: int) -> "FactoredPredicate":
        return cls(n, k)

    @classmethod
    def complete_in(cls, n: int, k: int, coord: int, Pp) -> "FactoredPredicate":
        return cls(n, k, ((coord, np.asarray(Pp, dtype=bool)),))

    @classmethod
    def from_dense(cls, dense) -> "FactoredPredicate":
        dense = np.asarray(dense, dtype=bool)
        return cls(dense.shape[0], dense.ndim, (), dense)

    @property
    def is_all(self) -> bool:
        return not self.factors and self.general is None

    def intersect(self, other: "FactoredPredicate") -> "FactoredPredicate":
        if (self.n, self.k) != (other.n, other.k):
            raise ValueError("predicates over different spaces")
        mine = dict(self.factors)
        factors = list(self.factors)
        general = self.general
        for i, Pp in other.factors:
            if i in mine:
                j = [c for c, _ in factors].index(i)
                factors[j] = (i, factors[j][1] & Pp)
            else:
                factors.append((i, Pp))
        if other.general is not None:
            general = other.general if general is None else general & other.general
        return FactoredPredicate(self.n, self.k, tuple(factors), general)

    def to_dense(self) -> np.ndarray:
        out = np.ones((self.n,) * self.k, dtype=bool)
        for i, Pp in self.factors:
            out &= np.expand_dims(Pp, axis=i)
        if self.general is not None:
            out &= self.general
        return out

    def contains(self, t: Sequence[int]) -> bool:
        for i, Pp in self.factors:
            if not Pp[tuple(t[:i]) + tuple(t[i + 1 :])]:
                return False
        return self.general is None or bool(self.general[tuple(t)])

    def complete_coordinates(self) -> set[int]:
        return {i for i, _ in self.factors}


# ---------------------------------------------------------------------------
# deviation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DevResult:
    value: float | int
    mode: str
    l: int
    normalized: float
    standard_error: float | None = None
    semantics: str = "tuple"

    def to_json(self) -> dict:
        out = {
            "measure": "dev",
            "parameters": {"l": self.l, "semantics": self.semantics},
            "mode": self.mode,
            "value": self.value,
            "normalized": self.normalized,
        }
        if self.standard_error is not None:
            out["standard_error"] = self.standard_error
        return out


def edge_tensor(H: Hypergraph) -> np.ndarray:
    """Bool array of shape (n,)*k: entry t is True iff t has distinct entries forming an edge."""
    n, k = H.n, H.k
    idx = np.indices((n,) * k).reshape(k, -1).T
    return H.tuple_is_edge(idx).reshape((n,) * k)


def sign_tensor(H: Hypergraph, P: FactoredPredicate | None = None) -> np.ndarray:
    """w(t) = (-1)^[t edge] * [t in P] as int64, shape (n,)*k."""
    w = 1 - 2 * edge_tensor(H).astype(np.int64)
    if P is not None and not P.is_all:
        w = w * P.to_dense()
    return w


def _box(T: np.ndarray, l: int) -> np.ndarray:
    """Batched box sum over the trailing l axes: sum over y_0, y_1 in V^l of prod_eps T[y_eps]."""
    if l == 0:
        return T
    if l == 1:
        s = T.sum(axis=-1)
        return s * s
    if l == 2:
        M = T
        G = np.matmul(M, np.swapaxes(M, -1, -2))
        return (G * G).sum(axis=(-1, -2))
    B, n = T.shape[0], T.shape[1]
    rest = T.shape[2:]
    out = np.zeros(B, dtype=np.int64)
    for a in range(n):
        prodab = T[:, a : a + 1] * T  # (B, n, rest)
        out += _box(prodab.reshape((B * n,) + rest), l - 1).reshape(B, n).sum(axis=1)
    return out


def box_deviation(W: np.ndarray, l: int) -> int:
    """sum_{x in V^(k-l)} box_l(W[x]) for a weight tensor W of shape (n,)*k."""
    n, k = W.shape[0], W.ndim
    batch = W.reshape((n ** (k - l),) + (n,) * l)
    return int(_box(batch, l).sum())


def _octahedron_indices(rows: np.ndarray, k: int, l: int) -> np.ndarray:
    """rows (C, k+l) = x_1..x_{k-l}, y_{1,0}, y_{1,1}, ..., -> (C, 2^l, k) choice tuples."""
    C = rows.shape[0]
    xs = rows[:, : k - l]
    ys = rows[:, k - l :].reshape(C, l, 2)
    out = np.empty((C, 2**l, k), dtype=np.int64)
    for e, eps in enumerate(itertools.product((0, 1), repeat=l)):
        out[:, e, : k - l] = xs
        for j, bit in enumerate(eps):
            out[:, e, k - l + j] = ys[:, j, bit]
    return out


def _octahedron_parts(H: Hypergraph, rows: np.ndarray, l: int, P_dense: np.ndarray | None):
    """Per-row choice-tuple data: (edge flags (C, 2^l), first-occurrence flags, P membership)."""
    k, n = H.k, H.n
    tup = _octahedron_indices(rows, k, l)
    C, m = tup.shape[0], tup.shape[1]
    flat = tup.reshape(C * m, k)
    s, distinct = sorted_distinct(flat)
    ranks = np.full(C * m, -1, dtype=np.int64)
    if distinct.any():
        ranks[distinct] = rank_array(s[distinct], n)
    isedge = np.zeros(C * m, dtype=bool)
    isedge[distinct] = H.mask[ranks[distinct]]
    isedge, ranks = isedge.reshape(C, m), ranks.reshape(C, m)
    first = np.ones((C, m), dtype=bool)
    for j in range(1, m):
        for i in range(j):
            first[:, j] &= ranks[:, j] != ranks[:, i]
    inP = None if P_dense is None else P_dense[tuple(flat.T)].reshape(C, m).all(axis=1)
    return isedge, first, inP


def _signs(count: np.ndarray, inP: np.ndarray | None) -> np.ndarray:
    val = np.where(count % 2 == 0, 1, -1).astype(np.int64)
    return val if inP is None else val * inP


def octahedron_eta_rows(
    H: Hypergraph, rows: np.ndarray, l: int, semantics: str = "tuple", P_dense: np.ndarray | None = None
) -> np.ndarray:
    """Per-row eta (+1/-1), times 0 when some choice tuple falls outside P."""
    if semantics not in ("tuple", "set"):
        raise ValueError("semantics must be 'tuple' or 'set'")
    isedge, first, inP = _octahedron_parts(H, rows, l, P_dense)
    if semantics == "set":
        isedge = isedge & first
    return _signs(isedge.sum(axis=1), inP)


def deviation(
    H: Hypergraph,
    l: int,
    P: FactoredPredicate | None = None,
    cfg: MeasureConfig = MeasureConfig(),
    semantics: str = "set",
) -> DevResult:
    """dev_{l,P}(H): signed parity sum over all octahedron placements x in V^(k-l), y in V^(2l).

    ``semantics='set'`` takes the parity over the distinct k-sets of the octahedron (coinciding
    choices collapse to one set). ``'tuple'`` counts every choice tuple with multiplicity; that
    version factorises over coordinates, so the restriction and Cauchy inequalities hold exactly
    for it at every n. The two differ only on placements with a repeated y-vertex.
    """
    n, k = H.n, H.k
    if not 0 <= l <= k:
        raise ValueError(f"l must lie in [0, {k}]")
    if P is not None and (P.n, P.k) != (n, k):
        raise ValueError("predicate does not match the hypergraph")
    size = n ** (k + l)
    if cfg.mode == "exact":
        if size > cfg.exact_threshold:
            raise EnumerationTooLarge(f"n^(k+l) = {size} exceeds exact_threshold; use sampled mode")
        if semantics not in ("tuple", "set"):
            raise ValueError("semantics must be 'tuple' or 'set'")
        val = box_deviation(sign_tensor(H, P), l)
        if semantics == "set":
            val += _set_correction(H, l, P, cfg.chunk)
        return DevResult(val, "exact", l, val / size if size else 0.0, None, semantics)

    rng = cfg.rng(0xDE5, l)
    P_dense = None if P is None or P.is_all else P.to_dense()
    total, total_sq, done = 0.0, 0.0, 0
    while done < cfg.sample_count:
        m = min(cfg.chunk, cfg.sample_count - done)
        rows = rng.integers(0, n, size=(m, k + l))
        v = octahedron_eta_rows(H, rows, l, semantics, P_dense).astype(np.float64)
        total += v.sum()
        total_sq += (v * v).sum()
        done += m
    mean = total / done
    var = max(0.0, total_sq / done - mean * mean)
    se = (var / max(1, done - 1)) ** 0.5
    return DevResult(float(mean * size), "sampled", l, float(mean), float(se * size), semantics)


def set_partitions(m: int):
    """Restricted growth strings of length m: one per set partition of range(m)."""
    def rec(prefix, top):
        if len(prefix) == m:
            yield tuple(prefix)
            return
        for b in range(top + 2):
            yield from rec(prefix + [b], max(top, b))

    if m == 0:
        yield ()
        return
    yield from rec([0], 0)


def _choice_classes(rgs: tuple[int, ...], l: int) -> tuple[np.ndarray, bool]:
    """For a y-block equality pattern: which choices come first among those giving the same k-set,
    and whether some k-set arises from an even number of choices.

    Choices with equal y-multisets give the same k-set. If every class has odd size, the set and
    tuple parities agree on every placement with this pattern.
    """
    first = np.zeros(2**l, dtype=bool)
    sizes: dict[tuple[int, ...], int] = {}
    for e, eps in enumerate(itertools.product((0, 1), repeat=l)):
        part = tuple(sorted(rgs[2 * j + b] for j, b in enumerate(eps)))
        first[e] = part not in sizes
        sizes[part] = sizes.get(part, 0) + 1
    changes = any(c % 2 == 0 for part, c in sizes.items() if len(set(part)) == l)
    return first, changes


@lru_cache(maxsize=32)
def _yblock_patterns(n: int, l: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """(y-blocks, first-choice mask) for every equality pattern on which the parities can differ."""
    m = 2 * l
    out = []
    for rgs in set_partitions(m):
        b = max(rgs) + 1
        if b == m or b > n:
            continue
        first, changes = _choice_classes(rgs, l)
        if not changes:
            continue
        vals = np.array(list(itertools.permutations(range(n), b)), dtype=np.int64).reshape(-1, b)
        Y = vals[:, list(rgs)]
        Y.flags.writeable = False
        out.append((Y, first))
    return tuple(out)


def _set_correction(H: Hypergraph, l: int, P, chunk: int) -> int:
    """sum over placements of (eta_set - eta_tuple); only placements with a repeated y can differ."""
    n, k = H.n, H.k
    if l == 0 or n == 0:
        return 0
    E = edge_tensor(H)
    P_dense = None if P is None or P.is_all else P.to_dense()
    xs = np.indices((n,) * (k - l)).reshape(k - l, -1).T if k > l else np.zeros((1, 0), dtype=np.int64)
    step = max(1, (4 * chunk) // max(1, len(xs)))
    acc = 0
    for Y, first in _yblock_patterns(n, l):
        for s in range(0, len(Y), step):
            y = Y[s : s + step]
            rows = np.hstack([np.repeat(xs, len(y), axis=0), np.tile(y, (len(xs), 1))])
            tup = _octahedron_indices(rows, k, l)
            idx = tuple(tup[:, :, i] for i in range(k))
            isedge = E[idx]
            inP = None if P_dense is None else P_dense[idx].all(axis=1)
            d = _signs((isedge & first).sum(axis=1), inP) - _signs(isedge.sum(axis=1), inP)
            acc += int(d.sum())
    return acc


def _enumerate_deviation(H: Hypergraph, l: int, P, semantics: str, chunk: int) -> int:
    """Direct sum over all n^(k+l) placements; the reference the fast paths are checked against."""
    n, k = H.n, H.k
    width = k + l
    total_rows = n**width
    P_dense = None if P is None or P.is_all else P.to_dense()
    powers = n ** np.arange(width - 1, -1, -1, dtype=np.int64)
    acc = 0
    for s in range(0, total_rows, chunk):
        codes = np.arange(s, min(total_rows, s + chunk), dtype=np.int64)
        rows = (codes[:, None] // powers) % n
        acc += int(octahedron_eta_rows(H, rows, l, semantics, P_dense).sum())
    return acc
