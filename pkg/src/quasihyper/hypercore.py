"""k-uniform hypergraphs stored as rank-indexed edge masks, plus colex subset kernels.

Vertices are ``0..n-1``. A k-set is a strictly increasing tuple. Every subset of
arity r has a colexicographic rank ``sum(C(v_i, i+1))``; edge membership is a
lookup into a boolean array of length C(n, k) indexed by that rank.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb, gcd
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

MAX_MASK_BITS = 2**33

KSet = tuple[int, ...]


# ---------------------------------------------------------------------------
# colex rank / unrank
# ---------------------------------------------------------------------------

def rank(subset: Sequence[int]) -> int:
    """Colex rank of a k-set (any iterable; sorted internally)."""
    return sum(comb(v, i + 1) for i, v in enumerate(sorted(subset)))


def unrank(r: int, arity: int) -> KSet:
    """Inverse of :func:`rank` for subsets of the given arity."""
    if r < 0:
        raise ValueError("rank must be non-negative")
    out = []
    for i in range(arity, 0, -1):
        # largest v with C(v, i) <= r
        v = i - 1
        while comb(v + 1, i) <= r:
            v += 1
        out.append(v)
        r -= comb(v, i)
    return tuple(reversed(out))


def enumerate_ksubsets(n: int, r: int) -> Iterator[KSet]:
    """All r-subsets of range(n) in colex order. Empty stream when r > n."""
    if r < 0 or n < 0:
        raise ValueError("n and r must be non-negative")
    if r > n:
        return
    if r == 0:
        yield ()
        return
    # colex successor: find the first position that can be bumped
    cur = list(range(r))
    while True:
        yield tuple(cur)
        i = 0
        while i < r - 1 and cur[i] + 1 == cur[i + 1]:
            i += 1
        if i == r - 1 and cur[i] + 1 >= n:
            return
        cur[i] += 1
        for j in range(i):
            cur[j] = j


@lru_cache(maxsize=64)
def binom_table(n: int, r: int) -> np.ndarray:
    """table[v, j] = C(v, j) for v < n+1, j <= r, as int64."""
    t = np.zeros((n + 1, r + 1), dtype=np.int64)
    for v in range(n + 1):
        for j in range(r + 1):
            t[v, j] = comb(v, j)
    t.setflags(write=False)
    return t


def rank_array(cols: np.ndarray, n: int) -> np.ndarray:
    """Vectorised colex rank of rows of ``cols`` (shape (N, r)), rows sorted ascending."""
    cols = np.asarray(cols, dtype=np.int64)
    r = cols.shape[1]
    if r == 0:
        return np.zeros(cols.shape[0], dtype=np.int64)
    table = binom_table(n, r)
    out = np.zeros(cols.shape[0], dtype=np.int64)
    for i in range(r):
        out += table[cols[:, i], i + 1]
    return out


@lru_cache(maxsize=64)
def all_ksubsets(n: int, r: int) -> np.ndarray:
    """(C(n,r), r) int64 array of every r-subset, row i has colex rank i."""
    if r > n:
        arr = np.zeros((0, r), dtype=np.int64)
    elif r == 0:
        arr = np.zeros((1, 0), dtype=np.int64)
    else:
        # build in lex order via combinations, then reorder to colex
        arr = np.fromiter(
            (v for c in combinations(range(n), r) for v in c),
            dtype=np.int64,
            count=comb(n, r) * r,
        ).reshape(-1, r)
        order = np.argsort(rank_array(arr, n), kind="stable")
        arr = arr[order]
    arr.setflags(write=False)
    return arr


def sorted_distinct(cols: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sort each row; report which rows have pairwise distinct entries."""
    s = np.sort(np.asarray(cols, dtype=np.int64), axis=1)
    if s.shape[1] <= 1:
        return s, np.ones(s.shape[0], dtype=bool)
    distinct = np.all(s[:, 1:] != s[:, :-1], axis=1)
    return s, distinct


def random_distinct_rows(rng: np.random.Generator, n: int, width: int, m: int) -> np.ndarray:
    """m uniform ordered selections of ``width`` distinct vertices from range(n)."""
    if width > n:
        raise ValueError("not enough vertices")
    p_ok = 1.0
    for i in range(width):
        p_ok *= (n - i) / n
    chunks, have = [], 0
    while have < m:
        rows = rng.integers(0, n, size=(int((m - have) / p_ok * 1.05) + 16, width))
        ok = np.ones(len(rows), dtype=bool)
        for i, j in combinations(range(width), 2):
            ok &= rows[:, i] != rows[:, j]
        chunks.append(rows[ok])
        have += int(ok.sum())
    return np.concatenate(chunks)[:m]


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RationalDensity:
    """A density p = a/b strictly between 0 and 1, in lowest terms."""

    a: int
    b: int

    def __post_init__(self):
        if not (0 < self.a < self.b):
            raise ValueError(f"density must satisfy 0 < a < b, got {self.a}/{self.b}")
        if gcd(self.a, self.b) != 1:
            raise ValueError(f"density {self.a}/{self.b} is not in lowest terms")

    @classmethod
    def parse(cls, text: str) -> "RationalDensity":
        f = Fraction(text)
        return cls(f.numerator, f.denominator)

    @classmethod
    def from_fraction(cls, f: Fraction) -> "RationalDensity":
        return cls(f.numerator, f.denominator)

    @property
    def value(self) -> Fraction:
        return Fraction(self.a, self.b)

    def __str__(self) -> str:
        return f"{self.a}/{self.b}"


@dataclass(frozen=True)
class SubsetFamily:
    """A set of r-subsets of range(n)."""

    arity: int
    n: int
    members: frozenset

    def __post_init__(self):
        for m in self.members:
            if len(m) != self.arity or len(set(m)) != self.arity:
                raise ValueError(f"member {m} does not have arity {self.arity}")
            if any(v < 0 or v >= self.n for v in m):
                raise ValueError(f"member {m} out of range for n={self.n}")

    @classmethod
    def of(cls, arity: int, n: int, members: Iterable[Iterable[int]]) -> "SubsetFamily":
        return cls(arity, n, frozenset(tuple(sorted(m)) for m in members))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members))

    @property
    def support(self) -> frozenset:
        return frozenset(v for m in self.members for v in m)

    def as_array(self) -> np.ndarray:
        if not self.members:
            return np.zeros((0, self.arity), dtype=np.int64)
        return np.array(sorted(self.members), dtype=np.int64).reshape(-1, self.arity)

    def restricted_to(self, part: Iterable[int]) -> "SubsetFamily":
        part = set(part)
        return SubsetFamily(self.arity, self.n, frozenset(m for m in self.members if part.issuperset(m)))


@dataclass(frozen=True, eq=False)
class Hypergraph:
    """k-uniform hypergraph on range(n); ``mask[rank(e)]`` says whether e is an edge."""

    n: int
    k: int
    mask: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("uniformity must be >= 1")
        if self.n < 0:
            raise ValueError("n must be non-negative")
        size = comb(self.n, self.k)
        if size > MAX_MASK_BITS:
            raise MemoryError(f"C({self.n},{self.k}) = {size} exceeds the 2^33 mask guard")
        m = np.asarray(self.mask, dtype=bool)
        if m.shape != (size,):
            raise ValueError(f"mask must have length C(n,k) = {size}, got {m.shape}")
        if m is self.mask and m.flags.writeable:
            m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "mask", m)

    # construction ---------------------------------------------------------
    @classmethod
    def empty(cls, n: int, k: int) -> "Hypergraph":
        return cls(n, k, np.zeros(comb(n, k), dtype=bool))

    @classmethod
    def complete(cls, n: int, k: int) -> "Hypergraph":
        return cls(n, k, np.ones(comb(n, k), dtype=bool))

    @classmethod
    def from_edges(cls, n: int, k: int, edges: Iterable[Iterable[int]]) -> "Hypergraph":
        mask = np.zeros(comb(n, k), dtype=bool)
        for e in edges:
            e = tuple(sorted(e))
            if len(e) != k or len(set(e)) != k:
                raise ValueError(f"edge {e} is not a {k}-set")
            if e[0] < 0 or e[-1] >= n:
                raise ValueError(f"edge {e} out of range for n={n}")
            mask[rank(e)] = True
        return cls(n, k, mask)

    # queries --------------------------------------------------------------
    def __contains__(self, e) -> bool:
        e = tuple(sorted(e))
        if len(e) != self.k or len(set(e)) != self.k or e[0] < 0 or e[-1] >= self.n:
            return False
        return bool(self.mask[rank(e)])

    def has_edge(self, e: Iterable[int]) -> bool:
        return tuple(e) in self

    def __len__(self) -> int:
        return int(self.mask.sum())

    @property
    def edge_count(self) -> int:
        return len(self)

    def edges(self) -> Iterator[KSet]:
        for r in np.flatnonzero(self.mask):
            yield unrank(int(r), self.k)

    def edge_array(self) -> np.ndarray:
        """Edges as an (m, k) array in colex order."""
        return np.asarray(all_ksubsets(self.n, self.k)[self.mask])

    def tuple_is_edge(self, cols: np.ndarray) -> np.ndarray:
        """Row-wise: do the k entries form (distinct vertices and) an edge?"""
        s, distinct = sorted_distinct(cols)
        out = np.zeros(s.shape[0], dtype=bool)
        if distinct.any():
            out[distinct] = self.mask[rank_array(s[distinct], self.n)]
        return out

    def sorted_is_edge(self, cols: np.ndarray) -> np.ndarray:
        """Like tuple_is_edge, for rows already sorted and distinct."""
        return self.mask[rank_array(cols, self.n)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return self.n == other.n and self.k == other.k and np.array_equal(self.mask, other.mask)

    def __hash__(self):
        return hash((self.n, self.k, self.mask.tobytes()))

    def complement(self) -> "Hypergraph":
        return Hypergraph(self.n, self.k, ~self.mask)

    def density(self) -> float:
        return len(self) / comb(self.n, self.k) if comb(self.n, self.k) else 0.0

    def induced(self, vertices: Iterable[int]) -> "Hypergraph":
        """H[U] relabelled onto range(|U|) in increasing vertex order."""
        vs = sorted(set(vertices))
        sub = all_ksubsets(len(vs), self.k)
        lookup = np.asarray(vs, dtype=np.int64)
        return Hypergraph(len(vs), self.k, self.sorted_is_edge(lookup[sub]) if len(sub) else np.zeros(0, bool))


# ---------------------------------------------------------------------------
# counting kernels
# ---------------------------------------------------------------------------

def induced_edge_count(H: Hypergraph, U: Iterable[int]) -> int:
    """|{e in E(H) : e subset of U}|."""
    vs = sorted(set(U))
    if any(v < 0 or v >= H.n for v in vs):
        raise ValueError("U must be a subset of range(n)")
    if len(vs) < H.k:
        return 0
    sub = all_ksubsets(len(vs), H.k)
    return int(H.sorted_is_edge(np.asarray(vs, dtype=np.int64)[sub]).sum())


def edge_counts_in_ksets(G: Hypergraph, ksets: np.ndarray) -> np.ndarray:
    """For each sorted row T of ``ksets`` (width k >= G.k), the number e_G(T) of G-edges inside T."""
    ksets = np.asarray(ksets, dtype=np.int64)
    width = ksets.shape[1]
    out = np.zeros(ksets.shape[0], dtype=np.int64)
    for pos in combinations(range(width), G.k):
        out += G.sorted_is_edge(ksets[:, list(pos)])
    return out


def induced_count_in_kset(G: Hypergraph, T: Iterable[int]) -> int:
    """e_G(T) = |E(G[T])|."""
    t = sorted(set(T))
    if len(t) < G.k:
        return 0
    return int(edge_counts_in_ksets(G, np.asarray([t], dtype=np.int64))[0])


def cliques(G: Hypergraph, k: int, vertices: Iterable[int] | None = None) -> set[KSet]:
    """All k-sets (within ``vertices`` if given) whose every G.k-subset is an edge."""
    if k < G.k:
        raise ValueError("clique size must be at least the uniformity")
    ksets = _ksets_over(G.n, k, vertices)
    if len(ksets) == 0:
        return set()
    full = edge_counts_in_ksets(G, ksets) == comb(k, G.k)
    return {tuple(int(v) for v in row) for row in ksets[full]}


def _ksets_over(n: int, k: int, vertices: Iterable[int] | None) -> np.ndarray:
    if vertices is None:
        return all_ksubsets(n, k)
    vs = np.asarray(sorted(set(vertices)), dtype=np.int64)
    return vs[all_ksubsets(len(vs), k)]


def complement(G: Hypergraph) -> Hypergraph:
    return G.complement()


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------

def dumps(H: Hypergraph) -> str:
    """``k n m`` header then one sorted edge per line, lines in lexicographic order."""
    edges = sorted(H.edges())
    lines = [f"{H.k} {H.n} {len(edges)}"]
    lines += [" ".join(map(str, e)) for e in edges]
    return "\n".join(lines) + "\n"


def loads(text: str) -> Hypergraph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty hypergraph file")
    k, n, m = (int(x) for x in lines[0].split())
    body = lines[1:]
    if len(body) != m:
        raise ValueError(f"header says {m} edges, found {len(body)}")
    return Hypergraph.from_edges(n, k, (tuple(int(x) for x in ln.split()) for ln in body))


def write_hypergraph(H: Hypergraph, path: str | Path) -> None:
    Path(path).write_text(dumps(H))


def read_hypergraph(path: str | Path) -> Hypergraph:
    return loads(Path(path).read_text())


def dumps_families(families: Sequence[SubsetFamily]) -> str:
    """Concatenated blocks, each with an ``r n m`` header followed by m sorted members."""
    buf = io.StringIO()
    for fam in families:
        members = sorted(fam.members)
        buf.write(f"{fam.arity} {fam.n} {len(members)}\n")
        for m in members:
            buf.write(" ".join(map(str, m)) + "\n")
    return buf.getvalue()


def loads_families(text: str) -> list[SubsetFamily]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    out, i = [], 0
    while i < len(lines):
        r, n, m = (int(x) for x in lines[i].split())
        members = [tuple(int(x) for x in ln.split()) for ln in lines[i + 1 : i + 1 + m]]
        if len(members) != m:
            raise ValueError("truncated family block")
        out.append(SubsetFamily.of(r, n, members))
        i += 1 + m
    return out
