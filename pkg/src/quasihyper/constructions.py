"""Seeded samplers for the three separating constructions and their failure witnesses.

All randomness comes from a keyed counter-based hash of (seed, label, subset rank), so a
construction is a pure function of its parameters and nothing is stored but the key.
"""
from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from typing import Sequence

import numpy as np

from .hypercore import (
    Hypergraph,
    RationalDensity,
    SubsetFamily,
    all_ksubsets,
    random_distinct_rows,
    rank_array,
    sorted_distinct,
)
from .partitions import OrderedPartition

def derive_key(seed: int, label: str) -> np.uint64:
    h = hashlib.blake2b(f"{seed}:{label}".encode(), digest_size=8).digest()
    return np.uint64(int.from_bytes(h, "little"))


def _splitmix(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        x = x + np.uint64(0x9E3779B97F4A7C15)
        x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return x ^ (x >> np.uint64(31))


def keyed_words(key: np.uint64, counters: np.ndarray, attempt: int = 0) -> np.ndarray:
    """64-bit pseudorandom words for each counter under ``key``."""
    c = np.asarray(counters, dtype=np.int64).astype(np.uint64)
    with np.errstate(over="ignore"):
        x = _splitmix(c ^ key) + np.uint64(attempt) * np.uint64(0xD1B54A32D192ED03)
        return _splitmix(x ^ (key >> np.uint64(17)))


def keyed_uniform(key: np.uint64, counters: np.ndarray, b: int) -> np.ndarray:
    """Exactly uniform values in range(b) by rejection on the hash words."""
    counters = np.asarray(counters, dtype=np.int64)
    if b == 1:
        return np.zeros(counters.shape, dtype=np.int64)
    rem = 2**64 % b
    limit = None if rem == 0 else np.uint64(2**64 - rem)
    out = np.empty(counters.shape, dtype=np.int64)
    todo = np.ones(counters.shape, dtype=bool)
    attempt = 0
    while todo.any():
        w = keyed_words(key, counters[todo], attempt)
        ok = np.ones(len(w), dtype=bool) if limit is None else w < limit
        vals = (w % np.uint64(b)).astype(np.int64)
        pos = np.flatnonzero(todo.ravel())
        flat = out.reshape(-1)
        flat[pos[ok]] = vals[ok]
        t = todo.reshape(-1)
        t[pos[ok]] = False
        attempt += 1
    return out


@dataclass(frozen=True)
class ModularColoring:
    """Uniform b-coloring of the r-subsets of the vertex set, keyed by (seed, label)."""

    arity: int
    b: int
    seed: int
    label: str

    @cached_property
    def key(self) -> np.uint64:
        return derive_key(self.seed, f"{self.label}/r{self.arity}/b{self.b}")

    def of_ranks(self, ranks: np.ndarray) -> np.ndarray:
        return keyed_uniform(self.key, ranks, self.b)

    def of_sets(self, cols: np.ndarray, n: int) -> np.ndarray:
        """Colors of sorted rows of ``cols``."""
        cols = np.asarray(cols, dtype=np.int64)
        return self.of_ranks(rank_array(cols, max(n, int(cols.max()) + 1 if cols.size else 1)))

    def __call__(self, subset: Sequence[int]) -> int:
        s = np.asarray([sorted(subset)], dtype=np.int64)
        return int(self.of_sets(s, int(s.max()) + 1)[0])


@dataclass(frozen=True)
class HeadOracle:
    """Picks a uniformly random (k-2)-subset of each k-set: the head."""

    k: int
    seed: int
    label: str = "D/head"

    @cached_property
    def _coloring(self) -> ModularColoring:
        return ModularColoring(self.k, comb(self.k, 2), self.seed, self.label)

    @cached_property
    def tails(self) -> np.ndarray:
        """Row j = positions (within the sorted k-set) of the two non-head vertices for choice j."""
        return np.array(list(itertools.combinations(range(self.k), 2)), dtype=np.int64)

    def choice(self, T: np.ndarray, n: int) -> np.ndarray:
        return self._coloring.of_sets(T, n)

    def head(self, T: Sequence[int]) -> tuple[int, ...]:
        T = tuple(sorted(T))
        j = self._coloring(T)
        y, z = self.tails[j]
        return tuple(v for i, v in enumerate(T) if i not in (y, z))


@dataclass(frozen=True, eq=False)
class ConstructionHandle:
    kind: str
    n: int
    k: int
    a: int
    b: int
    seed: int
    l: int | None = None
    pi: OrderedPartition | None = None
    forced_G: bool | None = field(default=None, repr=False)  # test double: fix every G-bit in D

    @property
    def p(self) -> RationalDensity:
        return RationalDensity(self.a, self.b)

    # randomness ---------------------------------------------------------
    @cached_property
    def coloring(self) -> ModularColoring:
        assert self.kind == "A"
        return ModularColoring(self.l, self.b, self.seed, "A/c")

    @cached_property
    def block_colorings(self) -> tuple[ModularColoring, ...]:
        assert self.kind == "B"
        return tuple(ModularColoring(ki, self.b, self.seed, f"B/c{i}") for i, ki in enumerate(self.pi.parts))

    @cached_property
    def G_coloring(self) -> ModularColoring:
        assert self.kind == "D"
        return ModularColoring(self.k - 1, 2, self.seed, "D/G")

    @cached_property
    def heads(self) -> HeadOracle:
        assert self.kind == "D"
        return HeadOracle(self.k, self.seed)

    def G_bits(self, cols: np.ndarray) -> np.ndarray:
        if self.forced_G is not None:
            return np.full(len(cols), self.forced_G, dtype=bool)
        return self.G_coloring.of_sets(cols, self.n) == 1

    # edge rule ------------------------------------------------------------
    def a_color_sum(self, T: np.ndarray) -> np.ndarray:
        """Sum of c over the l-subsets of each sorted row, mod b."""
        tot = np.zeros(len(T), dtype=np.int64)
        for pos in itertools.combinations(range(self.k), self.l):
            tot += self.coloring.of_sets(T[:, list(pos)], self.n)
        return tot % self.b

    def b_color_sum(self, T: np.ndarray) -> np.ndarray:
        tot = np.zeros(len(T), dtype=np.int64)
        start = 0
        for c, ki in zip(self.block_colorings, self.pi.parts):
            tot += c.of_sets(T[:, start : start + ki], self.n)
            start += ki
        return tot % self.b

    @cached_property
    def _head_table(self) -> np.ndarray | None:
        # small vertex sets: precompute every head choice so lookups skip the hash
        if comb(self.n, self.k) > 1 << 22:
            return None
        return self.heads.choice(all_ksubsets(self.n, self.k), self.n)

    def d_parts(self, T: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(head columns (N, k-2), y (N,), z (N,)) for sorted rows T."""
        table = self._head_table
        j = self.heads.choice(T, self.n) if table is None else table[rank_array(T, self.n)]
        tails = self.heads.tails[j]
        rows = np.arange(len(T))
        y = T[rows, tails[:, 0]]
        z = T[rows, tails[:, 1]]
        keep = np.ones(T.shape, dtype=bool)
        keep[rows, tails[:, 0]] = False
        keep[rows, tails[:, 1]] = False
        head = T[keep].reshape(len(T), self.k - 2)
        return head, y, z

    def edge_predicate(self, T: np.ndarray) -> np.ndarray:
        """Vectorised edge test for sorted, distinct rows."""
        T = np.asarray(T, dtype=np.int64)
        if len(T) == 0:
            return np.zeros(0, dtype=bool)
        if self.kind == "A":
            return self.a_color_sum(T) < self.a
        if self.kind == "B":
            return self.b_color_sum(T) < self.a
        head, y, z = self.d_parts(T)
        gy = self.G_bits(np.sort(np.hstack([head, y[:, None]]), axis=1))
        gz = self.G_bits(np.sort(np.hstack([head, z[:, None]]), axis=1))
        return gy == gz

    def is_edge(self, W: Sequence[int]) -> bool:
        s, d = sorted_distinct(np.asarray([list(W)], dtype=np.int64))
        return bool(d[0]) and bool(self.edge_predicate(s)[0])

    @cached_property
    def hypergraph(self) -> Hypergraph:
        T = all_ksubsets(self.n, self.k)
        mask = np.zeros(len(T), dtype=bool)
        step = 1 << 18
        for s in range(0, len(T), step):
            mask[s : s + step] = self.edge_predicate(T[s : s + step])
        return Hypergraph(self.n, self.k, mask)

    def density(self) -> float:
        return self.hypergraph.density()

    def describe(self) -> dict:
        out = {"kind": self.kind, "n": self.n, "k": self.k, "p": f"{self.a}/{self.b}", "seed": self.seed}
        if self.l is not None:
            out["l"] = self.l
        if self.pi is not None:
            out["pi"] = list(self.pi.parts)
        return out


def _check_density(a: int, b: int):
    RationalDensity(a, b)


def sample_A(n: int, k: int, l: int, a: int, b: int, seed: int) -> ConstructionHandle:
    if not 2 <= l <= k - 1:
        raise ValueError("A needs 2 <= l <= k-1")
    _check_density(a, b)
    if n < 0:
        raise ValueError("n must be non-negative")
    return ConstructionHandle("A", n, k, a, b, seed, l=l)


def sample_B(n: int, pi: OrderedPartition | Sequence[int], a: int, b: int, seed: int) -> ConstructionHandle:
    if not isinstance(pi, OrderedPartition):
        pi = OrderedPartition(tuple(pi))
    _check_density(a, b)
    if n < 0:
        raise ValueError("n must be non-negative")
    return ConstructionHandle("B", n, pi.k, a, b, seed, pi=pi)


def sample_D(n: int, k: int, seed: int) -> ConstructionHandle:
    if k < 3:
        raise ValueError("D needs k >= 3")
    if n < 0:
        raise ValueError("n must be non-negative")
    return ConstructionHandle("D", n, k, 1, 2, seed)


# ---------------------------------------------------------------------------
# witnesses
# ---------------------------------------------------------------------------

def color_class_graph(handle: ConstructionHandle, color: int = 0) -> Hypergraph:
    """The l-graph of l-sets receiving ``color`` under A's coloring."""
    if handle.kind != "A":
        raise ValueError("color classes exist only for construction A")
    if not 0 <= color < handle.b:
        raise ValueError("color out of range")
    Z = all_ksubsets(handle.n, handle.l)
    return Hypergraph(handle.n, handle.l, handle.coloring.of_sets(Z, handle.n) == color if len(Z) else np.zeros(0, bool))


def witness_cd_from_A(handle: ConstructionHandle) -> Hypergraph:
    """Zero-colored l-sets: each of its k-cliques has color sum 0 < a, hence is an edge."""
    return color_class_graph(handle, 0)


def almost_equal_parts(n: int, t: int) -> list[range]:
    """Consecutive intervals; the first n mod t get size ceil(n/t)."""
    q, r = divmod(n, t)
    out, start = [], 0
    for i in range(t):
        size = q + (1 if i < r else 0)
        out.append(range(start, start + size))
        start += size
    return out


def witness_expand_from_B(handle: ConstructionHandle) -> list[SubsetFamily]:
    """S_i = k_i-sets of the i-th interval colored 0 (colored a for the last block)."""
    if handle.kind != "B":
        raise ValueError("expansion witness exists only for construction B")
    t = handle.pi.t
    out = []
    for i, (X, ki, c) in enumerate(zip(almost_equal_parts(handle.n, t), handle.pi.parts, handle.block_colorings)):
        want = handle.a if i == t - 1 else 0
        vs = np.asarray(list(X), dtype=np.int64)
        if len(vs) < ki:
            out.append(SubsetFamily(ki, handle.n, frozenset()))
            continue
        cand = vs[all_ksubsets(len(vs), ki)]
        keep = cand[c.of_sets(cand, handle.n) == want]
        out.append(SubsetFamily(ki, handle.n, frozenset(tuple(int(v) for v in row) for row in keep)))
    return out


# ---------------------------------------------------------------------------
# parity censuses
# ---------------------------------------------------------------------------

CENSUS_FILTERS = ("A", "B", "B1", "B2", "D")


@dataclass(frozen=True)
class CensusReport:
    case_filter: str
    mode: str
    l: int
    examined: int
    even: int
    odd: int
    first_odd: tuple[int, ...] | None = None

    @property
    def passed(self) -> bool:
        return self.odd == 0 and self.examined > 0

    def to_json(self) -> dict:
        return {
            "filter": self.case_filter,
            "mode": self.mode,
            "l": self.l,
            "examined": self.examined,
            "even": self.even,
            "odd": self.odd,
            "first_odd": list(self.first_odd) if self.first_odd else None,
        }


def _census_level(handle: ConstructionHandle, case_filter: str, l: int | None) -> int:
    if case_filter == "A":
        if handle.kind != "A":
            raise ValueError("filter A needs construction A")
        want = handle.l + 1
    elif case_filter in ("B", "B1", "B2"):
        if handle.kind != "B" or handle.pi.parts != (handle.k - 1, 1):
            raise ValueError("filters B/B1/B2 need construction B with pi = (k-1, 1)")
        want = 2
    elif case_filter == "D":
        if handle.kind != "D":
            raise ValueError("filter D needs construction D")
        want = 2
    else:
        raise ValueError(f"unknown census filter {case_filter!r}; choose from {CENSUS_FILTERS}")
    if l is not None and l != want:
        raise ValueError(f"filter {case_filter} is defined at level {want}")
    if want > handle.k:
        raise ValueError("level exceeds k")
    return want


def census_filter_mask(handle: ConstructionHandle, rows: np.ndarray, l: int, case_filter: str) -> np.ndarray:
    """Which rows (x singles then pairs, all distinct) belong to the filtered class."""
    k = handle.k
    if case_filter == "A":
        return np.ones(len(rows), dtype=bool)
    s = k - l
    others = rows[:, : s + 2]  # singles and the y pair
    if case_filter in ("B", "B1", "B2"):
        z = rows[:, s + 2 : s + 4]
        y = rows[:, s : s + 2]
        xs = rows[:, :s]
        z_last = z.min(axis=1) > np.max(others, axis=1)
        rest_y = np.hstack([xs, z])
        y_last = y.min(axis=1) > np.max(rest_y, axis=1)
        if case_filter == "B1":
            return z_last
        if case_filter == "B2":
            return y_last
        return z_last | y_last
    # D: the singles must be the head of each of the four choice tuples
    xs = np.sort(rows[:, :s], axis=1)
    ok = np.ones(len(rows), dtype=bool)
    for yi in (s, s + 1):
        for zi in (s + 2, s + 3):
            live = np.flatnonzero(ok)  # short-circuit: only rows still in the class
            if not len(live):
                return ok
            T = np.sort(np.hstack([xs[live], rows[live][:, [yi, zi]]]), axis=1)
            head, _, _ = handle.d_parts(T)
            ok[live] = (np.sort(head, axis=1) == xs[live]).all(axis=1)
    return ok


def _rows_parity(H: Hypergraph, rows: np.ndarray, l: int) -> np.ndarray:
    from .measures import octahedron_eta_rows

    return octahedron_eta_rows(H, rows, l, "tuple")


def _distinct_rows_exhaustive(n: int, width: int, chunk: int = 1 << 15):
    perms = np.array(list(itertools.permutations(range(width))), dtype=np.int64)
    combos = all_ksubsets(n, width)
    step = max(1, chunk // len(perms))
    for s in range(0, len(combos), step):
        c = combos[s : s + step]
        yield c[:, perms].reshape(-1, width)


def octahedron_parity_census(
    handle: ConstructionHandle,
    l: int | None = None,
    case_filter: str | None = None,
    mode: str = "exhaustive",
    samples: int = 10**6,
    seed: int = 0,
) -> CensusReport:
    """Count even/odd distinct-vertex octahedra of the filtered class.

    Exhaustive mode enumerates every ordered placement on distinct vertices; sampled mode draws
    placements uniformly and keeps those in the class until ``samples`` have been examined.
    """
    case_filter = case_filter or handle.kind
    l = _census_level(handle, case_filter, l)
    H = handle.hypergraph
    width = handle.k + l
    if width > handle.n:
        return CensusReport(case_filter, mode, l, 0, 0, 0)
    even = odd = examined = 0
    first = None

    def tally(rows):
        nonlocal even, odd, examined, first
        if not len(rows):
            return
        eta = _rows_parity(H, rows, l)
        o = int((eta < 0).sum())
        if o and first is None:
            first = tuple(int(v) for v in rows[np.flatnonzero(eta < 0)[0]])
        odd += o
        even += len(rows) - o
        examined += len(rows)

    if mode == "exhaustive":
        for rows in _distinct_rows_exhaustive(handle.n, width):
            tally(rows[census_filter_mask(handle, rows, l, case_filter)])
    elif mode == "sampled":
        rng = np.random.default_rng(np.random.SeedSequence([seed, 0xCE45]))
        while examined < samples:
            rows = random_distinct_rows(rng, handle.n, width, 1 << 18)
            rows = rows[census_filter_mask(handle, rows, l, case_filter)]
            tally(rows[: samples - examined])
    else:
        raise ValueError("mode must be 'exhaustive' or 'sampled'")
    return CensusReport(case_filter, mode, l, examined, even, odd, first)
