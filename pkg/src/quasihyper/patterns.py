"""pi-linear certificates, the 4-cycle patterns C_{pi,4}, and labeled-copy counting."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import perm
from typing import Sequence

import numpy as np

from .hypercore import Hypergraph, random_distinct_rows, rank_array, sorted_distinct
from .measures import EnumerationTooLarge, MeasureConfig
from .partitions import Partition

MAX_CERT_EDGES = 12
MAX_CERT_VERTICES = 24


@dataclass(frozen=True)
class PatternHypergraph:
    v: int
    k: int
    edges: tuple[tuple[int, ...], ...]
    groups: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        edges = tuple(tuple(sorted(e)) for e in self.edges)
        for e in edges:
            if len(e) != self.k or len(set(e)) != self.k:
                raise ValueError(f"edge {e} is not a {self.k}-set")
            if e[0] < 0 or e[-1] >= self.v:
                raise ValueError(f"edge {e} out of range")
        if len(set(edges)) != len(edges):
            raise ValueError("duplicate edges")
        object.__setattr__(self, "edges", edges)

    @property
    def m(self) -> int:
        return len(self.edges)

    @classmethod
    def from_hypergraph(cls, H: Hypergraph) -> "PatternHypergraph":
        return cls(H.n, H.k, tuple(H.edges()))

    def relabel(self, perm_: Sequence[int]) -> "PatternHypergraph":
        return PatternHypergraph(self.v, self.k, tuple(tuple(perm_[x] for x in e) for e in self.edges))

    def with_edge(self, e: Sequence[int]) -> "PatternHypergraph":
        return PatternHypergraph(self.v, self.k, self.edges + (tuple(e),))


@dataclass(frozen=True)
class PiLinearCertificate:
    pi: Partition
    order: tuple[tuple[int, ...], ...]  # edges E_1..E_m
    parts: tuple[tuple[frozenset, ...], ...]  # parts[i][s] = A_{i,s}, |A_{i,s}| = pi.parts[s]

    def to_json(self) -> dict:
        return {
            "pi": list(self.pi.parts),
            "order": [list(e) for e in self.order],
            "parts": [[sorted(a) for a in row] for row in self.parts],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def verify_certificate(F: PatternHypergraph, cert: PiLinearCertificate) -> bool:
    """Check a certificate against the raw definition, independently of the search."""
    if sorted(cert.order) != sorted(F.edges) or len(cert.parts) != len(cert.order):
        return False
    for i, (E, parts) in enumerate(zip(cert.order, cert.parts)):
        if len(parts) != cert.pi.t:
            return False
        if tuple(len(a) for a in parts) != cert.pi.parts:
            return False
        if frozenset().union(*parts) != frozenset(E) or sum(len(a) for a in parts) != len(E):
            return False
        for Ej in cert.order[:i]:
            inter = set(Ej) & set(E)
            if not any(inter <= a for a in parts):
                return False
    return True


def _split_edge(E: Sequence[int], blocks_from: Sequence[set], pi: Partition):
    """Split E into parts of sizes pi.parts with each given intersection inside one part."""
    # vertices tied together by a common intersection must share a part
    parent = {v: v for v in E}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for inter in blocks_from:
        inter = list(inter)
        for v in inter[1:]:
            parent[find(v)] = find(inter[0])
    comps: dict[int, list[int]] = {}
    for v in E:
        comps.setdefault(find(v), []).append(v)
    blocks = sorted(comps.values(), key=lambda b: (-len(b), b))
    sizes = list(pi.parts)
    assign: list[list[int]] = [[] for _ in sizes]
    cap = list(sizes)

    def place(i):
        if i == len(blocks):
            return all(c == 0 for c in cap)
        b = blocks[i]
        seen = set()
        for s in range(len(cap)):  # parts are sorted descending: largest first
            key = (cap[s], sizes[s])
            if cap[s] < len(b) or key in seen:
                continue
            seen.add(key)
            cap[s] -= len(b)
            assign[s].extend(b)
            if place(i + 1):
                return True
            del assign[s][-len(b) :]
            cap[s] += len(b)
        return False

    if not place(0):
        return None
    return tuple(frozenset(a) for a in assign)


def pi_linear_certificate(F: PatternHypergraph, pi: Partition) -> PiLinearCertificate | None:
    """Find an edge ordering and part split witnessing pi-linearity, or None if none exists.

    Whether an edge can come last depends only on the set of edges before it, and adding earlier
    edges only adds constraints. So the ordering is built from the back: any edge that can be
    split against all remaining edges may be placed last, and if none can, no ordering exists.
    """
    if pi.k != F.k:
        raise ValueError("partition must be of the uniformity")
    if F.m > MAX_CERT_EDGES or F.v > MAX_CERT_VERTICES:
        raise ValueError(f"pattern too large for certificate search (m <= {MAX_CERT_EDGES}, v <= {MAX_CERT_VERTICES})")
    remaining = sorted(F.edges, key=lambda e: (-sum(_degree(F, x) for x in e), e))
    back: list[tuple[tuple[int, ...], tuple[frozenset, ...]]] = []
    while remaining:
        for idx, E in enumerate(remaining):
            others = [set(E) & set(o) for o in remaining if o != E]
            split = _split_edge(E, [s for s in others if s], pi)
            if split is not None:
                back.append((E, split))
                remaining.pop(idx)
                break
        else:
            return None
    back.reverse()
    cert = PiLinearCertificate(pi, tuple(e for e, _ in back), tuple(p for _, p in back))
    assert verify_certificate(F, cert)
    return cert


def _degree(F: PatternHypergraph, x: int) -> int:
    return sum(1 for e in F.edges if x in e)


def build_cycle(k1: int, k2: int) -> PatternHypergraph:
    """C_{(k1,k2),4}: groups X1, X2 of size k1 and Y1, Y2 of size k2, edges X_i | Y_j."""
    if k1 < 1 or k2 < 1:
        raise ValueError("part sizes must be positive")
    X1 = tuple(range(0, k1))
    X2 = tuple(range(k1, 2 * k1))
    Y1 = tuple(range(2 * k1, 2 * k1 + k2))
    Y2 = tuple(range(2 * k1 + k2, 2 * k1 + 2 * k2))
    edges = tuple(X + Y for X in (X1, X2) for Y in (Y1, Y2))
    return PatternHypergraph(2 * (k1 + k2), k1 + k2, edges, {"X1": X1, "X2": X2, "Y1": Y1, "Y2": Y2})


# ---------------------------------------------------------------------------
# labeled copies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CountResult:
    value: float | int
    mode: str
    standard_error: float | None = None
    samples: int | None = None
    successes: int | None = None

    def to_json(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}


def _edge_ok(H: Hypergraph, images: np.ndarray) -> np.ndarray:
    s, d = sorted_distinct(images)
    out = np.zeros(len(images), dtype=bool)
    if d.any():
        out[d] = H.mask[rank_array(s[d], H.n)]
    return out


def count_labeled(F: PatternHypergraph, H: Hypergraph, cfg: MeasureConfig = MeasureConfig()) -> CountResult:
    """Edge-preserving injections V(F) -> V(H) (non-edges of F unconstrained)."""
    if F.k != H.k:
        raise ValueError("pattern and host must have the same uniformity")
    n, v = H.n, F.v
    if v > n:
        return CountResult(0, cfg.mode)
    edges = np.asarray(F.edges, dtype=np.int64).reshape(-1, F.k)
    if cfg.mode == "exact":
        if n**v > cfg.exact_threshold:
            raise EnumerationTooLarge(f"n^v = {n**v} exceeds exact_threshold; use sampled mode")
        # extend partial injections one pattern vertex at a time, checking edges as they close
        closes = [[j for j, e in enumerate(F.edges) if max(e) == i] for i in range(v)]
        partial = np.zeros((1, 0), dtype=np.int64)
        for i in range(v):
            m = len(partial)
            cand = np.repeat(partial, n, axis=0)
            newcol = np.tile(np.arange(n, dtype=np.int64), m)[:, None]
            ok = ~(cand == newcol).any(axis=1)
            partial = np.hstack([cand[ok], newcol[ok]])
            for j in closes[i]:
                partial = partial[_edge_ok(H, partial[:, list(edges[j])])]
        return CountResult(len(partial), "exact")

    rng = cfg.rng(0xC0, v)
    hits, done = 0, 0
    while done < cfg.sample_count:
        m = min(cfg.chunk * 4, cfg.sample_count - done)
        rows = random_distinct_rows(rng, n, v, m)
        ok = np.ones(m, dtype=bool)
        for e in edges:
            live = np.flatnonzero(ok)  # early abort: later edges only for survivors
            ok[live] = _edge_ok(H, rows[live][:, e])
        hits += int(ok.sum())
        done += m
    falling = perm(n, v)
    phat = hits / done
    se = (phat * (1 - phat) / max(1, done - 1)) ** 0.5
    return CountResult(phat * falling, "sampled", se * falling, done, hits)
