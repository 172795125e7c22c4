"""Proper partitions of k, refinement witnesses, and the implication poset of properties."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence


@dataclass(frozen=True, order=True)
class Partition:
    """Unordered proper partition of k, parts sorted descending."""

    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(sorted((int(x) for x in self.parts), reverse=True))
        if len(parts) < 2:
            raise ValueError("a proper partition needs at least two parts")
        if any(x < 1 for x in parts):
            raise ValueError("parts must be positive")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def of(cls, *parts: int) -> "Partition":
        return cls(tuple(parts))

    @classmethod
    def parse(cls, text: str) -> "Partition":
        return cls(tuple(int(x) for x in text.replace("(", "").replace(")", "").split(",") if x.strip()))

    @property
    def k(self) -> int:
        return sum(self.parts)

    @property
    def t(self) -> int:
        return len(self.parts)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.parts)) + ")"


@dataclass(frozen=True)
class OrderedPartition:
    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(x) for x in self.parts)
        if len(parts) < 2:
            raise ValueError("a proper ordered partition needs at least two parts")
        if any(x < 1 for x in parts):
            raise ValueError("parts must be positive")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def parse(cls, text: str) -> "OrderedPartition":
        return cls(tuple(int(x) for x in text.replace("(", "").replace(")", "").split(",") if x.strip()))

    @property
    def k(self) -> int:
        return sum(self.parts)

    @property
    def t(self) -> int:
        return len(self.parts)

    def unordered(self) -> Partition:
        return Partition(self.parts)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.parts)) + ")"


@dataclass(frozen=True)
class RefinementWitness:
    """phi[j] is the coarse index receiving fine part j."""

    fine: Partition
    coarse: Partition
    phi: tuple[int, ...]

    def verify(self) -> bool:
        if len(self.phi) != self.fine.t or set(self.phi) != set(range(self.coarse.t)):
            return False
        sums = [0] * self.coarse.t
        for j, i in enumerate(self.phi):
            sums[i] += self.fine.parts[j]
        return tuple(sums) == self.coarse.parts


def is_refinement(fine: Partition, coarse: Partition) -> RefinementWitness | None:
    """Surjection grouping ``fine`` parts into ``coarse`` parts, or None if fine is not below coarse."""
    if fine.k != coarse.k:
        raise ValueError(f"partitions of different integers: {fine.k} vs {coarse.k}")
    phi = _assign(fine.parts, coarse.parts)
    if phi is None:
        return None
    w = RefinementWitness(fine, coarse, phi)
    assert w.verify()
    return w


@lru_cache(maxsize=None)
def _assign(fine: tuple[int, ...], remaining: tuple[int, ...]) -> tuple[int, ...] | None:
    # place fine parts (descending) one at a time into coarse bins with remaining capacity
    if not fine:
        return () if all(r == 0 for r in remaining) else None
    head, rest = fine[0], fine[1:]
    if sum(fine) != sum(remaining):
        return None
    tried = set()
    for i, cap in enumerate(remaining):
        if cap < head or cap in tried:
            continue
        tried.add(cap)  # bins with equal capacity are interchangeable
        nxt = remaining[:i] + (cap - head,) + remaining[i + 1 :]
        sub = _assign(rest, nxt)
        if sub is not None:
            return (i,) + sub
    return None


def refines(fine: Partition, coarse: Partition) -> bool:
    return is_refinement(fine, coarse) is not None


def _integer_partitions(k: int, max_part: int | None = None) -> Iterable[tuple[int, ...]]:
    max_part = k if max_part is None else max_part
    if k == 0:
        yield ()
        return
    for first in range(min(k, max_part), 0, -1):
        for rest in _integer_partitions(k - first, first):
            yield (first,) + rest


def enumerate_partitions(k: int) -> list[Partition]:
    """All proper partitions of k, descending lexicographic."""
    if k < 2:
        raise ValueError("k must be at least 2")
    return [Partition(p) for p in _integer_partitions(k) if len(p) >= 2]


def enumerate_ordered_partitions(k: int) -> list[OrderedPartition]:
    out = []

    def rec(left, acc):
        if left == 0:
            if len(acc) >= 2:
                out.append(OrderedPartition(tuple(acc)))
            return
        for x in range(1, left + 1):
            rec(left - x, acc + [x])

    rec(k, [])
    return out


# ---------------------------------------------------------------------------
# property poset
# ---------------------------------------------------------------------------

_KIND_ORDER = {"Disc": 0, "CD": 1, "Expand": 2, "Dev": 3}


@dataclass(frozen=True)
class PropertyNode:
    kind: str
    parameter: object = None  # Partition for Expand, int for CD / Dev, None for Disc

    def __post_init__(self):
        if self.kind not in _KIND_ORDER:
            raise ValueError(f"unknown property kind {self.kind!r}")

    @property
    def label(self) -> str:
        if self.kind == "Disc":
            return "Disc"
        if self.kind == "Expand":
            return f"Expand{self.parameter}"
        return f"{self.kind}({self.parameter})"

    def sort_key(self):
        p = self.parameter
        if isinstance(p, Partition):
            p = p.parts
        elif p is None:
            p = ()
        else:
            p = (p,)
        return (_KIND_ORDER[self.kind], p)

    def to_json(self) -> dict:
        p = self.parameter
        return {
            "label": self.label,
            "kind": self.kind,
            "parameter": list(p.parts) if isinstance(p, Partition) else p,
        }


@dataclass
class PropertyPoset:
    k: int
    nodes: list[PropertyNode]
    classes: list[tuple[PropertyNode, ...]]  # each class sorted, classes sorted by label
    hasse: list[tuple[str, str]]  # (stronger class label, weaker class label)
    implications: set[tuple[PropertyNode, PropertyNode]] = field(default_factory=set, repr=False)

    @staticmethod
    def class_label(cls_: Sequence[PropertyNode]) -> str:
        return " <=> ".join(n.label for n in cls_)

    @property
    def class_labels(self) -> list[str]:
        return [self.class_label(c) for c in self.classes]

    def class_of(self, node: PropertyNode) -> str:
        for c in self.classes:
            if node in c:
                return self.class_label(c)
        raise KeyError(node)

    def implies(self, a: PropertyNode, b: PropertyNode) -> bool:
        """Whether a implies b under the reflexive-transitive closure."""
        return a == b or (a, b) in self.implications

    def bottom(self) -> str:
        targets = {b for _, b in self.hasse}
        sources = {a for a, _ in self.hasse}
        sinks = [c for c in self.class_labels if c not in sources and (c in targets or len(self.classes) == 1)]
        if len(sinks) != 1:
            raise ValueError("poset has no unique bottom")
        return sinks[0]

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "nodes": [n.to_json() for n in sorted(self.nodes, key=PropertyNode.sort_key)],
            "edges": [{"from": a, "to": b} for a, b in self.hasse],
            "equivalences": [[n.label for n in c] for c in self.classes if len(c) > 1],
            "classes": [[n.label for n in c] for c in self.classes],
        }

    def dumps_json(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


def base_implications(k: int) -> tuple[list[PropertyNode], set[tuple[PropertyNode, PropertyNode]]]:
    """Nodes and the generating implication edges (a, b) meaning a implies b."""
    parts = enumerate_partitions(k)
    expand = [PropertyNode("Expand", p) for p in parts]
    cd = [PropertyNode("CD", l) for l in range(1, k)]
    dev = [PropertyNode("Dev", l) for l in range(2, k + 1)]
    disc = PropertyNode("Disc")
    nodes = [disc] + cd + expand + dev
    E: set[tuple[PropertyNode, PropertyNode]] = set()

    def both(a, b):
        E.add((a, b))
        E.add((b, a))

    # equivalences
    both(disc, PropertyNode("CD", 1))
    both(disc, PropertyNode("Expand", Partition((1,) * k)))
    both(PropertyNode("CD", k - 1), PropertyNode("Dev", k))

    for a in expand:
        for b in expand:
            if a != b and refines(b.parameter, a.parameter):
                E.add((a, b))
    for l in range(2, k):
        E.add((PropertyNode("CD", l), PropertyNode("CD", l - 1)))
    for l in range(3, k + 1):
        E.add((PropertyNode("Dev", l), PropertyNode("Dev", l - 1)))
    for c in cd:
        for e in expand:
            if max(e.parameter.parts) <= c.parameter:
                E.add((c, e))
    for d in dev:
        E.add((d, PropertyNode("CD", d.parameter - 1)))
        for e in expand:
            E.add((d, e))
    return nodes, E


def _closure(nodes, E):
    idx = {v: i for i, v in enumerate(nodes)}
    N = len(nodes)
    reach = [[False] * N for _ in range(N)]
    for a, b in E:
        reach[idx[a]][idx[b]] = True
    for m in range(N):
        rm = reach[m]
        for i in range(N):
            if reach[i][m]:
                ri = reach[i]
                for j in range(N):
                    if rm[j]:
                        ri[j] = True
    return reach


def build_property_poset(k: int) -> PropertyPoset:
    if k < 3:
        raise ValueError("the property poset is defined for k >= 3")
    nodes, E = base_implications(k)
    reach = _closure(nodes, E)
    N = len(nodes)

    # equivalence classes: mutual reachability
    cls_index = [-1] * N
    classes: list[list[int]] = []
    for i in range(N):
        if cls_index[i] >= 0:
            continue
        members = [j for j in range(N) if j == i or (reach[i][j] and reach[j][i])]
        for j in members:
            cls_index[j] = len(classes)
        classes.append(members)

    C = len(classes)
    creach = [[False] * C for _ in range(C)]
    for i in range(N):
        for j in range(N):
            if reach[i][j] and cls_index[i] != cls_index[j]:
                creach[cls_index[i]][cls_index[j]] = True

    # Hasse reduction: drop a->b when some c has a->c->b
    hasse_idx = []
    for a in range(C):
        for b in range(C):
            if creach[a][b] and not any(creach[a][c] and creach[c][b] for c in range(C) if c not in (a, b)):
                hasse_idx.append((a, b))

    sorted_classes = [tuple(sorted((nodes[j] for j in m), key=PropertyNode.sort_key)) for m in classes]
    labels = [PropertyPoset.class_label(c) for c in sorted_classes]
    order = sorted(range(C), key=lambda c: labels[c])
    hasse = sorted((labels[a], labels[b]) for a, b in hasse_idx)
    implications = {(nodes[i], nodes[j]) for i in range(N) for j in range(N) if reach[i][j]}
    return PropertyPoset(
        k=k,
        nodes=sorted(nodes, key=PropertyNode.sort_key),
        classes=[sorted_classes[c] for c in order],
        hasse=hasse,
        implications=implications,
    )


def _dot_id(label: str) -> str:
    return '"' + label.replace('"', r"\"") + '"'


def export_dot(poset: PropertyPoset | None) -> str:
    """Deterministic DOT digraph of the Hasse diagram; edges point from stronger to weaker."""
    lines = ["digraph properties {", "  rankdir=TB;"]
    if poset is not None:
        for label in sorted(poset.class_labels):
            lines.append(f"  {_dot_id(label)};")
        for a, b in sorted(poset.hasse):
            lines.append(f"  {_dot_id(a)} -> {_dot_id(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
