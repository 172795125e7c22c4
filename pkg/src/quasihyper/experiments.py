"""Named separation experiments: sample a construction, extract its witness, measure the property it
keeps and the one it loses, and compare against pinned thresholds."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import comb, factorial, perm, prod
from typing import Callable

from .constructions import (
    ConstructionHandle,
    color_class_graph,
    octahedron_parity_census,
    sample_A,
    sample_B,
    sample_D,
    witness_cd_from_A,
    witness_expand_from_B,
)
from .hypercore import RationalDensity
from .measures import MeasureConfig, cd_threshold_defect, deviation, expansion_count
from .partitions import OrderedPartition
from .patterns import build_cycle, count_labeled
from .reports import Check, at_least, at_most, equals, within

BIG = MeasureConfig(exact_threshold=2**40)


@dataclass(frozen=True)
class LemmaParams:
    n: int = 60
    k: int = 3
    l: int = 2
    pi: tuple[int, ...] = (2, 1)
    p: RationalDensity = RationalDensity(1, 2)
    seed: int = 0
    mode: str = "auto"  # census / count mode: auto, exhaustive|exact, sampled
    samples: int = 10**6

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "l": self.l,
            "pi": list(self.pi),
            "p": str(self.p),
            "seed": self.seed,
            "mode": self.mode,
            "samples": self.samples,
        }


@dataclass(frozen=True)
class Lemma:
    name: str
    summary: str
    run: Callable[[LemmaParams], list[Check]]
    defaults: dict = field(default_factory=dict)
    needs: tuple[str, ...] = ()  # which of k, l, pi, p the lemma reads

    def params(self, **overrides) -> LemmaParams:
        base = replace(LemmaParams(), **self.defaults)
        return replace(base, **{k: v for k, v in overrides.items() if v is not None})


# ---------------------------------------------------------------------------

def _A(P: LemmaParams) -> ConstructionHandle:
    return sample_A(P.n, P.k, P.l, P.p.a, P.p.b, P.seed)


def _B(P: LemmaParams) -> ConstructionHandle:
    if sum(P.pi) != P.k:
        raise ValueError("pi must sum to k")
    return sample_B(P.n, OrderedPartition(P.pi), P.p.a, P.p.b, P.seed)


def _D(P: LemmaParams) -> ConstructionHandle:
    return sample_D(P.n, P.k, P.seed)


def _density(h: ConstructionHandle, tol: float = 0.02) -> Check:
    return within(f"{h.kind}.density", h.density(), float(h.p.value), tol)


def _census(h: ConstructionHandle, P: LemmaParams, case_filter: str, l: int | None = None) -> Check:
    mode = P.mode
    if mode in ("auto", "exact"):
        mode = "exhaustive" if P.n <= 12 else "sampled"
    rep = octahedron_parity_census(h, l=l, case_filter=case_filter, mode=mode, samples=P.samples, seed=P.seed)
    return Check(
        f"{case_filter}.census.odd",
        rep.odd,
        0,
        0,
        rep.passed,
        {"examined": rep.examined, "level": rep.l, "mode": rep.mode, "first_odd": rep.first_odd},
    )


def _cycle(h: ConstructionHandle, P: LemmaParams) -> Check:
    F = build_cycle(*P.pi)
    if P.mode == "exact":
        res = count_labeled(F, h.hypergraph, BIG)
    else:
        res = count_labeled(F, h.hypergraph, MeasureConfig("sampled", P.samples, seed=P.seed))
    p = float(h.p.value)
    target = p**F.m * perm(P.n, F.v)
    c = within(f"{h.kind}.cycle.count", float(res.value), target, 0.05, relative=True)
    c.detail = {
        "mode": res.mode,
        "standard_error": res.standard_error,
        "ratio_to_p4_falling": float(res.value) / target,
        "ratio_to_p4_n6": float(res.value) / (p**F.m * P.n**F.v),
    }
    return c


def _dev_floor(h: ConstructionHandle, l: int, c: float) -> Check:
    d = deviation(h.hypergraph, l, None, BIG)
    return at_least(f"{h.kind}.dev{l}", int(d.value), c * h.n ** (h.k + l), normalized=d.normalized)


# ---------------------------------------------------------------------------

def a_fails_cd(P: LemmaParams) -> list[Check]:
    h = _A(P)
    G = witness_cd_from_A(h)
    res = cd_threshold_defect(h.hypergraph, G, comb(P.k, P.l), h.p)
    expected = (1 - h.p.value) * h.b ** (-comb(P.k, P.l)) * comb(P.n, P.k)
    return [
        _density(h),
        equals("A.cd.cliques_are_edges", res.hits, res.total),
        at_least("A.cd.defect", res.defect, expected / 2, expected=float(expected), cliques=res.total),
    ]


def a_fails_dev(P: LemmaParams) -> list[Check]:
    h = _A(P)
    return [_density(h), _census(h, P, "A")]


def a_satisfies_dev(P: LemmaParams) -> list[Check]:
    h = _A(P)
    d = deviation(h.hypergraph, P.l, None, BIG)
    return [at_most(f"A.dev{P.l}", int(d.value), 0.05 * P.n ** (P.k + P.l), normalized=d.normalized)]


def a_satisfies_expand(P: LemmaParams) -> list[Check]:
    h = _A(P)
    return [_density(h), _cycle(h, P)]


def b_fails_expand(P: LemmaParams) -> list[Check]:
    h = _B(P)
    S = witness_expand_from_B(h)
    e = expansion_count(h.hypergraph, S)
    sizes = [len(f) for f in S]
    defect = h.p.value * prod(sizes)
    t = len(P.pi)
    multinomial = factorial(P.k) // prod(factorial(x) for x in P.pi)
    target = multinomial * h.p.value / (h.b**t * t**P.k) * comb(P.n, P.k)
    return [
        _density(h),
        equals("B.expand.e", e, 0, sizes=sizes),
        within("B.expand.defect", float(defect), float(target), 0.10, relative=True),
    ]


def b_fails_dev(P: LemmaParams) -> list[Check]:
    h = _B(P)
    return [_density(h), _census(h, P, "B1"), _census(h, P, "B2"), _dev_floor(h, 2, 2.0**-8)]


def d_fails_dev(P: LemmaParams) -> list[Check]:
    h = _D(P)
    return [_density(h), _census(h, P, "D"), _dev_floor(h, 2, 2.0**-8)]


def d_satisfies_expand(P: LemmaParams) -> list[Check]:
    h = _D(P)
    return [_density(h), _cycle(h, P)]


def dev_not_imp_cdells(P: LemmaParams) -> list[Check]:
    """A_2 at k = 3 against the color-1 graph: triples with >= 2 color-1 pairs are edges 3/4 of the time."""
    h = _A(P)
    G = color_class_graph(h, 1)
    res = cd_threshold_defect(h.hypergraph, G, 2, h.p)
    N = comb(P.n, P.k)
    return [
        within("A.cd2.total_fraction", res.total / N, 0.5, 0.02),
        within("A.cd2.hit_rate", res.hits / max(1, res.total), 0.75, 0.02),
        within("A.cd2.defect_fraction", float(res.defect) / max(1, res.total), 0.25, 0.02),
    ]


LEMMAS: dict[str, Lemma] = {
    x.name: x
    for x in (
        Lemma("A-fails-CD", "zero-color l-graph: all its k-cliques are A-edges", a_fails_cd, {}, ("k", "l", "p")),
        Lemma("A-fails-dev", "no odd octahedra at level l+1", a_fails_dev, {"n": 12}, ("k", "l", "p")),
        Lemma("A-satisfies-dev", "dev_l(A_l) is small", a_satisfies_dev, {"n": 30}, ("k", "l", "p")),
        Lemma("A-satisfies-expand", "cycle counts of A_l match p^4 (n)_v", a_satisfies_expand, {"n": 40}, ("k", "l", "pi", "p")),
        Lemma("B-fails-expand", "interval families with e(S) = 0", b_fails_expand, {}, ("pi", "p")),
        Lemma("B-fails-dev", "Case-1/2 octahedra all even; dev_2 bounded below", b_fails_dev, {"n": 30}, ("pi", "p")),
        Lemma("D-fails-dev", "Case-1 octahedra all even; dev_2 bounded below", d_fails_dev, {"n": 30}, ("k",)),
        Lemma("D-satisfies-expand", "cycle counts of D match p^4 (n)_v", d_satisfies_expand, {"n": 40}, ("k", "pi")),
        Lemma("dev-not-imp-cdells", "A_2 satisfies Dev(2) but misses CD(2,2)", dev_not_imp_cdells, {}, ()),
    )
}


def run_lemma(name: str, **overrides) -> tuple[LemmaParams, list[Check]]:
    lemma = LEMMAS[name]
    params = lemma.params(**overrides)
    return params, lemma.run(params)
