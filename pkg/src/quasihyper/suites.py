"""Randomised exact-identity suites run by ``quasihyper verify``.

Each suite draws small random instances from a seeded generator and returns one Check per
identity, with value = number of instances on which it held and expected = number of instances.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Callable

import numpy as np

from .cdells import (
    VertexKPartition,
    complement_threshold_check,
    ie_counts,
    overcount_identity_check,
    transfer_check,
)
from .devtheory import (
    cauchy_step_check,
    clique_predicate,
    devtoexp_pipeline_check,
    nonnegativity_check,
    subdev_inequality_check,
)
from .hypercore import Hypergraph, SubsetFamily
from .measures import FactoredPredicate, partite_expansion_identity_check
from .reports import Check


def random_hypergraph(rng: np.random.Generator, n: int, k: int, density: float | None = None) -> Hypergraph:
    density = rng.uniform(0.2, 0.8) if density is None else density
    return Hypergraph(n, k, rng.random(comb(n, k)) < density)


def random_family(rng: np.random.Generator, r: int, n: int, vertices, density: float | None = None) -> SubsetFamily:
    density = rng.uniform(0.3, 0.9) if density is None else density
    members = [c for c in itertools.combinations(sorted(vertices), r) if rng.random() < density]
    return SubsetFamily.of(r, n, members)


def random_vertex_partition(rng: np.random.Generator, n: int, k: int) -> VertexKPartition:
    labels = np.concatenate([np.arange(k), rng.integers(0, k, n - k)])
    rng.shuffle(labels)
    return VertexKPartition(tuple(int(x) for x in labels), k)


def random_predicate(rng: np.random.Generator, n: int, k: int, l: int, kind: str) -> FactoredPredicate | None:
    """'all', 'dense' (arbitrary subset of V^k), or 'complete' (intersection of factors complete in
    random doubled coordinates)."""
    if kind == "all":
        return None
    if kind == "dense":
        return FactoredPredicate.from_dense(rng.random((n,) * k) < rng.uniform(0.5, 0.95))
    coords = range(k - l, k)
    chosen = [c for c in coords if rng.random() < 0.6] or [k - 1]
    factors = tuple((c, rng.random((n,) * (k - 1)) < rng.uniform(0.4, 0.95)) for c in chosen)
    return FactoredPredicate(n, k, factors)


@dataclass
class _Tally:
    name: str
    held: int = 0
    trials: int = 0
    first_failure: dict | None = None

    def record(self, ok: bool, **context) -> None:
        self.trials += 1
        if ok:
            self.held += 1
        elif self.first_failure is None:
            self.first_failure = context

    def check(self) -> Check:
        detail = {"first_failure": self.first_failure} if self.first_failure else {}
        return Check(self.name, self.held, self.trials, 0, self.held == self.trials, detail)


def partite_suite(trials: int = 100, n_max: int = 7, seed: int = 0, k: int = 3, t: int = 2) -> list[Check]:
    """t^(n-k) prod|S_i| and t^(n-k) e(S) against their averages over ordered t-partitions."""
    if t != 2 or k < 2:
        raise ValueError("the partite suite draws (k-1, 1) splits with t = 2")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x9A27]))
    size, edges, stirling = (_Tally(f"partite.{x}") for x in ("size", "e", "stirling"))
    for trial in range(trials):
        n = int(rng.integers(k + 1, n_max + 1))
        k1 = int(rng.integers(1, k))
        sizes = (k1, k - k1)
        perm = rng.permutation(n)
        cut = int(rng.integers(sizes[0], n - sizes[1] + 1))
        V = (perm[:cut], perm[cut:])
        S = [random_family(rng, r, n, Vi) for r, Vi in zip(sizes, V)]
        H = random_hypergraph(rng, n, k)
        rep = partite_expansion_identity_check(H, S)
        ctx = dict(trial=trial, n=n, sizes=sizes)
        size.record(rep.size_lhs == rep.size_rhs, **ctx)
        edges.record(rep.e_lhs == rep.e_rhs, **ctx)
        stirling.record(rep.stirling_check, **ctx)
    return [size.check(), edges.check(), stirling.check()]


def cdells_suite(trials: int = 100, n_max: int = 7, seed: int = 0, k: int = 3, l: int = 2) -> list[Check]:
    """Mobius pair, transversal transfer, overcount (literal, binomial-moment, inverted) and the
    complement identity."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xCDE1]))
    top = comb(k, l)
    patterns = [frozenset(c) for c in itertools.combinations(range(k), l)]
    names = ("mobius", "transfer", "overcount.literal", "overcount.moment", "overcount.inverted", "complement")
    tallies = {x: _Tally(f"cdells.{x}") for x in names}
    for trial in range(trials):
        n = int(rng.integers(k, n_max + 1))
        G = random_hypergraph(rng, n, l)
        H = random_hypergraph(rng, n, k)
        P = random_vertex_partition(rng, n, k)
        s = int(rng.integers(1, top))  # leaves room for one more pattern I outside R
        order = rng.permutation(len(patterns))
        R = [patterns[i] for i in order[:s]]
        I = patterns[order[s]]
        ctx = dict(trial=trial, n=n, s=s)

        ie = ie_counts(G, P, H, int(rng.integers(1, top + 1)))
        tallies["mobius"].record(ie.mobius_ok(), **ctx)
        tallies["transfer"].record(transfer_check(G, H, P, R, I).passed, **ctx)
        oc = overcount_identity_check(G, s, k, H)
        tallies["overcount.literal"].record(oc.literal_ok, **ctx, sum_W=oc.sum_W, norm_times_exact=oc.norm * oc.exact_count)
        tallies["overcount.moment"].record(oc.moment_ok, **ctx)
        tallies["overcount.inverted"].record(oc.inversion_ok, **ctx)
        s_c = int(rng.integers(1, top + 1))
        tallies["complement"].record(complement_threshold_check(G, H, s_c).passed, **ctx)
    return [tallies[x].check() for x in names]


def appendix_suite(
    trials: int = 1000, n_max: int = 7, seed: int = 0, k: int = 3, compare_sets: bool = True
) -> list[Check]:
    """Restriction monotonicity, the Cauchy step, non-negativity, and (every tenth instance) the
    clique-pattern Cauchy chain and the dev_0 -> expansion bridge, all in the tuple form.

    With ``compare_sets`` the subdev and Cauchy checks are repeated in the set form and the number
    of instances where that form breaks them is attached to the check details.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xA99E]))
    names = ("subdev", "cauchy", "nonnegative", "cauchy.cliques", "devtoexp")
    tallies = {x: _Tally(f"appendix.{x}") for x in names}
    kinds = ("all", "dense", "complete")
    set_misses = {"subdev": 0, "cauchy": 0}
    for trial in range(trials):
        n = int(rng.integers(max(3, k), n_max + 1))
        l = int(rng.integers(1, k + 1))
        H = random_hypergraph(rng, n, k)
        kind = kinds[trial % 3]
        P = random_predicate(rng, n, k, l, kind)
        i = int(rng.integers(k - l, k))
        Q = FactoredPredicate.complete_in(n, k, i, rng.random((n,) * (k - 1)) < rng.uniform(0.3, 0.9))
        ctx = dict(trial=trial, n=n, l=l, predicate=kind, q_coord=i)
        tallies["subdev"].record(subdev_inequality_check(H, l, P, Q).passed, **ctx)
        tallies["cauchy"].record(cauchy_step_check(H, l, P).passed, **ctx)
        if compare_sets:
            set_misses["subdev"] += not subdev_inequality_check(H, l, P, Q, semantics="set").passed
            set_misses["cauchy"] += not cauchy_step_check(H, l, P, semantics="set").passed
        Pc = random_predicate(rng, n, k, l, "complete")
        tallies["nonnegative"].record(nonnegativity_check(H, l, Pc).passed, **ctx)
        if trial % 10 == 0 and k == 3:
            G = random_hypergraph(rng, n, 2)
            Pk = clique_predicate(G, k, 3)
            ok = all(cauchy_step_check(H, j, Pk).passed for j in (1, 2, 3))
            tallies["cauchy.cliques"].record(ok, **ctx)
            S1 = random_family(rng, 2, n, range(n))
            S2 = random_family(rng, 1, n, range(n))
            tallies["devtoexp"].record(devtoexp_pipeline_check(H, 2, 1, S1, S2).passed, **ctx)
    checks = [tallies[x].check() for x in names]
    if compare_sets:
        for c in checks:
            key = c.name.split(".", 1)[1]
            if key in set_misses:
                c.detail["set_form_violations"] = set_misses[key]
    return checks


SUITES: dict[str, Callable[..., list[Check]]] = {
    "partite": partite_suite,
    "cdells": cdells_suite,
    "appendix": appendix_suite,
}
