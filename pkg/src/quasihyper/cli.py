"""Command-line driver: sample, measure, separate, poset, verify, census.

Exit status is 0 when every declared check passes, 1 when a check fails, 2 on a usage error.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from math import comb
from pathlib import Path
from typing import Sequence

from . import __version__
from .constructions import (
    CENSUS_FILTERS,
    octahedron_parity_census,
    sample_A,
    sample_B,
    sample_D,
    witness_cd_from_A,
    witness_expand_from_B,
)
from .experiments import LEMMAS, run_lemma
from .hypercore import RationalDensity, dumps_families, loads_families, read_hypergraph, write_hypergraph
from .measures import (
    EnumerationTooLarge,
    MeasureConfig,
    cd_threshold_defect,
    deviation,
    disc_defect,
    expansion_defect,
)
from .partitions import OrderedPartition, build_property_poset, export_dot
from .reports import Check, Report, at_most
from .suites import SUITES

WORKERS_ENV = "QUASIHYPER_WORKERS"


class UsageError(ValueError):
    pass


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        w = int(raw)
    except ValueError:
        raise UsageError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}") from None
    if w < 1:
        raise UsageError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}")
    return w


@dataclass
class ExperimentConfig:
    subcommand: str
    k: int | None = None
    n: int | None = None
    l: int | None = None
    s: int | None = None
    pi: tuple[int, ...] | None = None
    p: RationalDensity | None = None
    seed: int = 0
    seeds_count: int = 1
    mode: str | None = None
    samples: int | None = None
    tolerance: float | None = None
    extra: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        d = asdict(self)
        d["p"] = str(self.p) if self.p is not None else None
        d["pi"] = list(self.pi) if self.pi is not None else None
        d["outputs"] = {k: str(v) for k, v in self.outputs.items() if v is not None}
        d["extra"] = {k: str(v) if isinstance(v, Path) else v for k, v in self.extra.items() if k != "quiet"}
        return d

    def validate(self) -> None:
        """Subcommand preconditions, checked before any work starts."""
        sub = self.subcommand
        if self.n is not None and self.n < 0:
            raise UsageError("--n must be non-negative")
        if self.k is not None and self.k < 2:
            raise UsageError("--k must be at least 2")
        if self.seeds_count < 1:
            raise UsageError("--seeds-count must be positive")
        if self.samples is not None and self.samples <= 0:
            raise UsageError("--samples must be positive")
        kind = self.extra.get("kind")
        if sub in ("sample", "census"):
            if self.n is None:
                raise UsageError(f"{sub} needs --n")
            if kind == "A" and not 2 <= self.l <= self.k - 1:
                raise UsageError("construction A needs 2 <= l <= k-1")
            if kind == "B" and sum(self.pi) != self.k:
                raise UsageError(f"--pi {','.join(map(str, self.pi))} does not sum to k = {self.k}")
            if kind == "D":
                if self.k < 3:
                    raise UsageError("construction D needs k >= 3")
                if self.p != RationalDensity(1, 2):
                    raise UsageError("construction D is defined only for p = 1/2")
        if sub == "census":
            filt = self.extra.get("filter") or kind
            if filt not in CENSUS_FILTERS or filt[0] != kind:
                raise UsageError(f"--filter {filt} does not apply to construction {kind}")
            if kind == "B" and self.pi is not None and len(self.pi) != 2:
                raise UsageError("the B census covers two-part partitions only")
        if sub == "measure":
            m = self.extra["measure"]
            if m in ("cd", "dev") and self.l is None:
                raise UsageError(f"--measure {m} needs --l")
            if m == "cd" and (self.s is None or self.extra.get("graph") is None):
                raise UsageError("--measure cd needs --s and --graph")
            if m == "expand" and self.extra.get("families") is None:
                raise UsageError("--measure expand needs --families")
        if sub == "separate":
            lemma = LEMMAS[self.extra["lemma"]]
            if self.pi is not None and self.k is not None and sum(self.pi) != self.k:
                raise UsageError("--pi must sum to --k")
            if "l" in lemma.needs and self.l is not None and self.k is not None and not 2 <= self.l <= self.k - 1:
                raise UsageError("construction A needs 2 <= l <= k-1")
            if lemma.name.startswith("D-") and self.p not in (None, RationalDensity(1, 2)):
                raise UsageError("construction D is defined only for p = 1/2")
        if sub == "poset" and (self.k is None or self.k < 3):
            raise UsageError("poset needs --k >= 3")
        if sub == "verify" and self.n is not None and self.n < 3:
            raise UsageError("verify needs --n >= 3")


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _density(text: str) -> RationalDensity:
    try:
        return RationalDensity.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"invalid density {text!r}: {exc}") from None


def _parts(text: str) -> tuple[int, ...]:
    try:
        parts = tuple(int(x) for x in text.replace("(", "").replace(")", "").split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid partition {text!r}") from None
    if len(parts) < 2 or any(x < 1 for x in parts):
        raise argparse.ArgumentTypeError("a partition needs at least two positive parts")
    return parts


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", type=Path, help="write the JSON report here (CSV alongside)")
    common.add_argument("--csv", type=Path, help="write the CSV report here")
    common.add_argument("--quiet", action="store_true", help="do not print the report")

    parser = argparse.ArgumentParser(prog="quasihyper", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def construction_args(sp, kind_required=True):
        sp.add_argument("--kind", choices=("A", "B", "D"), required=kind_required)
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--k", type=int, help="uniformity (default 3, or the sum of --pi)")
        sp.add_argument("--l", type=int, default=2)
        sp.add_argument("--pi", type=_parts, default=None, help="ordered partition, e.g. 2,1")
        sp.add_argument("--p", type=_density, default=RationalDensity(1, 2))
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("sample", parents=[common], help="materialise A, B or D to a file")
    construction_args(sp)
    sp.add_argument("--out", type=Path, required=True)
    sp.add_argument("--witness", type=Path, help="A: zero-color graph; B: expansion families")

    sp = sub.add_parser("measure", parents=[common], help="measure a hypergraph file")
    sp.add_argument("--input", type=Path, required=True)
    sp.add_argument("--measure", choices=("disc", "expand", "cd", "dev"), required=True)
    sp.add_argument("--p", type=_density, default=RationalDensity(1, 2))
    sp.add_argument("--l", type=int)
    sp.add_argument("--s", type=int)
    sp.add_argument("--graph", type=Path, help="l-graph file for cd")
    sp.add_argument("--families", type=Path, help="families file for expand")
    sp.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--semantics", choices=("set", "tuple"), default="set")
    sp.add_argument("--spanning", action="store_true", help="cd over all k-sets of V(H)")
    sp.add_argument("--max-defect", type=float, help="fail when the (normalised) value exceeds this")

    sp = sub.add_parser("separate", parents=[common], help="reproduce a named separation lemma")
    sp.add_argument("--lemma", choices=sorted(LEMMAS), required=True)
    sp.add_argument("--n", type=int)
    sp.add_argument("--k", type=int)
    sp.add_argument("--l", type=int)
    sp.add_argument("--pi", type=_parts)
    sp.add_argument("--p", type=_density)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--seeds-count", type=int, default=1)
    sp.add_argument("--mode", choices=("auto", "exact", "exhaustive", "sampled"))
    sp.add_argument("--samples", type=int)
    sp.add_argument("--workers", type=int, help=f"parallel seeds (default ${WORKERS_ENV} or 1)")

    sp = sub.add_parser("poset", parents=[common], help="property poset as DOT / JSON")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--dot", type=Path)
    sp.add_argument("--json", type=Path)

    sp = sub.add_parser("verify", parents=[common], help="exact-identity suites")
    sp.add_argument("--suite", choices=sorted(SUITES) + ["all"], required=True)
    sp.add_argument("--n", type=int, default=7, help="largest vertex count drawn")
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("census", parents=[common], help="octahedron parity census")
    construction_args(sp)
    sp.add_argument("--filter", choices=CENSUS_FILTERS)
    sp.add_argument("--level", type=int, help="octahedron level (default per construction)")
    sp.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    sp.add_argument("--samples", type=int, default=10**6)
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    sub = args.subcommand
    g = lambda name: getattr(args, name, None)  # noqa: E731
    cfg = ExperimentConfig(
        subcommand=sub,
        k=g("k"),
        n=g("n"),
        l=g("l"),
        s=g("s"),
        pi=g("pi"),
        p=g("p"),
        seed=g("seed") or 0,
        seeds_count=g("seeds_count") or 1,
        mode=g("mode"),
        samples=g("samples"),
        tolerance=g("max_defect"),
        outputs={"report": g("report"), "csv": g("csv"), "out": g("out"), "witness": g("witness"), "dot": g("dot"), "json": g("json")},
    )
    for name in ("kind", "measure", "lemma", "suite", "filter", "level", "graph", "families", "semantics", "spanning", "trials", "workers", "input"):
        if g(name) is not None:
            cfg.extra[name] = g(name)
    if sub in ("sample", "census"):
        if cfg.k is None:
            cfg.k = sum(cfg.pi) if cfg.pi is not None else 3
        if cfg.extra.get("kind") == "B" and cfg.pi is None:
            cfg.pi = (cfg.k - 1, 1)
    return cfg


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _construct(cfg: ExperimentConfig):
    kind = cfg.extra["kind"]
    if kind == "A":
        return sample_A(cfg.n, cfg.k, cfg.l, cfg.p.a, cfg.p.b, cfg.seed)
    if kind == "B":
        return sample_B(cfg.n, OrderedPartition(cfg.pi), cfg.p.a, cfg.p.b, cfg.seed)
    return sample_D(cfg.n, cfg.k, cfg.seed)


def cmd_sample(cfg: ExperimentConfig, report: Report) -> None:
    h = _construct(cfg)
    H = h.hypergraph
    write_hypergraph(H, cfg.outputs["out"])
    report.add(Check("edges", H.edge_count, None, None, True, h.describe()))
    report.add(Check("density", H.density(), float(h.p.value), None, True))
    target = cfg.outputs.get("witness")
    if target is not None:
        if h.kind == "A":
            G = witness_cd_from_A(h)
            write_hypergraph(G, target)
            report.add(Check("witness.edges", G.edge_count, None, None, True))
        elif h.kind == "B":
            S = witness_expand_from_B(h)
            Path(target).write_text(dumps_families(S))
            report.add(Check("witness.sizes", [len(f) for f in S], None, None, True))
        else:
            raise UsageError("construction D has no extractable witness file")


def cmd_measure(cfg: ExperimentConfig, report: Report) -> None:
    H = read_hypergraph(cfg.extra["input"])
    m = cfg.extra["measure"]
    mcfg = MeasureConfig(cfg.mode or "exact", cfg.samples or 10_000, seed=cfg.seed)
    limit = cfg.tolerance
    if m == "disc":
        res = disc_defect(H, cfg.p, mcfg)
        value, detail = res.defect, {"witness": sorted(res.witness), "lower_bound": res.lower_bound}
    elif m == "expand":
        S = loads_families(Path(cfg.extra["families"]).read_text())
        defect, e, size = expansion_defect(H, S, cfg.p)
        value, detail = defect, {"e": e, "product": size}
    elif m == "cd":
        G = read_hypergraph(cfg.extra["graph"])
        if G.k != cfg.l:
            raise UsageError(f"--graph is {G.k}-uniform but --l is {cfg.l}")
        if not 1 <= cfg.s <= comb(H.k, cfg.l):
            raise UsageError(f"--s must lie in [1, C({H.k},{cfg.l})]")
        res = cd_threshold_defect(H, G, cfg.s, cfg.p, spanning=bool(cfg.extra.get("spanning")))
        value, detail = res.defect, {"hits": res.hits, "total": res.total}
    else:
        if not 0 <= cfg.l <= H.k:
            raise UsageError(f"--l must lie in [0, {H.k}]")
        res = deviation(H, cfg.l, None, mcfg, cfg.extra.get("semantics", "set"))
        value = res.value
        detail = {"normalized": res.normalized, "standard_error": res.standard_error, "semantics": res.semantics}
    name = f"{m}"
    if limit is None:
        report.add(Check(name, value, None, None, True, detail))
    else:
        shown = detail.get("normalized", value) if m == "dev" else value
        report.add(at_most(name, abs(float(shown)), limit, **detail))


def _separate_one(args) -> tuple[int, dict, list[Check]]:
    lemma, overrides = args
    params, checks = run_lemma(lemma, **overrides)
    return overrides["seed"], params.to_json(), checks


def cmd_separate(cfg: ExperimentConfig, report: Report) -> None:
    lemma = cfg.extra["lemma"]
    base = dict(n=cfg.n, k=cfg.k, l=cfg.l, pi=cfg.pi, p=cfg.p, mode=cfg.mode, samples=cfg.samples)
    seeds = [cfg.seed + i for i in range(cfg.seeds_count)]
    jobs = [(lemma, dict(base, seed=s)) for s in seeds]
    workers = cfg.extra.get("workers") or default_workers()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_separate_one, jobs))
    else:
        results = [_separate_one(j) for j in jobs]
    results.sort(key=lambda r: r[0])  # merged in seed order
    report.config["lemma_params"] = results[0][1]
    for seed, _, checks in results:
        for c in checks:
            if len(seeds) > 1:
                c.name = f"seed{seed}/{c.name}"
            report.add(c)


def cmd_poset(cfg: ExperimentConfig, report: Report) -> None:
    poset = build_property_poset(cfg.k)
    dot = export_dot(poset)
    if cfg.outputs.get("dot"):
        Path(cfg.outputs["dot"]).write_text(dot)
    if cfg.outputs.get("json"):
        Path(cfg.outputs["json"]).write_text(poset.dumps_json() + "\n")
    report.add(Check("classes", len(poset.classes), None, None, True))
    report.add(Check("hasse_edges", len(poset.hasse), None, None, True))
    report.add(Check("bottom", poset.bottom(), None, None, True))


def cmd_verify(cfg: ExperimentConfig, report: Report) -> None:
    names = sorted(SUITES) if cfg.extra["suite"] == "all" else [cfg.extra["suite"]]
    for name in names:
        kwargs = {"n_max": cfg.n, "seed": cfg.seed}
        if "trials" in cfg.extra:
            kwargs["trials"] = cfg.extra["trials"]
        report.extend(SUITES[name](**kwargs))


def cmd_census(cfg: ExperimentConfig, report: Report) -> None:
    h = _construct(cfg)
    rep = octahedron_parity_census(
        h,
        l=cfg.extra.get("level"),
        case_filter=cfg.extra.get("filter"),
        mode=cfg.mode,
        samples=cfg.samples,
        seed=cfg.seed,
    )
    report.add(Check(f"{rep.case_filter}.odd", rep.odd, 0, 0, rep.passed, rep.to_json()))


COMMANDS = {
    "sample": cmd_sample,
    "measure": cmd_measure,
    "separate": cmd_separate,
    "poset": cmd_poset,
    "verify": cmd_verify,
    "census": cmd_census,
}


def run(cfg: ExperimentConfig, stdout=None, stderr=None) -> tuple[int, Report]:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    report = Report(cfg.to_json())
    try:
        cfg.validate()
        COMMANDS[cfg.subcommand](cfg, report)
    except (UsageError, EnumerationTooLarge) as exc:
        print(f"quasihyper {cfg.subcommand}: error: {exc}", file=stderr)
        return 2, report
    except (ValueError, OSError) as exc:
        print(f"quasihyper {cfg.subcommand}: error: {exc}", file=stderr)
        return 2, report
    report.write(cfg.outputs.get("report"), cfg.outputs.get("csv"))
    if not cfg.extra.get("quiet"):
        if cfg.subcommand == "poset" and not (cfg.outputs.get("dot") or cfg.outputs.get("json")):
            print(export_dot(build_property_poset(cfg.k)), end="", file=stdout)
        else:
            print(report.dumps(), file=stdout)
    if not report.passed:
        print(f"quasihyper {cfg.subcommand}: failed: {', '.join(report.failed)}", file=stderr)
        return 1, report
    return 0, report


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    cfg = config_from_args(args)
    if args.quiet:
        cfg.extra["quiet"] = True
    code, _ = run(cfg)
    return code


if __name__ == "__main__":
    sys.exit(main())
