"""Run every registered lemma over a range of seeds and tabulate how often each check holds.

    python3 scripts/separation_table.py --seeds 10 --out results/separation.json
"""
from __future__ import annotations

import argparse
import time
from collections import defaultdict
from dataclasses import asdict, dataclass
from pathlib import Path

from quasihyper.experiments import LEMMAS, run_lemma
from quasihyper.reports import Check, Report


@dataclass
class TableConfig:
    seeds: int = 5
    first_seed: int = 0
    lemmas: tuple[str, ...] = tuple(sorted(LEMMAS))
    samples: int = 200_000  # sampled censuses and cycle counts; the lemma default is 10^6
    out: Path | None = None


def tabulate(cfg: TableConfig) -> Report:
    report = Report({k: (str(v) if isinstance(v, Path) else v) for k, v in asdict(cfg).items()})
    for name in cfg.lemmas:
        held = defaultdict(int)
        values = defaultdict(list)
        t0 = time.perf_counter()
        for seed in range(cfg.first_seed, cfg.first_seed + cfg.seeds):
            _, checks = run_lemma(name, seed=seed, samples=cfg.samples)
            for c in checks:
                held[c.name] += c.passed
                values[c.name].append(c.value)
        dt = time.perf_counter() - t0
        for check, count in held.items():
            report.add(
                Check(
                    f"{name}/{check}",
                    count,
                    cfg.seeds,
                    0,
                    count == cfg.seeds,
                    {"values": [float(v) for v in values[check]], "seconds": round(dt, 1)},
                )
            )
        print(f"{name:22s} " + "  ".join(f"{c}={n}/{cfg.seeds}" for c, n in held.items()) + f"  ({dt:.0f}s)")
    return report


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--first-seed", type=int, default=0)
    ap.add_argument("--lemma", action="append", choices=sorted(LEMMAS), help="repeatable; default all")
    ap.add_argument("--samples", type=int, default=200_000)
    ap.add_argument("--out", type=Path)
    a = ap.parse_args()
    cfg = TableConfig(a.seeds, a.first_seed, tuple(a.lemma or sorted(LEMMAS)), a.samples, a.out)
    report = tabulate(cfg)
    if cfg.out:
        cfg.out.parent.mkdir(parents=True, exist_ok=True)
        report.write(cfg.out)


if __name__ == "__main__":
    main()
