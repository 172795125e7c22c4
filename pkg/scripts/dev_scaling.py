"""dev_2 / n^5 against n for the three constructions, in both deviation forms.

The satisfying construction (A_2) should drift towards 0; B and D should stay bounded away from it.
Writes one CSV row per (construction, n, seed).

    python3 scripts/dev_scaling.py --n 10 14 18 22 --seeds 3 --out results/dev_scaling.csv
"""
from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field

from quasihyper.constructions import sample_A, sample_B, sample_D
from quasihyper.measures import MeasureConfig, deviation

BIG = MeasureConfig(exact_threshold=2**40)


@dataclass
class ScalingConfig:
    ns: list[int] = field(default_factory=lambda: [10, 14, 18, 22])
    seeds: int = 3
    l: int = 2


def rows(cfg: ScalingConfig):
    for n in cfg.ns:
        for seed in range(cfg.seeds):
            for name, h in (
                ("A", sample_A(n, 3, 2, 1, 2, seed)),
                ("B", sample_B(n, (2, 1), 1, 2, seed)),
                ("D", sample_D(n, 3, seed)),
            ):
                H = h.hypergraph
                s = deviation(H, cfg.l, None, BIG, "set").normalized
                t = deviation(H, cfg.l, None, BIG, "tuple").normalized
                yield {"construction": name, "n": n, "seed": seed, "set": s, "tuple": t}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, nargs="+", default=[10, 14, 18, 22])
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--out", help="CSV path (default stdout)")
    a = ap.parse_args()
    out = open(a.out, "w", newline="") if a.out else sys.stdout
    w = csv.DictWriter(out, fieldnames=["construction", "n", "seed", "set", "tuple"])
    w.writeheader()
    for row in rows(ScalingConfig(a.n, a.seeds)):
        w.writerow(row)
        out.flush()
    if a.out:
        out.close()


if __name__ == "__main__":
    main()
