"""Sampled C_{(2,1),4} counts in A_2 and D against p^4 n^6 and p^4 (n)_6, for a range of n.

Shows how much of the gap to p^4 n^6 is the injection count (n)_6 / n^6 rather than the graph.

    python3 scripts/cycle_ratios.py --n 20 40 80 --seeds 5
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass, field
from math import perm

import numpy as np

from quasihyper.constructions import sample_A, sample_D
from quasihyper.measures import MeasureConfig
from quasihyper.patterns import build_cycle, count_labeled


@dataclass
class CycleConfig:
    ns: list[int] = field(default_factory=lambda: [20, 40, 80])
    seeds: int = 5
    samples: int = 10**6


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, nargs="+", default=[20, 40, 80])
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--samples", type=int, default=10**6)
    a = ap.parse_args()
    cfg = CycleConfig(a.n, a.seeds, a.samples)
    C = build_cycle(2, 1)
    print(f"{'kind':4s} {'n':>4s} {'(n)_6/n^6':>10s} {'vs n^6':>16s} {'vs (n)_6':>16s}")
    for n in cfg.ns:
        for kind, make in (("A", lambda s: sample_A(n, 3, 2, 1, 2, s)), ("D", lambda s: sample_D(n, 3, s))):
            est = np.array(
                [
                    count_labeled(C, make(s).hypergraph, MeasureConfig("sampled", cfg.samples, seed=s)).value
                    for s in range(cfg.seeds)
                ]
            )
            lit = est / (0.5**4 * n**6)
            fall = est / (0.5**4 * perm(n, 6))
            print(
                f"{kind:4s} {n:4d} {perm(n, 6) / n**6:10.4f} "
                f"{lit.mean():8.3f}+-{lit.std():.3f} {fall.mean():8.3f}+-{fall.std():.3f}"
            )


if __name__ == "__main__":
    main()
