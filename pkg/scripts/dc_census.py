"""Distribution of exact decomposition complexity over small predicates."""
import argparse
import json
import time
from collections import Counter
from dataclasses import asdict, dataclass

from decomp import solver
from decomp.core import TernaryFunction, random_predicate

import numpy as np


@dataclass
class CensusConfig:
    p: int = 1
    q: int = 1
    r: int = 1
    samples: int | None = None  # None: every predicate (only sensible for n <= 4)
    seed: int = 0
    max_seconds: float | None = 60.0


def predicates(cfg: CensusConfig):
    n = cfg.p + cfg.q + cfg.r
    if cfg.samples is None:
        for index in range(1 << (1 << n)):
            bits = [(index >> i) & 1 for i in range(1 << n)]
            yield TernaryFunction(cfg.p, cfg.q, cfg.r, 1, np.array(bits))
    else:
        for i in range(cfg.samples):
            yield random_predicate(cfg.p, cfg.q, cfg.r, cfg.seed + i)


def run(cfg: CensusConfig) -> dict:
    counts, unknown = Counter(), 0
    start = time.monotonic()
    for T in predicates(cfg):
        res = solver.exact_dc(T, solver.SearchBudget(max_seconds=cfg.max_seconds))
        if res.status == solver.EXACT:
            counts[res.dc] += 1
        else:
            unknown += 1
    return {"config": asdict(cfg), "dc_counts": dict(sorted(counts.items())), "unknown": unknown,
            "counting_bound": solver.counting_lower_bound(cfg.p, cfg.q, cfg.r).m,
            "seconds": round(time.monotonic() - start, 2)}


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-p", type=int, default=1)
    ap.add_argument("-q", type=int, default=1)
    ap.add_argument("-r", type=int, default=1)
    ap.add_argument("--samples", type=int)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print(json.dumps(run(CensusConfig(args.p, args.q, args.r, args.samples, args.seed)), indent=2))
