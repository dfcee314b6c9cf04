"""Simulate the linear-time indexing automaton and report its worst running time."""
import argparse
import json
import time
from dataclasses import asdict, dataclass

from decomp.automata import check_indexing_ca, indexing_ca_build


@dataclass
class CheckConfig:
    k: int = 1
    samples: int | None = None
    seed: int = 0


def run(cfg: CheckConfig) -> dict:
    start = time.monotonic()
    rep = check_indexing_ca(cfg.k, cfg.samples, cfg.seed)
    ca = indexing_ca_build(cfg.k)
    out = {"config": asdict(cfg), **rep.to_json(), "n": ca.n,
           "steps_per_cell": round(rep.max_steps / ca.n, 3), "seconds": round(time.monotonic() - start, 1)}
    return out


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-k", type=int, default=1)
    ap.add_argument("--samples", type=int, help="random inputs instead of all of them")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print(json.dumps(run(CheckConfig(args.k, args.samples, args.seed)), indent=2))
