"""Extract certificates from random triangle circuits and compare with exact dc."""
import argparse
from dataclasses import dataclass

from decomp import automata, solver
from decomp.core import verify_certificate


@dataclass
class SweepConfig:
    k: int = 1
    f: int = 2
    sigma: int = 2
    delay: int = 0
    circuits: int = 20
    seed: int = 0


def run(cfg: SweepConfig):
    n = 2 * cfg.k + cfg.f
    height = automata.asap_schedule(n)[1] + cfg.delay
    bound = (2 * cfg.k + 2 * cfg.delay + 1) * automata.state_width(cfg.sigma)
    for i in range(cfg.circuits):
        C = automata.TriangleCircuit.random(n, height, cfg.sigma, cfg.seed + i)
        D = automata.extract_decomposition(C, cfg.k, cfg.f, cfg.delay)
        F = automata.circuit_function(C, cfg.k, cfg.f)
        res = solver.exact_dc(F, solver.SearchBudget(max_seconds=10))
        yield cfg.seed + i, D.size, bound, verify_certificate(F, D), res.status, res.lower, res.upper


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    for name, default in (("k", 1), ("f", 2), ("sigma", 2), ("delay", 0), ("circuits", 20), ("seed", 0)):
        ap.add_argument(f"--{name}", type=int, default=default)
    cfg = SweepConfig(**vars(ap.parse_args()))
    print("seed  extracted  bound  verified  solver")
    for seed, size, bound, ok, status, lo, hi in run(cfg):
        print(f"{seed:>4}  {size:>9}  {bound:>5}  {str(ok):>8}  {status} [{lo},{hi}]")
