"""Message sizes of the xor-indexing protocol against the trivial 2^k + k."""
import argparse
import math
from dataclasses import dataclass

from decomp.f2poly import message_size, thresholds


@dataclass
class SizeConfig:
    k_min: int = 1
    k_max: int = 60


def rows(cfg: SizeConfig):
    for k in range(cfg.k_min, cfg.k_max + 1):
        a, b = message_size(k)
        d, f = thresholds(k)
        yield k, d, f, a, b, math.log2(a + b) / k, (1 << k) + k


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k-min", type=int, default=1)
    ap.add_argument("--k-max", type=int, default=60)
    args = ap.parse_args()
    print(f"{'k':>3} {'d':>3} {'f':>3} {'|A|':>20} {'|B|':>18} {'log2(A+B)/k':>12} {'2^k+k':>20}")
    for k, d, f, a, b, ratio, trivial in rows(SizeConfig(args.k_min, args.k_max)):
        print(f"{k:>3} {d:>3} {f:>3} {a:>20} {b:>18} {ratio:>12.5f} {trivial:>20}")
