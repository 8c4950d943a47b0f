"""Young-flattening rank of the odd-m family beyond the acceptance range."""

import argparse
import time
from dataclasses import dataclass
from math import comb

from borderrank.constructions import LambdaSource, graded_tensor
from borderrank.youngflat import border_rank_lb


@dataclass
class Config:
    ms: tuple = (9, 11)
    lambda_seed: int = 42


def main(cfg: Config):
    lam = LambdaSource.seeded(cfg.lambda_seed)
    for m in cfg.ms:
        p = (m - 1) // 2
        t0 = time.perf_counter()
        rep = border_rank_lb(graded_tensor(m, p, lam), p)
        full = comb(m, p + 1) * m
        print(f"m={m} p={p}: rank {rep.rank}/{full}, lb {rep.lower} (2m-1 = {2 * m - 1}), "
              f"certified={rep.certified}, {time.perf_counter() - t0:.2f}s")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, nargs="+", default=[9, 11])
    ap.add_argument("--lambda-seed", type=int, default=42)
    a = ap.parse_args()
    main(Config(tuple(a.m), a.lambda_seed))
