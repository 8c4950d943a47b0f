"""Residual of the eps-family against truncated polynomial multiplication."""

import argparse
import math
from dataclasses import dataclass

from borderrank.constructions import eps_residual


@dataclass
class Config:
    ms: tuple = (4, 8, 16)
    eps_hi: float = 1e-3
    eps_lo: float = 1e-6


def main(cfg: Config):
    for m in cfg.ms:
        hi, lo = eps_residual(m, cfg.eps_hi), eps_residual(m, cfg.eps_lo)
        slope = math.log(hi / lo) / math.log(cfg.eps_hi / cfg.eps_lo)
        print(f"m={m}: residual/eps = {hi / cfg.eps_hi:.6f}, {lo / cfg.eps_lo:.6f}; slope {slope:.4f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, nargs="+", default=[4, 8, 16])
    a = ap.parse_args()
    main(Config(tuple(a.m)))
