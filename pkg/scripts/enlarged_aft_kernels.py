"""Young p=1 kernel and lower bound of the padded enlarged AFT family, per k."""

import argparse
from dataclasses import dataclass
from math import ceil

from borderrank.constructions import aft_prime_tensor
from borderrank.exactmath import rank_mod_p
from borderrank.youngflat import young_flattening_matrix


@dataclass
class Config:
    ks: tuple = (2, 3, 4)


def main(cfg: Config):
    for k in cfg.ks:
        m = 2 ** k
        M = young_flattening_matrix(aft_prime_tensor(k, padded=True), 1)
        rank = rank_mod_p(M)
        print(f"k={k} m={m}: rank {rank}, kernel {M.shape[1] - rank}, "
              f"lb {ceil(rank / m)} (m+2 = {m + 2}, upper {2 * (m + 1) - 2 - k})")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, nargs="+", default=[2, 3, 4])
    main(Config(tuple(ap.parse_args().k)))
