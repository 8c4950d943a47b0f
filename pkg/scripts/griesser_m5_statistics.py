"""Witness-search statistics for r = 2m - 2, m = 5 on random tensors.

Whether the Griesser condition is nontrivial here is open; this script only
counts found/not-found outcomes and the smallest image dimension seen.
"""

import argparse
from collections import Counter
from dataclasses import dataclass

from borderrank.constructions import random_tensor
from borderrank.griesser import DegenerateWitnessError, m4_pencil_witness, make_instance, witness_search


@dataclass
class Config:
    m: int = 5
    a_values: tuple = (4, 5, 6, 7)
    tensors: int = 10
    samples: int = 10_000
    seed: int = 0


def main(cfg: Config):
    r = 2 * cfg.m - 2
    print(f"m={cfg.m}, r={r}, dim E=2, need image dim <= {r - cfg.m}; seed={cfg.seed}")
    for a in cfg.a_values:
        found, pencil, mins = 0, 0, Counter()
        for t in range(cfg.tensors):
            inst = make_instance(random_tensor(a, cfg.m, cfg.m, seed=cfg.seed * 1000 + t, p=101))
            res = witness_search(inst, r, samples=cfg.samples, seed=cfg.seed + t)
            found += res.found
            lo = min(st["min_image_dim"] for st in res.strategies.values()
                     if st["min_image_dim"] is not None)
            mins[lo] += 1
            if a == 4:
                # two commutators: an invariant plane of U_2^{-1} U_3 has image dim 2
                try:
                    pencil += m4_pencil_witness(inst).image_dim <= r - cfg.m
                except DegenerateWitnessError:
                    pass
        line = f"a={a}: search witnesses {found}/{cfg.tensors}, min image dims {dict(sorted(mins.items()))}"
        if a == 4:
            line += f", pencil witnesses {pencil}/{cfg.tensors}"
        print(line)


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, default=5)
    ap.add_argument("--a", type=int, nargs="+", default=[4, 5, 6, 7])
    ap.add_argument("--tensors", type=int, default=10)
    ap.add_argument("--samples", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    main(Config(a.m, tuple(a.a), a.tensors, a.samples, a.seed))
