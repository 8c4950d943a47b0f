"""Compare the commutator block determinant, the reduced flattening determinant
and Young-flattening injectivity on a seeded corpus."""

import argparse
from dataclasses import dataclass

from borderrank.checks import equivalence_table


@dataclass
class Config:
    seeds: tuple = (0, 1, 2)
    ms: tuple = (3, 5)


def main(cfg: Config):
    for seed in cfg.seeds:
        rows = equivalence_table(seed, cfg.ms)
        for name, m, full, block_nz, reduced_nz in rows:
            flag = "" if full == block_nz else "  <- block det disagrees"
            print(f"seed={seed} {name:<22} injective={full!s:<5} block={block_nz!s:<5} "
                  f"reduced={reduced_nz!s:<5}{flag}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    a = ap.parse_args()
    main(Config(tuple(a.seeds)))
