"""Acceptance checks: one function per claim, each returning a CheckResult.

Shared by ``borderrank verify-paper`` and ``tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .constructions import (
    LambdaSource, aft_prime_parts, aft_prime_tensor, aft_tensor, eps_residual,
    graded_tensor, matmul_tensor, polymult_truncated, random_rank_sum, random_tensor,
)
from .exactmath import rank_certified, rank_mod_p, rank_rational
from .griesser import (
    DefectiveEigenError, DegenerateWitnessError, SingularUError, m4_pencil_witness,
    make_instance, matmul_instance, matmul_profile, trivial_witness_r2m1, witness_search,
)
from .tensor3 import (
    Tensor3, basis_change, dumps, find_A_specialization, loads, reversal, specialize_A,
)
from .youngflat import (
    best_border_rank_lb, block, border_rank_lb, commutator_block_matrix, commutator_det_test,
    factorization_check, odd_full_rank_bound, young_flattening_matrix, young_rank,
)

DEFAULT_LAMBDA_SEED = 42
SEARCH_SAMPLES = 10_000


@dataclass
class CheckResult:
    id: int
    name: str
    expected: str
    computed: str
    passed: bool
    seconds: float = 0.0
    details: list = field(default_factory=list)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return (f"[{tag}] {self.id:02d} {self.name}: expected {self.expected}; "
                f"computed {self.computed} ({self.seconds:.2f}s)")


@dataclass
class CheckOptions:
    m_max: int = 7
    seed: int = 0
    lambda_seed: int = DEFAULT_LAMBDA_SEED
    samples: int = SEARCH_SAMPLES
    rel_tol: float = 1e-8
    stretch: bool = False


def _timed(fn):
    def run(opts: CheckOptions | None = None) -> CheckResult:
        opts = CheckOptions() if opts is None else opts
        t0 = time.perf_counter()
        res = fn(opts)
        res.seconds = time.perf_counter() - t0
        return res
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


@_timed
def check_odd_young_bound(opts: CheckOptions) -> CheckResult:
    """Full Young rank and lower bound 2m - 1 for the odd-m family."""
    lam = LambdaSource.seeded(opts.lambda_seed)
    ms = [m for m in (3, 5, 7) if m <= opts.m_max]
    if opts.stretch:
        ms.append(9)
    got, want, ok = [], [], True
    for m in ms:
        p = (m - 1) // 2
        rep = border_rank_lb(graded_tensor(m, p, lam), p)
        full = comb(m, p + 1) * m
        want.append(f"m={m}: {full}/{2 * m - 1}")
        got.append(f"m={m}: {rep.rank}/{rep.lower}")
        ok &= rep.rank == full and rep.lower == 2 * m - 1 == odd_full_rank_bound(m) and rep.certified
    return CheckResult(1, "odd-m Young bound", "; ".join(want) + " (rank/lb, certified)",
                       "; ".join(got), ok)


def expected_m5_blocks(lam) -> dict:
    """The four m = 5, p = 2 commutator blocks as integer matrices."""
    L = lam
    Z = lambda: np.zeros((5, 5), dtype=object)  # noqa: E731
    b21 = Z()
    b21[0, 1] = L(1, 2)
    b21[1, 2] = L(1, 3) - L(1, 1)
    b21[2, 3] = L(1, 4) - L(1, 2)
    b21[3, 4] = -L(1, 3)
    b22 = Z()
    for i, v in enumerate([L(2, 1), L(2, 2), L(2, 3) - L(2, 1), -L(2, 2), -L(2, 3)]):
        b22[i, i] = v
    b11 = Z()
    for i, v in enumerate([L(1, 1), L(1, 2) - L(1, 1), L(1, 3) - L(1, 2), L(1, 4) - L(1, 3), -L(1, 4)]):
        b11[i, i] = v
    b12 = Z()
    for i, v in enumerate([L(2, 1), L(2, 2) - L(2, 1), L(2, 3) - L(2, 2), -L(2, 3)]):
        b12[i + 1, i] = v
    return {(2, -1): b21, (2, -2): b22, (1, -1): b11, (1, -2): b12}


@_timed
def check_m5_blocks(opts: CheckOptions) -> CheckResult:
    """Entrywise match of the four m = 5 commutator blocks."""
    lam = LambdaSource.seeded(opts.lambda_seed)
    M = commutator_block_matrix(graded_tensor(5, 2, lam))
    matched = []
    for (i, j), want in expected_m5_blocks(lam).items():
        if np.array_equal(block(M, i, j, 2, 5), want):
            matched.append(f"[{i},{j}]")
    return CheckResult(2, "m=5 commutator blocks", "4/4 blocks equal",
                       f"{len(matched)}/4 equal ({' '.join(matched)})", len(matched) == 4)


@_timed
def check_factorizations(opts: CheckOptions) -> CheckResult:
    """Square relation and minor-chain product for m = 5, 7."""
    lam = LambdaSource.seeded(opts.lambda_seed)
    parts, ok = [], True
    for m in [m for m in (5, 7) if m <= opts.m_max]:
        p = (m - 1) // 2
        rep = factorization_check(graded_tensor(m, p, lam))
        sizes_ok = rep.chain_sizes == rep.expected_sizes and sum(rep.chain_sizes) == m * p
        parts.append(f"m={m}: square={rep.square_holds}, chain={rep.product_matches}, "
                     f"sizes={tuple(rep.chain_sizes)}")
        ok &= rep.square_holds and rep.product_matches and sizes_ok
        if m == 5:
            ends = rep.chain_factors[0] == lam(2, 1) and rep.chain_factors[-1] == -lam(1, 4)
            parts.append(f"m=5 end factors match={ends}")
            ok &= ends
    return CheckResult(3, "block determinant factorizations",
                       "|det full| = det(LL)^2 and chain product = +-det(LL) for m=5,7",
                       "; ".join(parts), ok)


def equivalence_corpus(seed: int = 0, m_values=(3, 5)) -> list[tuple[str, Tensor3]]:
    """Seeded mix of generic tensors and short rank-one sums with a = 2p+1, b = c = m."""
    out = []
    for m in m_values:
        a = m  # a = 2p + 1 with p = (m - 1) // 2
        for s in range(3):
            out.append((f"generic m={m} #{s}", random_tensor(a, m, m, seed=seed * 1000 + s, p=97)))
        out.append((f"graded m={m}", graded_tensor(m, (m - 1) // 2, LambdaSource.seeded(seed))))
        for s in range(6):
            r = max(m, 2 * m - 2 - (s % 3))
            out.append((f"rank-{r} sum m={m} #{s}", random_rank_sum(a, m, m, r, seed=seed * 1000 + s)))
    return out


def equivalence_table(seed: int = 0, m_values=(3, 5)):
    rows = []
    for name, T in equivalence_corpus(seed, m_values):
        a, m, _ = T.dims
        p = (a - 1) // 2
        rank, _, _ = young_rank(T, p)
        full = rank == comb(a, p + 1) * m
        test = commutator_det_test(T, seed=seed)
        rows.append((name, m, full, test.nonzero, test.reduced_nonzero))
    return rows


@_timed
def check_equivalence(opts: CheckOptions) -> CheckResult:
    """Block determinant nonzero iff Young flattening injective."""
    rows = equivalence_table(opts.seed, [m for m in (3, 5) if m <= opts.m_max])
    agree = sum(full == lit for _, _, full, lit, _ in rows)
    agree_red = sum(full == red for _, _, full, _, red in rows)
    bad = [n for n, _, full, lit, _ in rows if full != lit]
    details = [f"disagree: {n}" for n in bad]
    return CheckResult(4, "determinant criterion equivalence",
                       f"{len(rows)}/{len(rows)} agree",
                       f"{agree}/{len(rows)} agree (reduced flattening: {agree_red}/{len(rows)})",
                       agree == len(rows) and len(rows) >= 20, details=details)


@_timed
def check_aft(opts: CheckOptions) -> CheckResult:
    """AFT family: flattening lower bound m matched by a degeneration upper bound m."""
    parts, ok = [], True
    for k in (2, 3, 4):
        m = 2 ** k
        T = aft_tensor(k)
        lb = best_border_rank_lb(T).lower
        P = polymult_truncated(m)
        Trev = basis_change(T, gC=reversal(m))
        S = find_A_specialization(P, Trev)
        embeds = S is not None and specialize_A(P, S) == Trev
        r3 = eps_residual(m, 1e-3) / 1e-3
        slope = (math.log(eps_residual(m, 1e-3)) - math.log(eps_residual(m, 1e-6))) / (
            math.log(1e-3) - math.log(1e-6))
        good = lb == m and embeds and 0.9 <= r3 <= 1.1 and abs(slope - 1.0) <= 0.05
        ok &= good
        parts.append(f"k={k}: lb={lb}, embeds={embeds}, res/eps={r3:.4f}, slope={slope:.4f}"
                     + (f" => border rank = {m}" if good else ""))
    return CheckResult(5, "AFT border rank m", "lb=m, embeds, res/eps in [0.9,1.1], slope 1+-0.05",
                       "; ".join(parts), ok)


@_timed
def check_aft_prime(opts: CheckOptions) -> CheckResult:
    """Enlarged AFT family for k = 3: Young kernel, bounds m+2 and 2(m+1)-2-k."""
    k, m = 3, 8
    T = aft_prime_tensor(k, padded=True)
    M = young_flattening_matrix(T, 1)
    rank, _, _ = rank_certified(M)
    kernel = M.shape[1] - rank
    lb = border_rank_lb(T, 1).lower
    base, extra = aft_prime_parts(k)
    extra_rank = max(rank_mod_p(extra.flatten(mode)) for mode in "ABC")
    decomposes = base + extra == aft_prime_tensor(k)
    ub = m + extra_rank if decomposes else None
    ok = kernel == 4 and lb == 10 == m + 2 and extra_rank == 5 and ub == 13 == 2 * (m + 1) - 2 - k
    return CheckResult(6, "enlarged AFT bounds", "kernel 4, rank 77, lb 10, T'' rank 5, ub 13",
                       f"kernel {kernel}, rank {rank}, lb {lb}, T'' rank {extra_rank}, ub {ub}", ok)


@_timed
def check_matmul_young(opts: CheckOptions) -> CheckResult:
    """2x2 matrix multiplication: best Young bound 6."""
    T = matmul_tensor(2)
    lbs = {p: border_rank_lb(T, p).lower for p in range(T.dims[0])}
    best = max(lbs.values())
    return CheckResult(7, "M_2 Young bound", "best lb 6 = 2n^2-n", f"best lb {best}, per p {lbs}",
                       best == 6)


@_timed
def check_matmul_profile(opts: CheckOptions) -> CheckResult:
    """Matrix multiplication Griesser profile thresholds and failing-r searches."""
    parts, ok = [], True
    for n, last_fail in ((2, 5), (3, 13)):
        m = n * n
        inst = matmul_instance(n)
        fails = []
        for r in range(m + 1, 2 * m):
            prof = matmul_profile(n, r, inst)
            ok &= prof.measured == prof.formula
            if not prof.satisfied:
                fails.append(r)
                res = witness_search(inst, r, samples=opts.samples, seed=opts.seed)
                tried = res.strategies.get("random", {}).get("tried", 0)
                coords = res.strategies.get("coordinate", {}).get("tried", 0)
                ok &= (not res.found) and tried >= opts.samples and coords == comb(m, 2 * m - r)
        ok &= fails == list(range(m + 1, last_fail + 1))
        parts.append(f"n={n}: fails r<={max(fails) if fails else None}")
    return CheckResult(8, "M_n Griesser profile", "n=2 fails r<=5; n=3 fails r<=13; formula = measured",
                       "; ".join(parts), ok)


@_timed
def check_eigen_witness(opts: CheckOptions) -> CheckResult:
    """r = 2m-1 witnesses from an eigenvector of Y_1."""
    total = hits = 0
    for m in (3, 4, 5):
        for a in (m, m + 2):
            for s in range(20):
                total += 1
                inst = make_instance(random_tensor(a, m, m, seed=opts.seed * 1000 + s, p=101))
                try:
                    w = trivial_witness_r2m1(inst, opts.rel_tol)
                except DefectiveEigenError:
                    continue
                hits += w.image_dim <= m - 1
    return CheckResult(9, "r=2m-1 eigenvector witnesses", f"{total}/{total}", f"{hits}/{total}",
                       hits == total)


@_timed
def check_pencil_witness(opts: CheckOptions) -> CheckResult:
    """r = 2m-2 witnesses for m = a = 4 from the pencil quartic."""
    hits = 0
    for s in range(20):
        inst = make_instance(random_tensor(4, 4, 4, seed=opts.seed * 1000 + s, p=101))
        try:
            w = m4_pencil_witness(inst, opts.rel_tol)
        except (SingularUError, DegenerateWitnessError):
            continue
        hits += w.image_dim <= 2
    return CheckResult(10, "m=4 pencil witnesses", "20/20", f"{hits}/20", hits == 20)


@_timed
def check_properties(opts: CheckOptions) -> CheckResult:
    """Seeded property sweep: rank-one, subadditivity, basis change, mod p vs Q, file round-trip."""
    rng = random.Random(f"props:{opts.seed}")
    counts = dict.fromkeys(["rank_one", "subadditive", "basis_change", "mod_p", "round_trip"], 0)
    fails = []
    for t in range(20):
        a, b, c = rng.randint(2, 4), rng.randint(1, 4), rng.randint(1, 4)
        u, v, w = ([rng.randint(-3, 3) or 1 for _ in range(n)] for n in (a, b, c))
        R1 = Tensor3.rank_one(u, v, w)
        p = rng.randrange(a)
        if young_rank(R1, p)[0] == comb(a - 1, p):
            counts["rank_one"] += 1
        else:
            fails.append(f"rank_one #{t}")
        T1 = random_tensor(a, b, c, seed=t, p=7)
        T2 = random_tensor(a, b, c, seed=t + 100, p=7)
        if young_rank(T1 + T2, p)[0] <= young_rank(T1, p)[0] + young_rank(T2, p)[0]:
            counts["subadditive"] += 1
        else:
            fails.append(f"subadditive #{t}")
        gA = _unimodular(a, rng)
        gB = _unimodular(b, rng)
        gC = _unimodular(c, rng)
        if young_rank(basis_change(T1, gA, gB, gC), p)[0] == young_rank(T1, p)[0]:
            counts["basis_change"] += 1
        else:
            fails.append(f"basis_change #{t}")
        n1, n2 = rng.randint(1, 12), rng.randint(1, 12)
        M = np.array([[rng.randint(-5, 5) for _ in range(n2)] for _ in range(n1)], dtype=object)
        if rank_mod_p(M) == rank_rational(M):
            counts["mod_p"] += 1
        else:
            fails.append(f"mod_p #{t}")
        if loads(dumps(T1)) == T1:
            counts["round_trip"] += 1
        else:
            fails.append(f"round_trip #{t}")
    ok = not fails
    return CheckResult(11, "property sweep", "20/20 in each family",
                       ", ".join(f"{k} {v}/20" for k, v in counts.items()), ok, details=fails)


def _unimodular(n: int, rng: random.Random) -> np.ndarray:
    """Random integer matrix with determinant 1 (upper times lower unitriangular)."""
    U = np.eye(n, dtype=object)
    L = np.eye(n, dtype=object)
    for i in range(n):
        for j in range(i + 1, n):
            U[i, j] = rng.randint(-2, 2)
            L[j, i] = rng.randint(-2, 2)
    return np.dot(U, L)


CHECKS = [
    (check_odd_young_bound, {"young"}),
    (check_m5_blocks, {"commutator"}),
    (check_factorizations, {"commutator"}),
    (check_equivalence, {"commutator", "young"}),
    (check_aft, {"aft"}),
    (check_aft_prime, {"aft", "young"}),
    (check_matmul_young, {"matmul", "young"}),
    (check_matmul_profile, {"matmul", "griesser"}),
    (check_eigen_witness, {"griesser"}),
    (check_pencil_witness, {"griesser"}),
    (check_properties, {"properties"}),
]
GROUPS = sorted(set().union(*(g for _, g in CHECKS)))


def run_checks(only=None, opts: CheckOptions | None = None) -> list[CheckResult]:
    """Run the selected checks in id order; ``only`` is a set of group names or ids."""
    results = []
    for i, (fn, groups) in enumerate(CHECKS, start=1):
        if only and not (set(only) & (groups | {str(i)})):
            continue
        results.append(fn(opts))
    return results

