"""Builders for the explicit tensor families.

A-basis conventions:

* ``graded_tensor(m, p)``: slots ordered a_{-p}, ..., a_0, ..., a_p, so
  a_j sits at index ``j + p``.  Slice a_j (j >= 0) is the all-ones j-th
  superdiagonal; slice a_{-u} carries lambda_{u,alpha} at (u + alpha, alpha).
* ``aft_tensor(k)``: slot 0 is the identity; slot j is the ones block on the
  superdiagonal of offset m - 2**(j-1), with 2**(j-1) entries.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from .exactmath import MERSENNE61
from .tensor3 import Tensor3, pad


class BadDimsError(ValueError):
    pass


@dataclass(frozen=True)
class LambdaSource:
    """Where the lambda_{i,j} coefficients come from.

    ``explicit`` uses 2**(2**(i+j)) + 2**j; ``seeded`` draws uniform values in
    [1, modulus) keyed on (seed, i, j) so a value never depends on m or on
    draw order; ``table`` looks values up in a user mapping.
    """

    kind: str = "seeded"
    seed: int = 0
    modulus: int = MERSENNE61
    table: dict = field(default_factory=dict)
    default: int | None = None

    def __post_init__(self):
        if self.kind not in ("explicit", "seeded", "table"):
            raise ValueError(f"unknown lambda source {self.kind!r}")
        if self.kind == "seeded" and self.modulus < 2:
            raise ValueError("modulus must be at least 2")

    @classmethod
    def explicit(cls) -> "LambdaSource":
        return cls(kind="explicit")

    @classmethod
    def seeded(cls, seed: int = 0, modulus: int = MERSENNE61) -> "LambdaSource":
        return cls(kind="seeded", seed=seed, modulus=modulus)

    @classmethod
    def from_table(cls, table, default: int | None = None) -> "LambdaSource":
        return cls(kind="table", table=dict(table), default=default)

    def __call__(self, i: int, j: int) -> int:
        if self.kind == "explicit":
            return 2 ** (2 ** (i + j)) + 2 ** j
        if self.kind == "seeded":
            return random.Random(f"lambda:{self.seed}:{i}:{j}").randrange(1, self.modulus)
        if self.default is not None:
            return int(self.table.get((i, j), self.default))
        return int(self.table[(i, j)])

    def describe(self) -> str:
        if self.kind == "seeded":
            return f"seeded:{self.seed}" + ("" if self.modulus == MERSENNE61 else f":{self.modulus}")
        return self.kind


ZERO_LAMBDA = LambdaSource.from_table({}, default=0)


def graded_tensor(m: int, p: int, lam: LambdaSource | None = None) -> Tensor3:
    if p < 1 or 2 * p + 1 > m:
        raise BadDimsError(f"need 1 <= p and 2p+1 <= m, got m={m}, p={p}")
    lam = LambdaSource.seeded() if lam is None else lam
    E = np.zeros((2 * p + 1, m, m), dtype=object)
    for u in range(1, p + 1):
        for alpha in range(1, m - u + 1):
            E[p - u, u + alpha - 1, alpha - 1] = lam(u, alpha)
    for j in range(p + 1):
        for beta in range(m - j):
            E[p + j, beta, beta + j] = 1
    return Tensor3(E)


def graded_slices(T: Tensor3) -> dict[int, np.ndarray]:
    """Map signed index j in {-p..p} to slice X_j."""
    a = T.dims[0]
    p = (a - 1) // 2
    return {j: T.slice_A(j + p) for j in range(-p, p + 1)}


def aft_tensor(k: int) -> Tensor3:
    if k < 1:
        raise BadDimsError("k must be at least 1")
    m = 2 ** k
    E = np.zeros((k + 1, m, m), dtype=object)
    for beta in range(m):
        E[0, beta, beta] = 1
    for j in range(1, k + 1):
        h = 2 ** (j - 1)
        for alpha in range(h):
            E[j, alpha, m - h + alpha] = 1
    return Tensor3(E)


def aft_prime_tensor(k: int, padded: bool = False) -> Tensor3:
    """The enlarged family T'_{m+1}, m = 2**k.

    Raw dims are (m+1, m+1, m): the extra B vector b_{m+1} carries
    a_{k+i} (x) b_{m+1} (x) c_i for i = 1..m-k.  ``padded`` zero-extends C to
    m+1.
    """
    T_m, T_extra = aft_prime_parts(k)
    T = T_m + T_extra
    if padded:
        m = 2 ** k
        T = pad(T, (m + 1, m + 1, m + 1))
    return T


def aft_prime_parts(k: int) -> tuple[Tensor3, Tensor3]:
    """``(embedded aft_tensor(k), extra part)`` in the raw (m+1, m+1, m) dims."""
    if k < 1:
        raise BadDimsError("k must be at least 1")
    m = 2 ** k
    base = pad(aft_tensor(k), (m + 1, m + 1, m))
    extra = np.zeros((m + 1, m + 1, m), dtype=object)
    for i in range(1, m - k + 1):
        extra[k + i, m, i - 1] = 1
    return base, Tensor3(extra)


def matmul_tensor(n: int, presentation: str = "standard") -> Tensor3:
    """n x n matrix multiplication in C^{n^2} (x) C^{n^2} (x) C^{n^2}.

    A index (i, j) -> i*n + j.  Standard: B (j, k) -> j*n + k, C (k, i) ->
    k*n + i.  Blockdiag reorders B as (k, j) -> k*n + j, so every A-contraction
    is blockdiag(x, ..., x) with x[j][i] = alpha[(i, j)].
    """
    if n < 2:
        raise BadDimsError("n must be at least 2")
    if presentation not in ("standard", "blockdiag"):
        raise ValueError(f"unknown presentation {presentation!r}")
    N = n * n
    E = np.zeros((N, N, N), dtype=object)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                b = j * n + k if presentation == "standard" else k * n + j
                E[i * n + j, b, k * n + i] = 1
    return Tensor3(E)


def matmul_presentation_perm(n: int) -> list[int]:
    """B permutation taking the standard presentation to blockdiag."""
    return [j * n + k for k in range(n) for j in range(n)]


def polymult_truncated(m: int) -> Tensor3:
    """Multiplication in C[X]/(X^m): entry [u][i][j] = 1 iff i + j = u."""
    if m < 1:
        raise BadDimsError("m must be at least 1")
    E = np.zeros((m, m, m), dtype=object)
    for i in range(m):
        for j in range(m - i):
            E[i + j, i, j] = 1
    return Tensor3(E)


def polymult_eps_decomposition(m: int, eps: float):
    """m rank-one triples summing to the multiplication tensor of C[X]/(X^m - eps).

    Evaluation at the m roots w_k of X^m = eps: b_k[i] = w_k**i,
    c_k[j] = w_k**j, a_k[u] = w_k**(-u) / m.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if m < 2:
        raise BadDimsError("m must be at least 2")
    roots = eps ** (1.0 / m) * np.exp(2j * np.pi * np.arange(m) / m)
    powers = np.arange(m)
    triples = []
    for w in roots:
        b = w ** powers
        triples.append((w ** (-powers) / m, b, b.copy()))
    return triples


def sum_rank_ones(triples) -> np.ndarray:
    return sum(np.einsum("i,j,k->ijk", a, b, c) for a, b, c in triples)


def eps_residual(m: int, eps: float) -> float:
    """Max-norm distance from the eps-family sum to polymult_truncated(m)."""
    approx = sum_rank_ones(polymult_eps_decomposition(m, eps))
    exact = polymult_truncated(m).entries.astype(float)
    return float(np.max(np.abs(approx - exact)))


def random_tensor(a: int, b: int, c: int, seed: int, p: int = MERSENNE61) -> Tensor3:
    if min(a, b, c) < 1:
        raise BadDimsError("dims must be positive")
    rng = random.Random(f"tensor:{seed}:{a}:{b}:{c}:{p}")
    E = np.array([rng.randrange(p) for _ in range(a * b * c)], dtype=object).reshape(a, b, c)
    return Tensor3(E)


def random_rank_sum(a: int, b: int, c: int, r: int, seed: int, bound: int = 5) -> Tensor3:
    """Sum of r rank-one tensors with integer factors in [-bound, bound]."""
    rng = random.Random(f"ranksum:{seed}:{a}:{b}:{c}:{r}")
    T = Tensor3.zeros(a, b, c)
    for _ in range(r):
        u = [rng.randint(-bound, bound) for _ in range(a)]
        v = [rng.randint(-bound, bound) for _ in range(b)]
        w = [rng.randint(-bound, bound) for _ in range(c)]
        T = T + Tensor3.rank_one(u, v, w)
    return T
