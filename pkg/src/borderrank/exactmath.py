"""Exact and numeric linear algebra kernels.

Exact matrices are numpy arrays of ``dtype=object`` holding Python ints, so
entries never overflow.  Modular work happens on ``uint64`` arrays; the
default modulus is the Mersenne prime 2**61 - 1, for which products are
reduced with a split-multiply that stays inside 64 bits.

Pivoting is always "first nonzero entry in the column", which keeps every
rank and determinant computation deterministic.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

MERSENNE61 = (1 << 61) - 1
# Retry primes used when the default prime reports a rank deficiency.
RETRY_PRIMES = (2147483647, 1000000007)
DEFAULT_PRIMES = (MERSENNE61,) + RETRY_PRIMES
DET_EXACT_CAP = 64

_M31 = np.uint64((1 << 31) - 1)
_M30 = np.uint64((1 << 30) - 1)
_P61 = np.uint64(MERSENNE61)


class NonSquareError(ValueError):
    pass


class DimensionCapExceeded(ValueError):
    pass


class NonFiniteError(ValueError):
    pass


def exact_matrix(rows) -> np.ndarray:
    """Coerce a nested sequence or array to an object array of Python ints."""
    arr = np.asarray(rows, dtype=object)
    if arr.ndim != 2:
        if arr.size == 0:
            return np.zeros((0, 0), dtype=object)
        raise ValueError(f"expected a 2-d matrix, got shape {arr.shape}")
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        if isinstance(v, (bool, np.bool_)):
            v = int(v)
        elif isinstance(v, np.integer):
            v = int(v)
        elif not isinstance(v, int):
            raise TypeError(f"non-integer entry {v!r} at {idx}")
        out[idx] = v
    return out


def reduce_mod(M, p: int = MERSENNE61) -> np.ndarray:
    """Reduce an integer matrix into [0, p) as uint64.

    Python's int modulo already handles arbitrary-size values limb by limb,
    so doubly exponential entries reduce without any special casing.
    """
    arr = np.asarray(M, dtype=object)
    if arr.size == 0:
        return np.zeros(arr.shape, dtype=np.uint64)
    return (arr % p).astype(np.uint64)


def _mulmod61(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # a, b < 2**61.  Split into 31-bit halves; use 2**61 == 1 (mod p).
    a_hi, a_lo = a >> np.uint64(31), a & _M31
    b_hi, b_lo = b >> np.uint64(31), b & _M31
    mid = a_hi * b_lo + a_lo * b_hi
    x = ((a_hi * b_hi) << np.uint64(1)) + (mid >> np.uint64(30)) \
        + ((mid & _M30) << np.uint64(31)) + a_lo * b_lo
    x = (x & _P61) + (x >> np.uint64(61))
    x = (x & _P61) + (x >> np.uint64(61))
    return np.where(x >= _P61, x - _P61, x)


def mulmod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Elementwise (broadcasting) product mod p of reduced uint64 arrays."""
    if p == MERSENNE61:
        return _mulmod61(a, b)
    if p < (1 << 32):
        return (a * b) % np.uint64(p)
    prod = np.asarray(a, dtype=object) * np.asarray(b, dtype=object) % p
    return prod.astype(np.uint64)


def submod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    pp = np.uint64(p)
    return np.where(a >= b, a - b, a + (pp - b))


def _eliminate(A: np.ndarray, p: int, stop_at_singular: bool = False):
    """Forward elimination in place.  Returns (rank, pivots, swaps)."""
    rows, cols = A.shape
    rank = 0
    pivots: list[int] = []
    swaps = 0
    for col in range(cols):
        if rank == rows:
            break
        nz = np.flatnonzero(A[rank:, col])
        if nz.size == 0:
            if stop_at_singular:
                return rank, pivots, swaps
            continue
        piv = rank + int(nz[0])
        if piv != rank:
            A[[rank, piv]] = A[[piv, rank]]
            swaps += 1
        pv = int(A[rank, col])
        pivots.append(pv)
        below = rank + 1 + np.flatnonzero(A[rank + 1:, col])
        if below.size:
            inv = np.uint64(pow(pv, p - 2, p))
            f = mulmod(A[below, col], inv, p)
            prow = A[rank, col:]
            A[np.ix_(below, np.arange(col, cols))] = submod(
                A[below, col:], mulmod(f[:, None], prow[None, :], p), p)
        rank += 1
    return rank, pivots, swaps


def rank_mod_p(M, p: int = MERSENNE61) -> int:
    """Rank of an integer matrix over the field with p elements."""
    A = reduce_mod(M, p) if np.asarray(M).dtype != np.uint64 else np.array(M, copy=True)
    if A.size == 0:
        return 0
    return _eliminate(A, p)[0]


def kernel_dim_mod_p(M, p: int = MERSENNE61) -> int:
    M = np.asarray(M)
    return M.shape[1] - rank_mod_p(M, p)


def det_mod_p(M, p: int = MERSENNE61) -> int:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NonSquareError(f"determinant needs a square matrix, got {M.shape}")
    n = M.shape[0]
    if n == 0:
        return 1
    A = reduce_mod(M, p) if M.dtype != np.uint64 else M.copy()
    rank, pivots, swaps = _eliminate(A, p, stop_at_singular=True)
    if rank < n:
        return 0
    d = 1
    for v in pivots:
        d = d * v % p
    if swaps % 2:
        d = (p - d) % p
    return d


def rank_certified(M, primes: Sequence[int] = DEFAULT_PRIMES) -> tuple[int, bool, int]:
    """Rank with the retry policy.

    Returns ``(rank, certified, prime)``.  Full rank modulo any prime proves
    full rank over the rationals; otherwise the largest modular rank seen is
    reported with ``certified=False``.
    """
    M = np.asarray(M)
    full = min(M.shape) if M.ndim == 2 else 0
    best, best_p = -1, primes[0]
    for p in primes:
        r = rank_mod_p(M, p)
        if r > best:
            best, best_p = r, p
        if r == full:
            return r, True, p
    return best, False, best_p


def det_exact(M, cap: int = DET_EXACT_CAP) -> int:
    """Integer determinant by fraction-free (Bareiss) elimination."""
    A = exact_matrix(M)
    n, ncols = A.shape
    if n != ncols:
        raise NonSquareError(f"determinant needs a square matrix, got {A.shape}")
    if n > cap:
        raise DimensionCapExceeded(f"dimension {n} exceeds det_exact cap {cap}")
    if n == 0:
        return 1
    a = [[int(x) for x in row] for row in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        rk = a[k]
        for i in range(k + 1, n):
            ri = a[i]
            aik = ri[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * akk - aik * rk[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def rank_numeric(M, rel_tol: float = 1e-8) -> int:
    """Numerical rank: singular values above ``rel_tol`` times the largest."""
    if rel_tol <= 0:
        raise ValueError("rel_tol must be positive")
    A = np.asarray(M)
    if A.size == 0:
        return 0
    if not np.all(np.isfinite(A)):
        raise NonFiniteError("matrix has non-finite entries")
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


def matmul_exact(A, B) -> np.ndarray:
    return np.dot(np.asarray(A, dtype=object), np.asarray(B, dtype=object))


def adjugate(M) -> tuple[np.ndarray, int]:
    """Return ``(adj(M), det(M))`` for a square integer matrix.

    Computed by exact rational Gauss-Jordan, then scaled by the determinant,
    so ``M @ adj(M) == det(M) * I`` holds over the integers.
    """
    A = exact_matrix(M)
    n = A.shape[0]
    if A.shape != (n, n):
        raise NonSquareError(f"adjugate needs a square matrix, got {A.shape}")
    d = det_exact(A, cap=max(DET_EXACT_CAP, n))
    if d == 0:
        raise ZeroDivisionError("singular matrix")
    aug = [[Fraction(int(x)) for x in A[i]] + [Fraction(int(i == j)) for j in range(n)]
           for i in range(n)]
    for c in range(n):
        piv = next(r for r in range(c, n) if aug[r][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        pv = aug[c][c]
        aug[c] = [x / pv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    adj = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            v = aug[i][n + j] * d
            assert v.denominator == 1
            adj[i, j] = int(v)
    return adj, d


def solve_rational(K, t) -> tuple[list[Fraction] | None, int]:
    """Solve ``K x = t`` exactly over the rationals.

    Returns ``(x, nullity)`` where x is one solution (free variables set to
    zero) or None when the system is inconsistent.
    """
    K = np.asarray(K, dtype=object)
    rows, cols = K.shape
    aug = [[Fraction(int(K[i, j])) for j in range(cols)] + [Fraction(int(t[i]))]
           for i in range(rows)]
    pivcols: list[int] = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        pv = aug[r][c]
        aug[r] = [x / pv for x in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivcols.append(c)
        r += 1
        if r == rows:
            break
    if any(aug[i][cols] != 0 for i in range(r, rows)):
        return None, cols - r
    x = [Fraction(0)] * cols
    for i, c in enumerate(pivcols):
        x[c] = aug[i][cols]
    return x, cols - r


def rank_rational(M) -> int:
    """Exact rank over the rationals by Fraction elimination (slow; small inputs)."""
    M = exact_matrix(M)
    if M.size == 0:
        return 0
    rows = [[Fraction(int(x)) for x in row] for row in M]
    rank = 0
    for c in range(M.shape[1]):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(rank + 1, len(rows)):
            if rows[i][c] != 0:
                f = rows[i][c] / rows[rank][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def _powmod_vec(x: np.ndarray, e: int, p: int) -> np.ndarray:
    result = np.ones_like(x)
    base = x % p
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


def batch_rank_mod_p(A: np.ndarray, p: int) -> np.ndarray:
    """Ranks of a stack of matrices (shape N x r x c) modulo a prime p < 2**31."""
    if p >= (1 << 31):
        raise ValueError("batched kernel needs p < 2**31")
    A = np.asarray(A, dtype=np.int64) % p
    if A.shape[2] > A.shape[1]:
        A = np.ascontiguousarray(A.transpose(0, 2, 1))
    N, R, C = A.shape
    rank = np.zeros(N, dtype=np.int64)
    rows = np.arange(R)
    for col in range(C):
        cand = (A[:, :, col] != 0) & (rows[None, :] >= rank[:, None])
        has = cand.any(axis=1)
        if not has.any():
            continue
        b = np.flatnonzero(has)
        piv = np.argmax(cand[b], axis=1)
        rk = rank[b]
        tmp = A[b, piv].copy()
        A[b, piv] = A[b, rk]
        inv = _powmod_vec(tmp[:, col], p - 2, p)
        prow = tmp * inv[:, None] % p
        A[b, rk] = prow
        f = A[b, :, col].copy()
        f[rows[None, :] <= rk[:, None]] = 0
        A[b] = (A[b] - f[:, :, None] * prow[:, None, :]) % p
        rank[b] += 1
    return rank
