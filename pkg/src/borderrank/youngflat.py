"""Young flattenings T_A^{wedge p} and the commutator-block criterion.

The Young flattening of T in A (x) B (x) C is the map
Lambda^p A (x) B* -> Lambda^{p+1} A (x) C sending e_S (x) beta to
sum_j sign(S, j) e_{S + j} (x) X_j^T beta.  Rows are indexed by (S', gamma),
columns by (S, beta), both subset-major in lexicographic order.  A rank-one
tensor gives rank C(a-1, p), so rank / C(a-1, p) bounds border rank from below.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field
from functools import cached_property
from itertools import combinations
from math import ceil, comb

import numpy as np

from .exactmath import (DEFAULT_PRIMES, adjugate, det_exact, det_mod_p, matmul_exact,
                        rank_certified)
from .tensor3 import Tensor3, basis_change


class BadPError(ValueError):
    pass


class SingularSliceError(ArithmeticError):
    pass


@dataclass(frozen=True)
class WedgeBasis:
    """Ordered p-subsets of range(a), the standard basis of Lambda^p A."""

    a: int
    p: int

    @cached_property
    def subsets(self) -> tuple[tuple[int, ...], ...]:
        return tuple(combinations(range(self.a), self.p))

    @cached_property
    def index(self) -> dict[tuple[int, ...], int]:
        return {S: i for i, S in enumerate(self.subsets)}

    def __len__(self):
        return len(self.subsets)

    @staticmethod
    def insertion_sign(S, j: int) -> int:
        """Sign of moving e_j past the elements of S smaller than j."""
        return -1 if sum(1 for s in S if s < j) % 2 else 1

    @staticmethod
    def insert(S, j: int):
        """``(S + {j} sorted, sign)`` or None if j is already in S."""
        if j in S:
            return None
        return tuple(sorted(S + (j,))), WedgeBasis.insertion_sign(S, j)

    @staticmethod
    def delete(S, j: int):
        """Inverse of insert: ``(S - {j}, sign)`` or None if j is not in S."""
        if j not in S:
            return None
        rest = tuple(s for s in S if s != j)
        return rest, WedgeBasis.insertion_sign(rest, j)


def young_flattening_matrix(T: Tensor3, p: int) -> np.ndarray:
    a, b, c = T.dims
    if not 0 <= p <= a - 1:
        raise BadPError(f"p must be in [0, {a - 1}], got {p}")
    src, dst = WedgeBasis(a, p), WedgeBasis(a, p + 1)
    M = np.zeros((len(dst) * c, len(src) * b), dtype=object)
    nz = T.nonzeros()
    for si, S in enumerate(src.subsets):
        for j, beta, gamma, v in nz:
            ins = WedgeBasis.insert(S, j)
            if ins is None:
                continue
            Sp, sign = ins
            M[dst.index[Sp] * c + gamma, si * b + beta] += sign * v
    return M


def young_rank(T: Tensor3, p: int, primes=DEFAULT_PRIMES) -> tuple[int, bool, int]:
    """``(rank, certified, prime)``; certified iff full rank was observed."""
    return rank_certified(young_flattening_matrix(T, p), primes)


@dataclass
class BoundReport:
    tensor_id: str
    method: str
    params: dict = field(default_factory=dict)
    rank: int | None = None
    lower: int | None = None
    upper: int | None = None
    witness: dict | None = None
    certified: bool = False
    prime: int | None = None
    seed: int | None = None
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "BoundReport":
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def render(self) -> str:
        parts = [f"method = {self.method}"]
        if self.params:
            parts.append("params = " + ", ".join(f"{k}={v}" for k, v in self.params.items()))
        if self.rank is not None:
            parts.append(f"rank = {self.rank}")
        bound = f"lb = {self.lower}" if self.lower is not None else "lb = n/a"
        if self.upper is not None:
            bound += f", ub = {self.upper}"
        bound += ", certified" if self.certified else ", not certified"
        parts.append(bound)
        parts.append(f"prime = {self.prime}, seed = {self.seed}")
        parts.append(f"tensor = {self.tensor_id[:16]}")
        parts.extend(f"note: {n}" for n in self.notes)
        return "\n".join(parts)


def border_rank_lb(T: Tensor3, p: int, primes=DEFAULT_PRIMES) -> BoundReport:
    rank, certified, prime = young_rank(T, p, primes)
    denom = comb(T.dims[0] - 1, p)
    return BoundReport(
        tensor_id=T.digest(), method="flattening" if p == 0 else "young",
        params={"p": p, "binom": denom}, rank=rank, lower=ceil(rank / denom),
        certified=certified, prime=prime)


def best_border_rank_lb(T: Tensor3, primes=DEFAULT_PRIMES, p_values=None) -> BoundReport:
    """Maximize the Young bound over p; ties go to the smallest p."""
    p_values = range(T.dims[0]) if p_values is None else p_values
    best = None
    for p in p_values:
        rep = border_rank_lb(T, p, primes)
        if best is None or rep.lower > best.lower:
            best = rep
    best.params = dict(best.params, best_over=list(p_values))
    return best


def odd_full_rank_bound(m: int) -> int:
    """Bound from a full-rank Young flattening for a = b = c = m = 2p+1."""
    p = (m - 1) // 2
    return ceil(comb(m, p + 1) * m / comb(m - 1, p))


# Commutator blocks.  For a = 2p+1 the slot of signed index j is j + p.

def signed_order(p: int) -> list[int]:
    return list(range(p, 0, -1)) + list(range(-1, -p - 1, -1))


def _is_identity(X) -> bool:
    n = X.shape[0]
    return all(X[i, j] == (1 if i == j else 0) for i in range(n) for j in range(n))


@dataclass
class Normalized:
    """Slices rescaled so the anchor acts as the identity.

    ``Y[j] = adj(X_anchor) @ X_j`` equals det(X_anchor) * X_anchor^{-1} X_j;
    the common scalar does not affect any vanishing question.
    """

    tensor: Tensor3
    anchor: int
    Y: list
    scale: int
    combination: list | None = None


def normalize(T: Tensor3, anchor: int, seed: int = 0, tries: int = 100) -> Normalized:
    a, b, c = T.dims
    if b != c:
        raise ValueError(f"need b == c, got {T.dims}")
    X0 = T.slice_A(anchor)
    combo = None
    if det_exact(X0) == 0:
        rng = random.Random(f"anchor:{seed}")
        for _ in range(tries):
            alpha = [rng.randint(-3, 3) for _ in range(a)]
            alpha[anchor] = 1
            if det_exact(T.contract_A(alpha)) != 0:
                g = np.eye(a, dtype=object)
                g[anchor] = alpha
                T, combo = basis_change(T, gA=g), alpha
                break
        else:
            raise SingularSliceError(f"no invertible anchor after {tries} combinations")
        X0 = T.slice_A(anchor)
    if _is_identity(X0):
        return Normalized(T, anchor, [T.slice_A(j) for j in range(a)], 1, combo)
    adj, d = adjugate(X0)
    return Normalized(T, anchor, [matmul_exact(adj, T.slice_A(j)) for j in range(a)], d, combo)


def commutator(X, Y) -> np.ndarray:
    return matmul_exact(X, Y) - matmul_exact(Y, X)


def commutator_block_matrix(T: Tensor3, seed: int = 0) -> np.ndarray:
    """2mp x 2mp matrix whose (i, j) block is [X_i, X_j], order p..1, -1..-p."""
    a, m, _ = T.dims
    if a % 2 == 0:
        raise ValueError(f"need a = 2p+1, got a={a}")
    p = (a - 1) // 2
    norm = normalize(T, anchor=p, seed=seed)
    order = signed_order(p)
    Y = {j: norm.Y[j + p] for j in order}
    M = np.zeros((2 * m * p, 2 * m * p), dtype=object)
    for bi, i in enumerate(order):
        for bj, j in enumerate(order[bi + 1:], start=bi + 1):
            blk = commutator(Y[i], Y[j])
            M[bi * m:(bi + 1) * m, bj * m:(bj + 1) * m] = blk
            M[bj * m:(bj + 1) * m, bi * m:(bi + 1) * m] = -blk
    return M


def block(M: np.ndarray, i: int, j: int, p: int, m: int) -> np.ndarray:
    """Block (i, j) of a commutator block matrix, by signed index."""
    order = signed_order(p)
    bi, bj = order.index(i), order.index(j)
    return M[bi * m:(bi + 1) * m, bj * m:(bj + 1) * m]


def reduced_flattening_matrix(T: Tensor3, p: int, anchor: int | None = None) -> np.ndarray:
    """Young flattening with the anchor slot eliminated (Schur complement).

    With X_anchor invertible, the columns e_R (x) beta (anchor not in R) are
    solved away against rows e_{R + anchor} (x) gamma.  What remains maps the
    (p-1)-subsets avoiding the anchor to (p+1)-subsets avoiding it, and it is
    injective iff the full Young flattening is.  Each block is (up to sign
    and transpose) a commutator of anchor-normalized slices.  The result is
    scaled by det(X_anchor) to stay integral.
    """
    a, b, c = T.dims
    if b != c:
        raise ValueError(f"need b == c, got {T.dims}")
    if not 1 <= p <= a - 2:
        raise BadPError(f"p must be in [1, {a - 2}], got {p}")
    o = (a - 1) // 2 if anchor is None else anchor
    X0 = T.slice_A(o)
    adj, d = adjugate(X0)
    M = young_flattening_matrix(T, p)
    src, dst = WedgeBasis(a, p), WedgeBasis(a, p + 1)

    def idx(basis, keep, n):
        return [si * n + t for si, S in enumerate(basis.subsets) if (o in S) == keep
                for t in range(n)]

    cin, cout = idx(src, True, b), idx(src, False, b)
    rin, rout = idx(dst, True, c), idx(dst, False, c)
    # K = M[rin, cout] is block diagonal with blocks sign_R * X0^T.
    Kinv = np.zeros((len(cout), len(rin)), dtype=object)
    adjT = adj.T
    pos_out = {S: n for n, S in enumerate(S for S in src.subsets if o not in S)}
    for n, Sp in enumerate(S for S in dst.subsets if o in S):
        R, sign = WedgeBasis.delete(Sp, o)
        r0 = pos_out[R] * b
        Kinv[r0:r0 + b, n * c:(n + 1) * c] = sign * adjT
    A_ = M[np.ix_(rout, cin)]
    B_ = M[np.ix_(rout, cout)]
    C_ = M[np.ix_(rin, cin)]
    return d * A_ - matmul_exact(matmul_exact(B_, Kinv), C_)


def det_nonzero(M, primes=DEFAULT_PRIMES) -> tuple[bool, bool, int]:
    """``(nonzero, certified, prime)``.  Nonzero mod any prime is a proof."""
    for p in primes:
        if det_mod_p(M, p) != 0:
            return True, True, p
    return False, False, primes[0]


@dataclass
class CommutatorTest:
    nonzero: bool
    reduced_nonzero: bool
    report: BoundReport


def commutator_det_test(T: Tensor3, primes=DEFAULT_PRIMES, seed: int = 0) -> CommutatorTest:
    """Determinant tests for a = 2p+1, b = c = m.

    ``nonzero`` is the determinant of the commutator block matrix.
    ``reduced_nonzero`` is the determinant of the reduced flattening, which is
    exactly injectivity of the Young flattening; only it feeds the bound.
    """
    a, m, _ = T.dims
    p = (a - 1) // 2
    norm = normalize(T, anchor=p, seed=seed)
    lit_nz, lit_cert, lit_p = det_nonzero(commutator_block_matrix(norm.tensor), primes)
    red_nz, red_cert, red_p = det_nonzero(reduced_flattening_matrix(norm.tensor, p), primes)
    rows = comb(a, p + 1) * m
    notes = []
    if lit_nz != red_nz:
        notes.append("commutator block determinant disagrees with injectivity")
    if norm.combination is not None:
        notes.append(f"anchor replaced by combination {norm.combination}")
    rep = BoundReport(
        tensor_id=T.digest(), method="commutator-det",
        params={"p": p, "block_det_nonzero": lit_nz, "reduced_det_nonzero": red_nz,
                "block_prime": lit_p},
        rank=rows if red_nz else None,
        lower=ceil(rows / comb(a - 1, p)) if red_nz else None,
        certified=red_nz and red_cert, prime=red_p, notes=notes)
    return CommutatorTest(lit_nz, red_nz, rep)


def chain_sizes(m: int, p: int) -> list[int]:
    return [min(i, p, m + p - i) for i in range(1, m + p)]


@dataclass
class FactorizationReport:
    m: int
    p: int
    det_full: int
    det_lower_left: int
    det_upper_right: int
    square_holds: bool
    chain_sizes: list
    expected_sizes: list
    chain_factors: list
    block_structure: bool
    product_matches: bool


def lower_left_chain_matrix(T: Tensor3) -> np.ndarray:
    """mp x mp matrix with block [X_i, X_{-k}] at (k, i); rows k = 1..p, cols i = p..1.

    This is the lower-left quadrant of the commutator block matrix with every
    block negated, so its determinant is (-1)^{mp} times the quadrant's.
    """
    a, m, _ = T.dims
    p = (a - 1) // 2
    M = commutator_block_matrix(T)
    return -M[m * p:, :m * p]


def factorization_check(T: Tensor3) -> FactorizationReport:
    a, m, _ = T.dims
    p = (a - 1) // 2
    M = commutator_block_matrix(T)
    n = m * p
    LL, UR = M[n:, :n], M[:n, n:]
    d_full, d_ll, d_ur = det_exact(M), det_exact(LL), det_exact(UR)
    Q = -LL
    # Block (k, i) is graded on diagonal i - k, so entry ((k, r), (i, c)) is
    # nonzero only when r - k == c - i.  Group rows and columns by that label.
    pos_blocks = list(range(p, 0, -1))
    row_label = [r - k for k in range(1, p + 1) for r in range(m)]
    col_label = [cc - i for i in pos_blocks for cc in range(m)]
    structure = all(Q[r, cc] == 0 or row_label[r] == col_label[cc]
                    for r in range(n) for cc in range(n))
    sizes, factors = [], []
    for lab in sorted(set(row_label) | set(col_label)):
        rows = [r for r in range(n) if row_label[r] == lab]
        cols = [cc for cc in range(n) if col_label[cc] == lab]
        if len(rows) != len(cols):
            structure = False
            break
        sizes.append(len(rows))
        factors.append(det_exact(Q[np.ix_(rows, cols)]))
    prod = 1
    for f in factors:
        prod *= f
    return FactorizationReport(
        m=m, p=p, det_full=d_full, det_lower_left=d_ll, det_upper_right=d_ur,
        square_holds=abs(d_full) == d_ll * d_ll,
        chain_sizes=sizes, expected_sizes=chain_sizes(m, p), chain_factors=factors,
        block_structure=structure, product_matches=structure and abs(prod) == abs(d_ll))
