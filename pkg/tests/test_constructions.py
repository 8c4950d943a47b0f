import math

import numpy as np
import pytest

from borderrank.constructions import (
    ZERO_LAMBDA, BadDimsError, LambdaSource, aft_prime_parts, aft_prime_tensor, aft_tensor,
    eps_residual, graded_slices, graded_tensor, matmul_presentation_perm, matmul_tensor,
    polymult_eps_decomposition, polymult_truncated, random_rank_sum, random_tensor,
)
from borderrank.exactmath import rank_mod_p
from borderrank.tensor3 import Tensor3, basis_change, pad, permutation_matrix
from borderrank.youngflat import young_rank

# Frozen outputs: regenerate only on a deliberate change of construction.
DIGESTS = {
    "graded:m=3,seed=42": "441e5c837112b49b10d062d29f22123e80042500053d7537eb619c7d11ffacf6",
    "graded:m=5,seed=42": "4293dd5a7dd495a610589e142ca7077d0bcb84fa5cd13f3b49e0f002f2b10eb6",
    "aft:k=3": "2f4efa1ababed098872df70c631bfee1e30729d1a290bc5dd4e465d344a2a429",
    "aft-prime:k=3,padded": "06f513f607d5290973f73a5aae16402a72ffe379011b71e035a2bbd9b491ff8d",
    "matmul:n=2": "242644ede9f0bc2d9d3a371d4de73af3e2df24dc7e07dca8308255d565e34c41",
    "polymult:m=8": "c092653fae629c809a11d8af2559c00a1d4e6c7f8e9b7d47e4eaa7b8af30b6b0",
}
SEEDED_42 = {(1, 1): 2165874839173980825, (1, 2): 2000305896558578905,
             (2, 1): 1823923815418341263, (2, 3): 1211306239061278314}


def test_frozen_digests():
    lam = LambdaSource.seeded(42)
    got = {
        "graded:m=3,seed=42": graded_tensor(3, 1, lam),
        "graded:m=5,seed=42": graded_tensor(5, 2, lam),
        "aft:k=3": aft_tensor(3),
        "aft-prime:k=3,padded": aft_prime_tensor(3, padded=True),
        "matmul:n=2": matmul_tensor(2),
        "polymult:m=8": polymult_truncated(8),
    }
    assert {k: T.digest() for k, T in got.items()} == DIGESTS


def test_seeded_lambda_is_stable_and_order_free():
    lam = LambdaSource.seeded(42)
    assert {k: lam(*k) for k in SEEDED_42} == SEEDED_42
    assert lam(1, 1) == LambdaSource.seeded(42)(1, 1)
    assert lam(1, 1) != LambdaSource.seeded(43)(1, 1)


def test_explicit_lambda_formula():
    lam = LambdaSource.explicit()
    assert lam(1, 1) == 2 ** 4 + 2 and lam(2, 3) == 2 ** 32 + 8


def test_table_lambda_missing_key():
    with pytest.raises(KeyError):
        LambdaSource.from_table({})(1, 1)
    with pytest.raises(ValueError):
        LambdaSource(kind="nope")


def test_graded_counts_and_bad_dims():
    assert graded_tensor(3, 1).nnz == 7
    with pytest.raises(BadDimsError):
        graded_tensor(4, 2)
    with pytest.raises(BadDimsError):
        graded_tensor(3, 0)


def test_graded_slices_grading():
    m, p = 7, 3
    X = graded_slices(graded_tensor(m, p))
    for j, S in X.items():
        for (r, c), v in np.ndenumerate(S):
            if v:
                assert c - r == j


def test_graded_zero_lambda_loses_full_rank():
    T = graded_tensor(5, 2, ZERO_LAMBDA)
    assert T.nnz == 5 + 4 + 3
    assert young_rank(T, 2)[0] < 50


def test_aft_k3_display_positions():
    T = aft_tensor(3)
    assert T.nnz == 15
    assert (T.slice_A(0) == np.eye(8, dtype=object)).all()
    pos = lambda j: sorted((c + 1, b + 1) for (b, c), v in np.ndenumerate(T.slice_A(j)) if v)  # noqa: E731
    assert pos(3) == [(5, 1), (6, 2), (7, 3), (8, 4)]
    assert pos(2) == [(7, 1), (8, 2)]
    assert pos(1) == [(8, 1)]


def test_aft_k1():
    T = aft_tensor(1)
    assert (T.slice_A(0) == np.eye(2, dtype=object)).all()
    assert T.slice_A(1).tolist() == [[0, 1], [0, 0]]
    assert rank_mod_p(T.flatten("B")) == 2


def test_aft_prime_parts():
    k, m = 3, 8
    T = aft_prime_tensor(k)
    assert T.dims == (m + 1, m + 1, m)
    base, extra = aft_prime_parts(k)
    assert base + extra == T
    assert extra.nnz == m - k
    # extra part lives on the last B row, slots a_{k+1}..a_m, C indices 0..m-k-1
    assert sorted((i, j, c) for i, j, c, _ in extra.nonzeros()) == [
        (k + i, m, i - 1) for i in range(1, m - k + 1)]
    assert rank_mod_p(extra.flatten("A")) == m - k
    P = aft_prime_tensor(k, padded=True)
    assert (P - pad(T, P.dims)).nnz == 0


def test_matmul_basics():
    T = matmul_tensor(2)
    assert T.nnz == 8 and set(v for *_, v in T.nonzeros()) == {1}
    for n in (2, 3):
        T = matmul_tensor(n)
        assert all(rank_mod_p(T.flatten(mode)) == n * n for mode in "ABC")
    perm = matmul_presentation_perm(3)
    assert basis_change(matmul_tensor(3), gB=permutation_matrix(perm)) == matmul_tensor(3, "blockdiag")


def test_polymult():
    P = polymult_truncated(2)
    assert P.slice_A(1).tolist() == [[0, 1], [1, 0]]
    for m in (1, 4, 8):
        E = polymult_truncated(m).entries
        # multiplication by 1: the b_0 slice is the identity on A x C
        assert (E[:, 0, :] == np.eye(m, dtype=object)).all()
        assert Tensor3(E[:1]).nnz == 1


def test_eps_family():
    for m in (4, 8, 16):
        r3 = eps_residual(m, 1e-3)
        assert abs(r3 / 1e-3 - 1) < 1e-6 if m == 8 else abs(r3 / 1e-3 - 1) < 1e-4
        slope = math.log(eps_residual(m, 1e-3) / eps_residual(m, 1e-6)) / math.log(1e3)
        assert abs(slope - 1) < 0.05
    for a, b, c in polymult_eps_decomposition(4, 0.1):
        assert np.linalg.matrix_rank(np.einsum("i,j,k->ijk", a, b, c).reshape(4, 16)) == 1


def test_random_builders_deterministic():
    assert random_tensor(3, 3, 3, seed=5) == random_tensor(3, 3, 3, seed=5)
    T = random_tensor(3, 3, 3, seed=5)
    assert all(rank_mod_p(T.flatten(mode)) == 3 for mode in "ABC")
    R = random_rank_sum(3, 4, 4, 2, seed=1)
    assert young_rank(R, 1)[0] <= 2 * 2


def test_rank_one_tensor_class():
    T = Tensor3.rank_one([1, 2], [3], [4, 5])
    assert T.entries.tolist() == [[[12, 15]], [[24, 30]]]
