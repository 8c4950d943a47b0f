import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from borderrank.constructions import aft_tensor, graded_tensor, matmul_tensor, polymult_truncated
from borderrank.tensor3 import (
    Tensor3, TensorFormatError, basis_change, clear_denominators, dumps,
    find_A_specialization, load, loads, pad, permutation_matrix, reversal, save,
    specialization_is_unique, specialize_A,
)
from borderrank.constructions import LambdaSource

tensors = st.tuples(st.integers(1, 4), st.integers(1, 4), st.integers(1, 4)).flatmap(
    lambda d: st.lists(st.integers(-10 ** 30, 10 ** 30), min_size=d[0] * d[1] * d[2],
                       max_size=d[0] * d[1] * d[2]).map(
        lambda xs: Tensor3(np.array(xs, dtype=object).reshape(d))))


def test_t3_slices_match_display():
    lam = LambdaSource.from_table({(1, 1): 11, (1, 2): 12})
    T = graded_tensor(3, 1, lam)
    assert (T.slice_A(1) == np.eye(3, dtype=object)).all()
    X1 = T.slice_A(2)
    assert {(i, j) for (i, j), v in np.ndenumerate(X1) if v} == {(0, 1), (1, 2)}
    Xm1 = T.slice_A(0)
    assert Xm1[1, 0] == 11 and Xm1[2, 1] == 12 and Tensor3(Xm1[None]).nnz == 2


def test_zero_tensor_slices_and_errors():
    Z = Tensor3.zeros(2, 3, 3)
    assert Z.nnz == 0 and not Z.slice_A(1).any()
    with pytest.raises(IndexError):
        Z.slice_A(2)
    with pytest.raises(ValueError):
        Tensor3(np.zeros((2, 0, 3)))


def test_flatten_rank_one_single_entry():
    T = Tensor3.rank_one([0, 1], [0, 0, 1], [1, 0])
    for mode in "ABC":
        F = T.flatten(mode)
        assert np.count_nonzero(F != 0) == 1


def test_contract_A_matmul_blockdiag():
    T = matmul_tensor(2, "blockdiag")
    X = T.contract_A([1, 1, 1, 1])
    assert (X[:2, :2] == X[2:, 2:]).all() and not X[:2, 2:].any() and not X[2:, :2].any()
    alpha = [3, -1, 7, 2]
    X = T.contract_A(alpha)
    assert (X[:2, :2] == X[2:, 2:]).all()
    assert not T.contract_A([0] * 4).any()
    with pytest.raises(ValueError):
        T.contract_A([1, 2])


def test_contract_A_unit_vector_is_slice():
    T = aft_tensor(2)
    for j in range(T.dims[0]):
        e = [int(i == j) for i in range(T.dims[0])]
        assert (T.contract_A(e) == T.slice_A(j)).all()


def test_b_reversal_of_aft_support_offsets():
    m = 8
    R = basis_change(aft_tensor(3), gB=reversal(m))
    offsets = []
    for X in R.slices():
        diag = {int(i) + int(j) - (m - 1) for (i, j), v in np.ndenumerate(X) if v}
        assert len(diag) == 1
        offsets.append(diag.pop())
    assert sorted(abs(o) for o in offsets) == [0, 4, 6, 7]


def test_basis_change_identity_and_A_permutation():
    T = graded_tensor(5, 2)
    assert basis_change(T) == T
    P = permutation_matrix([4, 0, 3, 1, 2])
    S = basis_change(T, gA=P)
    key = lambda X: tuple(map(int, X.flat))  # noqa: E731
    assert sorted(map(key, S.slices())) == sorted(map(key, T.slices()))


def test_pad():
    T = aft_tensor(2)
    assert pad(T, T.dims) == T
    P = pad(T, (4, 5, 6))
    assert P.dims == (4, 5, 6) and P.nnz == T.nnz and not P.entries[:, 4:, :].any()
    assert pad(Tensor3.zeros(1, 1, 1), (2, 2, 2)).nnz == 0
    with pytest.raises(ValueError):
        pad(T, (1, 4, 4))


def test_specialize_identity_and_unit_row():
    P = polymult_truncated(4)
    assert specialize_A(P, np.eye(4, dtype=object)) == P
    one = specialize_A(P, [[0, 0, 1, 0]])
    assert one.dims == (1, 4, 4) and (one.slice_A(0) == P.slice_A(2)).all()
    S = find_A_specialization(P, P)
    assert (S == np.eye(4, dtype=object)).all()
    S = find_A_specialization(P, Tensor3(P.entries[:1]))
    assert list(S[0]) == [1, 0, 0, 0]


def test_aft_embeds_in_truncated_polynomials_after_c_reversal():
    P = polymult_truncated(8)
    target = basis_change(aft_tensor(3), gC=reversal(8))
    S = find_A_specialization(P, target)
    assert specialization_is_unique(P)
    assert [list(row).index(1) for row in S] == [7, 0, 1, 3]
    assert specialize_A(P, S) == target


def test_specialization_absent_returns_none():
    P = polymult_truncated(4)
    assert find_A_specialization(P, Tensor3(np.eye(4, dtype=object)[None] * 0 + 1)) is None


def test_clear_denominators():
    from fractions import Fraction
    S, d = clear_denominators([[Fraction(1, 2), Fraction(1, 3)]])
    assert d == 6 and list(S[0]) == [3, 2]


@given(tensors)
def test_file_round_trip(T):
    assert loads(dumps(T)) == T
    assert loads(dumps(T)).digest() == T.digest()


def test_file_round_trip_on_disk(tmp_path):
    T = graded_tensor(5, 2, LambdaSource.explicit())
    save(T, tmp_path / "t.json")
    assert load(tmp_path / "t.json") == T


@pytest.mark.parametrize("bad", [
    "not json",
    json.dumps({"dims": [2, 2], "entries": []}),
    json.dumps({"dims": [1, 1, 1], "entries": [[0, 0, 0, "1"], [0, 0, 0, "2"]]}),
    json.dumps({"dims": [1, 1, 1], "entries": [[0, 0, 1, "1"]]}),
    json.dumps({"dims": [1, 1, 1], "entries": [[0, 0, 0, 1]]}),
    json.dumps({"format": "other", "dims": [1, 1, 1], "entries": []}),
])
def test_file_rejects_malformed(bad):
    with pytest.raises(TensorFormatError):
        loads(bad)


def test_equality_and_hash():
    a, b = aft_tensor(2), aft_tensor(2)
    assert a == b and hash(a) == hash(b) and a != aft_tensor(3)
    assert (a - b).nnz == 0
