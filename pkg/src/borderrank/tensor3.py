"""Dense order-3 tensors with exact integer entries.

A tensor lives in A (x) B (x) C with dims (a, b, c).  Slice ``X_j`` along A is
the b-by-c matrix with row = B index, column = C index.  Flattenings use
lexicographic (A-index major) column order.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from pathlib import Path

import numpy as np

from .exactmath import exact_matrix, rank_mod_p, solve_rational

FILE_FORMAT = "tensor3"
FILE_VERSION = 1


class TensorFormatError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Tensor3:
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=object)
        if arr.ndim != 3 or min(arr.shape) < 1:
            raise ValueError(f"Tensor3 needs three positive dims, got {arr.shape}")
        out = np.empty(arr.shape, dtype=object)
        for idx, v in np.ndenumerate(arr):
            out[idx] = int(v)
        out.flags.writeable = False
        object.__setattr__(self, "entries", out)

    @classmethod
    def zeros(cls, a: int, b: int, c: int) -> "Tensor3":
        return cls(np.zeros((a, b, c), dtype=object))

    @classmethod
    def from_slices(cls, slices) -> "Tensor3":
        return cls(np.stack([exact_matrix(s) for s in slices]))

    @classmethod
    def rank_one(cls, u, v, w) -> "Tensor3":
        u, v, w = (np.asarray(x, dtype=object) for x in (u, v, w))
        return cls(u[:, None, None] * v[None, :, None] * w[None, None, :])

    @property
    def dims(self) -> tuple[int, int, int]:
        return tuple(self.entries.shape)

    def __repr__(self):
        return f"Tensor3(dims={self.dims}, nnz={self.nnz})"

    def __eq__(self, other):
        if not isinstance(other, Tensor3):
            return NotImplemented
        return self.dims == other.dims and bool(np.all(self.entries == other.entries))

    def __hash__(self):
        return hash(self.digest())

    def __add__(self, other: "Tensor3") -> "Tensor3":
        if self.dims != other.dims:
            raise ValueError(f"dims differ: {self.dims} vs {other.dims}")
        return Tensor3(self.entries + other.entries)

    def __sub__(self, other: "Tensor3") -> "Tensor3":
        if self.dims != other.dims:
            raise ValueError(f"dims differ: {self.dims} vs {other.dims}")
        return Tensor3(self.entries - other.entries)

    @property
    def nnz(self) -> int:
        return int(np.count_nonzero(self.entries != 0))

    def nonzeros(self):
        """Sorted list of ``(i, j, k, value)`` for nonzero entries."""
        return [(i, j, k, int(v)) for (i, j, k), v in np.ndenumerate(self.entries) if v != 0]

    def slices(self) -> list[np.ndarray]:
        return [self.slice_A(j) for j in range(self.dims[0])]

    def slice_A(self, j: int) -> np.ndarray:
        if not 0 <= j < self.dims[0]:
            raise IndexError(f"slice index {j} out of range for a={self.dims[0]}")
        return self.entries[j].copy()

    def flatten(self, mode: str) -> np.ndarray:
        a, b, c = self.dims
        E = self.entries
        if mode == "A":
            return E.reshape(a, b * c).copy()
        if mode == "B":
            return E.transpose(1, 0, 2).reshape(b, a * c).copy()
        if mode == "C":
            return E.transpose(2, 0, 1).reshape(c, a * b).copy()
        raise ValueError(f"unknown mode {mode!r}")

    def contract_A(self, alpha) -> np.ndarray:
        alpha = list(alpha)
        if len(alpha) != self.dims[0]:
            raise ValueError(f"need {self.dims[0]} coefficients, got {len(alpha)}")
        out = np.zeros(self.dims[1:], dtype=object)
        for j, x in enumerate(alpha):
            if x:
                out = out + int(x) * self.entries[j]
        return out

    def digest(self) -> str:
        return hashlib.sha256(dumps(self).encode()).hexdigest()

    def transpose_BC(self) -> "Tensor3":
        return Tensor3(self.entries.transpose(0, 2, 1))


def _apply(E: np.ndarray, g, axis: int) -> np.ndarray:
    g = exact_matrix(g)
    n = E.shape[axis]
    if g.shape != (n, n):
        raise ValueError(f"factor {axis}: expected {n}x{n} matrix, got {g.shape}")
    out = np.tensordot(g, E, axes=([1], [axis]))
    return np.moveaxis(out, 0, axis)


def basis_change(T: Tensor3, gA=None, gB=None, gC=None) -> Tensor3:
    """Apply ``gA (x) gB (x) gC``; new index i collects ``g[i][i'] * old[i']``.

    Invertibility is the caller's responsibility; ranks are preserved only
    for invertible factors.
    """
    E = T.entries
    for axis, g in enumerate((gA, gB, gC)):
        if g is not None:
            E = _apply(E, g, axis)
    return Tensor3(E)


def permutation_matrix(perm) -> np.ndarray:
    """Matrix sending old index ``perm[i]`` to new index i."""
    n = len(perm)
    P = np.zeros((n, n), dtype=object)
    for i, j in enumerate(perm):
        P[i, j] = 1
    return P


def reversal(n: int) -> np.ndarray:
    return permutation_matrix(list(range(n - 1, -1, -1)))


def pad(T: Tensor3, dims) -> Tensor3:
    dims = tuple(int(d) for d in dims)
    if len(dims) != 3 or any(d < s for d, s in zip(dims, T.dims)):
        raise ValueError(f"cannot shrink {T.dims} to {dims}")
    out = np.zeros(dims, dtype=object)
    a, b, c = T.dims
    out[:a, :b, :c] = T.entries
    return Tensor3(out)


def specialize_A(P: Tensor3, S) -> Tensor3:
    """Tensor whose slice j is ``sum_u S[j][u] * slice_A(P, u)``."""
    S = np.asarray(S, dtype=object)
    if S.ndim != 2 or S.shape[1] != P.dims[0]:
        raise ValueError(f"S must have {P.dims[0]} columns, got shape {S.shape}")
    return Tensor3(np.tensordot(S, P.entries, axes=([1], [0])))


def slice_system_matrix(P: Tensor3) -> np.ndarray:
    """Columns are the vectorized A-slices of P."""
    a, b, c = P.dims
    return P.entries.reshape(a, b * c).T.copy()


def find_A_specialization(P: Tensor3, T: Tensor3):
    """Solve ``slice_A(T, j) = sum_u S[j][u] slice_A(P, u)`` exactly.

    Returns an object array S (ints where integral, Fractions otherwise), or
    None when some slice of T is outside the span of P's slices.  The
    solution is unique iff ``specialization_is_unique(P)``.
    """
    if P.dims[1:] != T.dims[1:]:
        raise ValueError(f"(b, c) mismatch: {P.dims} vs {T.dims}")
    K = slice_system_matrix(P)
    rows = []
    for j in range(T.dims[0]):
        x, _ = solve_rational(K, T.entries[j].reshape(-1))
        if x is None:
            return None
        rows.append([int(v) if v.denominator == 1 else v for v in x])
    return np.array(rows, dtype=object)


def specialization_is_unique(P: Tensor3) -> bool:
    K = slice_system_matrix(P)
    return rank_mod_p(K) == P.dims[0]


def clear_denominators(S) -> tuple[np.ndarray, int]:
    """Scale a rational matrix to integers; returns ``(S * d, d)``."""
    S = np.asarray(S, dtype=object)
    d = 1
    for v in S.flat:
        d = lcm(d, Fraction(v).denominator)
    return np.vectorize(lambda v: int(Fraction(v) * d), otypes=[object])(S), d


# File format: JSON text with dims and sorted nonzero entries as decimal strings.

def to_dict(T: Tensor3) -> dict:
    return {
        "format": FILE_FORMAT,
        "version": FILE_VERSION,
        "dims": list(T.dims),
        "entries": [[i, j, k, str(v)] for i, j, k, v in T.nonzeros()],
    }


def from_dict(d: dict) -> Tensor3:
    try:
        dims = [int(x) for x in d["dims"]]
        raw = d["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise TensorFormatError(f"malformed tensor object: {exc}") from exc
    if d.get("format", FILE_FORMAT) != FILE_FORMAT:
        raise TensorFormatError(f"unexpected format tag {d.get('format')!r}")
    if int(d.get("version", FILE_VERSION)) > FILE_VERSION:
        raise TensorFormatError(f"unsupported version {d.get('version')}")
    if len(dims) != 3 or min(dims) < 1:
        raise TensorFormatError(f"bad dims {dims}")
    E = np.zeros(dims, dtype=object)
    seen = set()
    for item in raw:
        if len(item) != 4:
            raise TensorFormatError(f"entry must be [i, j, k, value], got {item!r}")
        i, j, k = (int(x) for x in item[:3])
        if (i, j, k) in seen:
            raise TensorFormatError(f"duplicate entry at {(i, j, k)}")
        if not (0 <= i < dims[0] and 0 <= j < dims[1] and 0 <= k < dims[2]):
            raise TensorFormatError(f"index {(i, j, k)} out of range for dims {dims}")
        if not isinstance(item[3], str):
            raise TensorFormatError("values must be decimal strings")
        seen.add((i, j, k))
        E[i, j, k] = int(item[3])
    return Tensor3(E)


def dumps(T: Tensor3) -> str:
    return json.dumps(to_dict(T), separators=(",", ":"))


def loads(text: str) -> Tensor3:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TensorFormatError(f"not valid JSON: {exc}") from exc
    return from_dict(d)


def save(T: Tensor3, path) -> None:
    Path(path).write_text(dumps(T) + "\n")


def load(path) -> Tensor3:
    return loads(Path(path).read_text())
