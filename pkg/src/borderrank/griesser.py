"""Griesser's subspace test for border rank in C^a (x) C^m (x) C^m.

After normalizing X_0 to the identity, write Y_j = X_0^{-1} X_j and
U_j = [Y_1, Y_j] for j = 2..a-1.  Border rank at most r (m+1 <= r <= 2m-1)
forces a subspace E of dimension 2m - r with dim span{U_j E} <= r - m.

The search below can only produce witnesses.  A failed search is evidence,
never a proof that no E exists.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

from .constructions import matmul_tensor
from .exactmath import batch_rank_mod_p, det_exact, rank_mod_p, rank_numeric
from .tensor3 import Tensor3, basis_change
from .youngflat import SingularSliceError, commutator, normalize

GRIESSER_PRIME = 2147483647
DEFAULT_SAMPLES = 10_000
COORDINATE_LIMIT = 10_000
STRATEGIES = ("structured", "coordinate", "random")


class BadRError(ValueError):
    pass


class RankDeficientEError(ValueError):
    pass


class DefectiveEigenError(ArithmeticError):
    pass


class SingularUError(ArithmeticError):
    pass


class DegenerateWitnessError(ArithmeticError):
    pass


@dataclass
class GriesserInstance:
    m: int
    a: int
    Y: list
    U: list
    scale: int = 1
    tensor_id: str = ""
    normalization: str = "identity"

    def U_mod(self, p: int) -> np.ndarray:
        return np.stack([np.asarray(u % p, dtype=np.int64) for u in self.U]) \
            if self.U else np.zeros((0, self.m, self.m), dtype=np.int64)

    def U_float(self) -> list[np.ndarray]:
        return [u.astype(float) for u in self.U]


@dataclass
class Witness:
    r: int
    E: np.ndarray
    image_dim: int
    strategy: str
    seed: int | None = None
    field: str = "mod p"


@dataclass
class SearchResult:
    r: int
    m: int
    target: int
    witness: Witness | None
    strategies: dict = field(default_factory=dict)
    samples: int = 0
    seed: int = 0
    prime: int = GRIESSER_PRIME

    @property
    def found(self) -> bool:
        return self.witness is not None

    def summary(self) -> str:
        head = (f"r={self.r} m={self.m} dim E={2 * self.m - self.r} target<={self.target}: "
                + (f"witness via {self.witness.strategy} (image dim {self.witness.image_dim})"
                   if self.found else "no witness found (evidence only, not a proof)"))
        lines = [head]
        for name, st in self.strategies.items():
            lines.append(f"  {name}: tried {st['tried']}, min image dim {st['min_image_dim']}")
        return "\n".join(lines)


def make_instance(T: Tensor3, seed: int = 0) -> GriesserInstance:
    a, b, c = T.dims
    if b != c:
        raise ValueError(f"need b == c, got {T.dims}")
    if a < 2:
        raise ValueError("need at least two slices")
    try:
        norm = normalize(T, anchor=0, seed=seed)
    except SingularSliceError as exc:
        raise SingularSliceError(f"no invertible slice combination: {exc}") from exc
    Y = norm.Y
    U = [commutator(Y[1], Y[j]) for j in range(2, a)]
    how = "identity" if norm.scale == 1 and norm.combination is None else "adjugate"
    if norm.combination is not None:
        how += f" (anchor combination {norm.combination})"
    return GriesserInstance(m=b, a=a, Y=Y, U=U, scale=norm.scale,
                            tensor_id=T.digest(), normalization=how)


def instance_from_U(U, m: int | None = None) -> GriesserInstance:
    """Instance given directly by its commutator list (Y's left empty)."""
    U = [np.asarray(u, dtype=object) for u in U]
    m = U[0].shape[0] if m is None else m
    return GriesserInstance(m=m, a=len(U) + 2, Y=[], U=U, normalization="direct")


def matmul_instance(n: int) -> GriesserInstance:
    """M_n with X_0 = Id and X_1 = blockdiag(D, ..., D), D = diag(1..n)."""
    T = matmul_tensor(n, "blockdiag")
    N = n * n
    g = np.zeros((N, N), dtype=object)
    for i in range(n):
        g[0, i * n + i] = 1
        g[1, i * n + i] = i + 1
    row = 2
    for i in range(2, n):
        g[row, i * n + i] = 1
        row += 1
    for i in range(n):
        for j in range(n):
            if i != j:
                g[row, i * n + j] = 1
                row += 1
    return make_instance(basis_change(T, gA=g))


def image_matrix(inst: GriesserInstance, E: np.ndarray, p: int) -> np.ndarray:
    E = np.asarray(E, dtype=object) % p
    return np.hstack([np.dot(u, E) % p for u in inst.U]) if inst.U else np.zeros((inst.m, 0))


def image_dim(inst: GriesserInstance, E, p: int = GRIESSER_PRIME) -> int:
    """dim span{U_j E} computed over the field with p elements."""
    E = np.asarray(E, dtype=object)
    if E.size == 0:
        return 0
    if E.ndim == 1:
        E = E[:, None]
    if rank_mod_p(E, p) != E.shape[1]:
        raise RankDeficientEError("E must have full column rank")
    return rank_mod_p(image_matrix(inst, E, p), p)


def coordinate_subspace(m: int, coords) -> np.ndarray:
    E = np.zeros((m, len(coords)), dtype=object)
    for t, i in enumerate(coords):
        E[i, t] = 1
    return E


def batch_image_dims(inst: GriesserInstance, Es: np.ndarray, p: int = GRIESSER_PRIME) -> np.ndarray:
    Up = inst.U_mod(p)
    N, m, k = Es.shape
    if Up.shape[0] == 0:
        return np.zeros(N, dtype=np.int64)
    imgs = np.zeros((N, m, Up.shape[0], k), dtype=np.int64)
    for bb in range(m):
        # (a-2, m) column bb of each U times row bb of each E.
        imgs = (imgs + Up[None, :, :, bb].transpose(0, 2, 1)[:, :, :, None]
                * Es[:, None, None, bb, :]) % p
    return batch_rank_mod_p(imgs.reshape(N, m, -1), p)


def witness_search(inst: GriesserInstance, r: int, strategies=STRATEGIES,
                   samples: int = DEFAULT_SAMPLES, seed: int = 0,
                   p: int = GRIESSER_PRIME, batch: int = 2000) -> SearchResult:
    m = inst.m
    if not m + 1 <= r <= 2 * m - 1:
        raise BadRError(f"need m+1 <= r <= 2m-1, got r={r}, m={m}")
    k, target = 2 * m - r, r - m
    res = SearchResult(r=r, m=m, target=target, witness=None, samples=samples, seed=seed, prime=p)

    def record(name, tried, dims):
        st = res.strategies.setdefault(name, {"tried": 0, "min_image_dim": None})
        st["tried"] += tried
        if len(dims):
            lo = int(np.min(dims))
            st["min_image_dim"] = lo if st["min_image_dim"] is None else min(lo, st["min_image_dim"])

    for name in strategies:
        if name == "structured":
            E = coordinate_subspace(m, range(k))
            d = image_dim(inst, E, p)
            record(name, 1, [d])
            if d <= target:
                res.witness = Witness(r, E, d, name, seed)
                return res
        elif name == "coordinate":
            total = comb(m, k)
            if total <= COORDINATE_LIMIT:
                subsets = list(combinations(range(m), k))
            else:
                rng = random.Random(f"coords:{seed}")
                subsets = [tuple(sorted(rng.sample(range(m), k))) for _ in range(COORDINATE_LIMIT)]
            for start in range(0, len(subsets), batch):
                chunk = subsets[start:start + batch]
                Es = np.stack([coordinate_subspace(m, s).astype(np.int64) for s in chunk])
                dims = batch_image_dims(inst, Es, p)
                record(name, len(chunk), dims)
                hit = np.flatnonzero(dims <= target)
                if hit.size:
                    i = int(hit[0])
                    res.witness = Witness(r, coordinate_subspace(m, chunk[i]), int(dims[i]), name, seed)
                    return res
        elif name == "random":
            rng = np.random.default_rng(seed)
            done = 0
            while done < samples:
                nb = min(batch, samples - done)
                Es = rng.integers(0, p, size=(nb, m, k), dtype=np.int64)
                full = batch_rank_mod_p(Es, p) == k
                dims = batch_image_dims(inst, Es, p)
                dims = np.where(full, dims, np.iinfo(np.int64).max)
                record(name, nb, dims[full])
                hit = np.flatnonzero(dims <= target)
                if hit.size:
                    i = int(hit[0])
                    res.witness = Witness(r, Es[i].astype(object), int(dims[i]), name, seed)
                    return res
                done += nb
        else:
            raise ValueError(f"unknown strategy {name!r}")
    return res


@dataclass
class MatmulProfile:
    n: int
    r: int
    m: int
    d: int
    e: int
    formula: int
    measured: int
    threshold: int

    @property
    def satisfied(self) -> bool:
        return self.formula <= self.threshold

    @property
    def status(self) -> str:
        return "satisfied" if self.satisfied else "fails"


def profile_formula(n: int, k: int) -> tuple[int, int, int]:
    """Minimal image dim for a k-dim subspace under the M_n commutator space."""
    d, e = divmod(k, n)
    if e >= 2:
        return d, e, (d + 1) * n
    if e == 1:
        return d, e, (d + 1) * n - 1
    return d, e, d * n


def matmul_profile(n: int, r: int, inst: GriesserInstance | None = None) -> MatmulProfile:
    if n < 2:
        raise ValueError("n must be at least 2")
    m = n * n
    if not m + 1 <= r <= 2 * m - 1:
        raise BadRError(f"need m+1 <= r <= 2m-1, got r={r}, m={m}")
    inst = matmul_instance(n) if inst is None else inst
    k = 2 * m - r
    d, e, formula = profile_formula(n, k)
    measured = image_dim(inst, coordinate_subspace(m, range(k)))
    return MatmulProfile(n, r, m, d, e, formula, measured, r - m)


def trivial_witness_r2m1(inst: GriesserInstance, rel_tol: float = 1e-8) -> Witness:
    """Line witness for r = 2m - 1 from an eigenvector of Y_1.

    For Y_1 v = t v, each U_j v = (Y_1 - t) Y_j v lies in the image of
    Y_1 - t, a hyperplane when the eigenvalues are distinct.
    """
    if not inst.Y:
        raise ValueError("instance has no Y slices")
    Y1 = inst.Y[1].astype(float)
    vals, vecs = np.linalg.eig(Y1)
    scale = max(1.0, float(np.max(np.abs(vals))))
    gaps = np.abs(vals[:, None] - vals[None, :]) + np.eye(len(vals)) * scale
    if np.min(gaps) <= rel_tol * scale:
        raise DefectiveEigenError("Y_1 has (numerically) repeated eigenvalues")
    v = vecs[:, 0]
    imgs = np.column_stack([u @ v for u in inst.U_float()]) if inst.U else np.zeros((inst.m, 0))
    dim = rank_numeric(imgs, rel_tol) if imgs.size else 0
    return Witness(2 * inst.m - 1, v[:, None], dim, "eigenvector", field="complex")


@dataclass
class PencilWitness:
    t: complex
    v: np.ndarray
    w: np.ndarray
    E: np.ndarray
    image_dim: int
    quartic: np.ndarray


def pencil_quartic(inst: GriesserInstance) -> np.ndarray:
    """Coefficients (highest first) of det(t U_2^{-1}U_3 - U_3^{-1}U_2)."""
    U2, U3 = inst.U_float()[:2]
    A = np.linalg.solve(U2, U3)
    B = np.linalg.solve(U3, U2)
    return np.linalg.det(A) * np.poly(np.linalg.solve(A, B))


def _kernel_line(M: np.ndarray) -> np.ndarray:
    _, _, vh = np.linalg.svd(M)
    return vh[-1].conj()


def _distinct_roots(roots, rel_tol):
    out = []
    for t in roots:
        if all(abs(t - s) > rel_tol * max(1.0, abs(s)) * 1e3 for s in out):
            out.append(t)
    return out


def m4_pencil_witness(inst: GriesserInstance, rel_tol: float = 1e-8) -> PencilWitness:
    """Witness for r = 2m - 2 when a = 4, built from roots of the pencil quartic.

    With A = U_2^{-1}U_3 the pencil is t A - A^{-1}, so a single root's
    kernel line is generically an eigenvector of A and w = A v is parallel
    to v.  When that happens the kernel lines of two distinct roots are
    combined: their span E is A-invariant, hence U_3 E = U_2 A E = U_2 E.
    """
    if len(inst.U) != 2:
        raise ValueError(f"need exactly two commutators (a = 4), got {len(inst.U)}")
    if any(det_exact(u) == 0 for u in inst.U):
        raise SingularUError("U_2 or U_3 is singular")
    U2, U3 = inst.U_float()
    A = np.linalg.solve(U2, U3)
    B = np.linalg.solve(U3, U2)
    coeffs = pencil_quartic(inst)
    roots = sorted(np.roots(coeffs), key=lambda z: (round(z.real, 9), round(z.imag, 9)))
    lines = []
    for t in _distinct_roots(roots, rel_tol):
        v = _kernel_line(t * A - B)
        w = A @ v
        w = w / np.linalg.norm(w)
        if rank_numeric(np.column_stack([v, w]), rel_tol) == 2:
            return _pencil_result(U2, U3, complex(t), v, w, coeffs, rel_tol)
        lines.append((t, v))
    for (t1, v1), (_, v2) in combinations(lines, 2):
        if rank_numeric(np.column_stack([v1, v2]), rel_tol) < 2:
            continue
        v = (v1 + v2) / np.linalg.norm(v1 + v2)
        w = A @ v
        w = w / np.linalg.norm(w)
        if rank_numeric(np.column_stack([v, w]), rel_tol) == 2:
            return _pencil_result(U2, U3, complex(t1), v, w, coeffs, rel_tol)
    raise DegenerateWitnessError("every pencil kernel gives w parallel to v")


def _pencil_result(U2, U3, t, v, w, coeffs, rel_tol) -> PencilWitness:
    imgs = np.column_stack([U2 @ v, U3 @ v, U2 @ w, U3 @ w])
    return PencilWitness(t, v, w, np.column_stack([v, w]), rank_numeric(imgs, rel_tol), coeffs)
