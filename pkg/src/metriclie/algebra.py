"""Lie algebras, inner products, frames and structural subspaces.

Basis brackets are stored densely as ``c[i, j, k]`` with
``[e_i, e_j] = sum_k c[i, j, k] e_k``. Linear operators are matrices
acting on coordinate columns: entry ``(k, j)`` is the coefficient of
``e_k`` in the image of ``e_j``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from . import _linalg as la
from .tolerance import DEFAULT_TOL, Tolerance, as_tol


class AlgebraError(ValueError):
    pass


class MetricError(AlgebraError):
    pass


class NotSymmetric(MetricError):
    pass


class NotPositiveDefinite(MetricError):
    pass


class SingularFrame(AlgebraError):
    pass


class SpecError(AlgebraError):
    """Malformed algebra description document."""


@dataclass(frozen=True)
class AntisymmetryViolation:
    i: int
    j: int
    k: int
    residual: float

    def __str__(self):
        return f"antisymmetry fails at (i,j,k)=({self.i},{self.j},{self.k}), |c_ijk + c_jik| = {self.residual:.3e}"


@dataclass(frozen=True)
class JacobiViolation:
    i: int
    j: int
    k: int
    residual: float

    def __str__(self):
        return f"Jacobi identity fails on (e{self.i}, e{self.j}, e{self.k}), residual {self.residual:.3e}"


class InvalidLieAlgebra(AlgebraError):
    def __init__(self, violations):
        self.violations = list(violations)
        head = "; ".join(str(v) for v in self.violations[:3])
        more = f" (+{len(self.violations) - 3} more)" if len(self.violations) > 3 else ""
        super().__init__(f"{len(self.violations)} violated identities: {head}{more}")


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """Structure constants of a real Lie algebra in a fixed basis.

    Construction only checks the shape; use :func:`validate_lie_algebra`
    to certify antisymmetry and the Jacobi identity.
    """

    structure: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.structure, dtype=float)
        if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]) or c.shape[0] < 1:
            raise AlgebraError(f"structure constants must be n x n x n with n >= 1, got shape {c.shape}")
        object.__setattr__(self, "structure", _frozen(c))

    @property
    def dim(self) -> int:
        return self.structure.shape[0]

    @classmethod
    def from_brackets(cls, n: int, brackets: Iterable[Sequence[float]]) -> "LieAlgebra":
        """Build from sparse ``(i, j, k, value)`` entries meaning
        ``[e_i, e_j] += value * e_k``; the ``(j, i)`` entry is filled by
        antisymmetry. Entries with ``i > j`` are accepted and flipped."""
        c = np.zeros((n, n, n))
        for i, j, k, v in brackets:
            i, j, k = int(i), int(j), int(k)
            if i == j:
                raise AlgebraError(f"bracket entry with i == j == {i}")
            if not all(0 <= x < n for x in (i, j, k)):
                raise AlgebraError(f"bracket index out of range for dim {n}: {(i, j, k)}")
            c[i, j, k] += v
            c[j, i, k] -= v
        return cls(c)

    def brackets(self) -> list[tuple[int, int, int, float]]:
        """Sparse nonzero entries with i < j."""
        c = self.structure
        return [
            (i, j, k, float(c[i, j, k]))
            for i in range(self.dim)
            for j in range(i + 1, self.dim)
            for k in range(self.dim)
            if c[i, j, k] != 0.0
        ]

    def bracket(self, x, y) -> np.ndarray:
        return np.einsum("i,j,ijk->k", x, y, self.structure)

    def ad_matrices(self) -> np.ndarray:
        """``ad[i][k, j] = c[i, j, k]``, the matrix of ``ad(e_i)``."""
        return self.structure.transpose(0, 2, 1).copy()

    def ad(self, x) -> np.ndarray:
        return np.einsum("i,ijk->kj", x, self.structure)

    def is_abelian(self, tol: Tolerance | None = None) -> bool:
        return la.max_abs(self.structure) <= as_tol(tol).abs


def lie_algebra_violations(algebra, tol: Tolerance | None = None) -> list:
    """All antisymmetry and Jacobi failures, worst first within each kind."""
    tol = as_tol(tol)
    c = algebra.structure if isinstance(algebra, LieAlgebra) else np.asarray(algebra, dtype=float)
    n = c.shape[0]
    scale = la.max_abs(c)
    out = []
    asym = np.abs(c + c.transpose(1, 0, 2))
    eps = tol.threshold(scale)
    for i, j, k in zip(*np.nonzero(asym > eps)):
        if i <= j:
            out.append(AntisymmetryViolation(int(i), int(j), int(k), float(asym[i, j, k])))
    # cyc[i,j,k,m]: coefficient of e_m in the cyclic Jacobi sum
    t = np.einsum("ijl,lkm->ijkm", c, c)
    cyc = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
    res = np.abs(cyc).max(axis=3) if n else np.zeros((0, 0, 0))
    eps = tol.threshold(scale * scale)
    jac = [
        JacobiViolation(i, j, k, float(res[i, j, k]))
        for i, j, k in combinations(range(n), 3)
        if res[i, j, k] > eps
    ]
    jac.sort(key=lambda v: -v.residual)
    return out + jac


def jacobi_residual(algebra) -> float:
    c = algebra.structure if isinstance(algebra, LieAlgebra) else np.asarray(algebra, dtype=float)
    t = np.einsum("ijl,lkm->ijkm", c, c)
    return la.max_abs(t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3))


def validate_lie_algebra(structure, tol: Tolerance | None = None) -> LieAlgebra:
    """Return a :class:`LieAlgebra` or raise :class:`InvalidLieAlgebra`
    listing every violated identity with its residual."""
    alg = structure if isinstance(structure, LieAlgebra) else LieAlgebra(structure)
    bad = lie_algebra_violations(alg, tol)
    if bad:
        raise InvalidLieAlgebra(bad)
    return alg


def _cholesky_checked(G: np.ndarray, tol: Tolerance) -> np.ndarray:
    scale = la.max_abs(G)
    try:
        L = np.linalg.cholesky(G)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite("metric is not positive definite (Cholesky breaks down)") from None
    piv = np.diag(L) ** 2
    if piv.min() <= tol.threshold(scale):
        k = int(np.argmin(piv))
        raise NotPositiveDefinite(f"metric is not positive definite: pivot {k} = {piv[k]:.3e}")
    return L


@dataclass(frozen=True, eq=False)
class MetricLieAlgebra:
    algebra: LieAlgebra
    gram: np.ndarray
    tol: Tolerance = field(default=DEFAULT_TOL)

    def __post_init__(self):
        G = np.array(self.gram, dtype=float)
        n = self.algebra.dim
        if G.shape != (n, n):
            raise MetricError(f"metric must be {n} x {n}, got shape {G.shape}")
        asym = la.max_abs(G - G.T)
        if asym > self.tol.threshold(la.max_abs(G)):
            raise NotSymmetric(f"metric is not symmetric: max |G - G^T| = {asym:.3e}")
        G = 0.5 * (G + G.T)
        _cholesky_checked(G, self.tol)
        object.__setattr__(self, "gram", _frozen(G))

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @classmethod
    def from_brackets(cls, n, brackets, gram=None, tol=None) -> "MetricLieAlgebra":
        G = np.eye(n) if gram is None else np.asarray(gram, dtype=float)
        if G.ndim == 1:
            G = np.diag(G)
        return cls(LieAlgebra.from_brackets(n, brackets), G, as_tol(tol))

    def inner(self, x, y) -> float:
        return float(np.asarray(x) @ self.gram @ np.asarray(y))

    def scaled(self, t: float) -> "MetricLieAlgebra":
        return MetricLieAlgebra(self.algebra, t * self.gram, self.tol)


@dataclass(frozen=True, eq=False)
class Frame:
    """Basis change: column j holds the old coordinates of new vector f_j."""

    matrix: np.ndarray
    tol: Tolerance = field(default=DEFAULT_TOL)

    def __post_init__(self):
        P = np.array(self.matrix, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise SingularFrame(f"frame must be square, got shape {P.shape}")
        if la.rank(P, self.tol) < P.shape[0]:
            raise SingularFrame("frame matrix is singular")
        object.__setattr__(self, "matrix", _frozen(P))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, n: int) -> "Frame":
        return cls(np.eye(n))

    def inverse(self) -> "Frame":
        return Frame(np.linalg.inv(self.matrix), self.tol)

    def compose(self, other: "Frame") -> "Frame":
        """Apply ``self`` first, then ``other`` (expressed in the new basis)."""
        return Frame(self.matrix @ other.matrix, self.tol)

    def operator_to_frame(self, M) -> np.ndarray:
        """Matrix of an endomorphism in the new basis."""
        return np.linalg.solve(self.matrix, np.asarray(M, dtype=float) @ self.matrix)

    def operator_from_frame(self, M) -> np.ndarray:
        return self.matrix @ np.asarray(M, dtype=float) @ np.linalg.inv(self.matrix)

    def vector_to_frame(self, v) -> np.ndarray:
        return np.linalg.solve(self.matrix, np.asarray(v, dtype=float))

    def vector_from_frame(self, v) -> np.ndarray:
        return self.matrix @ np.asarray(v, dtype=float)


def orthonormal_frame(mla: MetricLieAlgebra, tol: Tolerance | None = None) -> Frame:
    """Gram-Schmidt of the input basis, in order, with respect to the metric.

    With ``G = L L^T`` the frame is ``P = L^{-T}`` (upper triangular).
    """
    tol = as_tol(tol) if tol is not None else mla.tol
    G = mla.gram
    L = _cholesky_checked(G, tol)
    P = np.linalg.inv(L).T
    P = np.triu(P)
    err = la.max_abs(P.T @ G @ P - np.eye(mla.dim))
    assert err <= max(1e-8, tol.threshold(1.0)), f"orthonormalisation residual {err:.3e}"
    return Frame(P, tol)


def change_basis(algebra: LieAlgebra, frame: Frame) -> LieAlgebra:
    if not isinstance(frame, Frame):
        frame = Frame(frame)
    if frame.dim != algebra.dim:
        raise SingularFrame(f"frame has dim {frame.dim}, algebra has dim {algebra.dim}")
    P = frame.matrix
    Pinv = np.linalg.inv(P)
    c = np.einsum("ai,bj,abk,lk->ijl", P, P, algebra.structure, Pinv, optimize=True)
    return LieAlgebra(c)


def change_metric(mla: MetricLieAlgebra, frame: Frame) -> MetricLieAlgebra:
    P = frame.matrix
    return MetricLieAlgebra(change_basis(mla.algebra, frame), P.T @ mla.gram @ P, mla.tol)


@dataclass(frozen=True, eq=False)
class Subspace:
    """A linear subspace given by an orthonormal (Euclidean) column basis."""

    basis: np.ndarray

    def __post_init__(self):
        B = np.array(self.basis, dtype=float)
        if B.ndim != 2:
            raise AlgebraError("subspace basis must be a 2-d array of columns")
        object.__setattr__(self, "basis", _frozen(B))

    @classmethod
    def span(cls, vectors, n: int | None = None, tol: Tolerance | None = None) -> "Subspace":
        """Span of the columns of ``vectors`` (canonical orthonormal basis)."""
        V = np.asarray(vectors, dtype=float)
        if V.size == 0:
            if n is None:
                n = V.shape[0] if V.ndim == 2 else 0
            return cls(np.zeros((n, 0)))
        return cls(la.canonical_basis(V, tol))

    @classmethod
    def whole(cls, n: int) -> "Subspace":
        return cls(np.eye(n))

    @property
    def ambient(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def residual(self, v) -> float:
        return la.projection_residual(self.basis, v)

    def contains(self, v, tol: Tolerance | None = None) -> bool:
        return self.residual(v) <= max(as_tol(tol).rel, 1e-9)

    def equals(self, other: "Subspace", tol: Tolerance | None = None) -> bool:
        return self.dim == other.dim and self.contains(other.basis, tol) and other.contains(self.basis, tol)

    def vectors(self) -> list[np.ndarray]:
        return [self.basis[:, i].copy() for i in range(self.dim)]


def derived_subalgebra(algebra: LieAlgebra, tol: Tolerance | None = None) -> Subspace:
    n = algebra.dim
    cols = [algebra.structure[i, j] for i, j in combinations(range(n), 2)]
    return Subspace.span(np.array(cols).T if cols else np.zeros((n, 0)), n, tol)


def center(algebra: LieAlgebra, tol: Tolerance | None = None) -> Subspace:
    n = algebra.dim
    stacked = algebra.ad_matrices().reshape(n * n, n)
    return Subspace.span(la.nullspace(stacked, tol), n, tol)


def bracket_subspaces(algebra: LieAlgebra, U: Subspace, W: Subspace, tol: Tolerance | None = None) -> Subspace:
    n = algebra.dim
    cols = [algebra.bracket(u, w) for u in U.vectors() for w in W.vectors()]
    return Subspace.span(np.array(cols).T if cols else np.zeros((n, 0)), n, tol)


def second_derived(algebra: LieAlgebra, tol: Tolerance | None = None) -> Subspace:
    d = derived_subalgebra(algebra, tol)
    return bracket_subspaces(algebra, d, d, tol)


def lower_central_2(algebra: LieAlgebra, tol: Tolerance | None = None) -> Subspace:
    return bracket_subspaces(algebra, Subspace.whole(algebra.dim), derived_subalgebra(algebra, tol), tol)


def preserves(M, S: Subspace, tol: Tolerance | None = None) -> bool:
    if S.dim == 0:
        return True
    img = np.asarray(M) @ S.basis
    if la.max_abs(img) == 0.0:
        return True
    return la.max_abs(la.project_out(S.basis, img)) <= max(as_tol(tol).rel, 1e-9) * max(1.0, la.max_abs(M))


def restrict(M, S: Subspace) -> np.ndarray:
    """Matrix of ``M`` on an invariant subspace, in the subspace basis."""
    return S.basis.T @ np.asarray(M) @ S.basis


# ---------------------------------------------------------------- spec files


def _tolerance_from(doc) -> Tolerance:
    t = doc.get("tolerance")
    if t is None:
        return DEFAULT_TOL
    if not isinstance(t, dict):
        raise SpecError("'tolerance' must be an object with 'rel' and/or 'abs'")
    try:
        return Tolerance(float(t.get("rel", DEFAULT_TOL.rel)), float(t.get("abs", DEFAULT_TOL.abs)))
    except (TypeError, ValueError) as e:
        raise SpecError(f"invalid tolerance: {e}") from None


def _metric_from(spec, n: int) -> np.ndarray:
    if spec is None or spec == "identity":
        return np.eye(n)
    if isinstance(spec, str):
        raise SpecError(f"unknown metric keyword {spec!r} (expected 'identity')")
    try:
        G = np.array(spec, dtype=float)
    except (TypeError, ValueError):
        raise SpecError("metric must be 'identity', a list of diagonal entries, or an n x n array") from None
    if G.shape == (n,):
        return np.diag(G)
    if G.shape == (n, n):
        return G
    raise SpecError(f"metric has shape {G.shape}, expected ({n},) or ({n}, {n})")


def parse_spec(doc: dict) -> tuple[MetricLieAlgebra, dict]:
    """Build a metric Lie algebra from a JSON description document.

    Returns the algebra and a dict of named skew tensors (optional
    ``tensors`` field: ``[{"name": ..., "matrix": n x n}]``, given in the
    input basis).
    """
    if not isinstance(doc, dict):
        raise SpecError("algebra description must be a JSON object")
    try:
        n = doc["dim"]
    except KeyError:
        raise SpecError("missing field 'dim'") from None
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise SpecError(f"'dim' must be a positive integer, got {n!r}")
    tol = _tolerance_from(doc)
    entries = []
    for pos, b in enumerate(doc.get("brackets", [])):
        try:
            i, j, k, v = int(b["i"]), int(b["j"]), int(b["k"]), float(b["value"])
        except (KeyError, TypeError, ValueError):
            raise SpecError(f"bracket #{pos} must be an object with integer i, j, k and numeric value") from None
        if not i < j:
            raise SpecError(f"bracket #{pos}: indices must satisfy i < j, got i={i}, j={j}")
        if not all(0 <= x < n for x in (i, j, k)):
            raise SpecError(f"bracket #{pos}: index out of range for dim {n}")
        entries.append((i, j, k, v))
    G = _metric_from(doc.get("metric", "identity"), n)
    mla = MetricLieAlgebra(LieAlgebra.from_brackets(n, entries), G, tol)
    tensors = {}
    for pos, t in enumerate(doc.get("tensors", [])):
        try:
            name = str(t.get("name", f"T{pos}"))
            M = np.array(t["matrix"], dtype=float)
        except (KeyError, TypeError, ValueError, AttributeError):
            raise SpecError(f"tensor #{pos} must be an object with an n x n 'matrix'") from None
        if M.shape != (n, n):
            raise SpecError(f"tensor {name!r} has shape {M.shape}, expected ({n}, {n})")
        tensors[name] = M
    return mla, tensors


def load_spec(path) -> tuple[MetricLieAlgebra, dict]:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as e:
        raise SpecError(f"{path}: invalid JSON ({e})") from None
    return parse_spec(doc)


def to_spec(mla: MetricLieAlgebra, tensors: dict | None = None) -> dict:
    doc = {
        "dim": mla.dim,
        "brackets": [{"i": i, "j": j, "k": k, "value": v} for i, j, k, v in mla.algebra.brackets()],
        "metric": mla.gram.tolist(),
        "tolerance": {"rel": mla.tol.rel, "abs": mla.tol.abs},
    }
    if tensors:
        doc["tensors"] = [{"name": k, "matrix": np.asarray(v).tolist()} for k, v in tensors.items()]
    return doc
