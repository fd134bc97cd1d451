"""Infinitesimal holonomy algebra, invariant subspaces and de Rham factors."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _linalg as la
from .algebra import AlgebraError, MetricLieAlgebra, Subspace
from .connection import Connection, levi_civita
from .curvature import CurvatureData, curvature, sectional
from .tolerance import DEFAULT_TOL, Tolerance


class NotSkew(AlgebraError):
    pass


class NotStabilized(UserWarning):
    pass


# ---------------------------------------------------------------- 2-forms


@dataclass(frozen=True, eq=False)
class TwoForm:
    """Coefficients over e^{ab} = e^a ^ e^b, a < b, in lexicographic order."""

    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).ravel()
        if c.shape != (la.skew_dim(self.n),):
            raise ValueError(f"a 2-form on R^{self.n} has {la.skew_dim(self.n)} coefficients, got {c.size}")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_terms(cls, n: int, terms: dict) -> "TwoForm":
        """``terms`` maps (a, b) to the coefficient of e^{ab}."""
        M = np.zeros((n, n))
        for (a, b), v in terms.items():
            M += la.rot(n, a, b, v)
        return cls(n, la.skew_to_vec(M))

    def terms(self) -> dict:
        return {p: float(v) for p, v in zip(la.skew_pairs(self.n), self.coeffs) if v != 0.0}

    def __call__(self, x, y) -> float:
        return float(np.asarray(y) @ two_form_to_matrix(self) @ np.asarray(x))

    def __str__(self):
        parts = [f"{v:+.6g} e^{{{a}{b}}}" for (a, b), v in self.terms().items() if abs(v) > 1e-15]
        return " ".join(parts) if parts else "0"


def matrix_to_two_form(M, tol: Tolerance | None = None) -> TwoForm:
    """``omega(x, y) = <M x, y>``; the coefficient of e^{ab} is ``M[b, a]``."""
    tol = tol or DEFAULT_TOL
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NotSkew(f"expected a square matrix, got shape {M.shape}")
    r = la.max_abs(M + M.T)
    if r > tol.threshold(la.max_abs(M)):
        raise NotSkew(f"matrix is not skew-symmetric (max |M + M^T| = {r:.3e})")
    return TwoForm(M.shape[0], la.skew_to_vec(M))


def two_form_to_matrix(w: TwoForm) -> np.ndarray:
    return la.vec_to_skew(w.coeffs, w.n)


# ------------------------------------------------------ covariant derivative


def covariant_derivative_tensor(conn: Connection, T, k: int | None = None) -> np.ndarray:
    """Covariant derivative of an operator-valued tensor.

    ``T`` has shape ``(n,)*p + (n, n)``: ``T[a_1, ..., a_p]`` is the
    operator value on basis arguments. Returns

        (nabla_k T)(args) = [gamma_k, T(args)] - sum_m T(..., gamma_k arg_m, ...)

    For ``k=None`` all directions are returned, the direction being
    appended as a new last argument slot.
    """
    T = np.asarray(T, dtype=float)
    if k is None:
        return np.stack([covariant_derivative_tensor(conn, T, kk) for kk in range(conn.dim)], axis=-3)
    g = conn.gamma[k]
    p = T.ndim - 2
    out = np.einsum("ab,...bc->...ac", g, T) - np.einsum("...ab,bc->...ac", T, g)
    for m in range(p):
        # T(..., gamma_k e_a, ...) = sum_b gamma_k[b, a] T(..., e_b, ...)
        moved = np.moveaxis(T, m, -3)
        corr = np.einsum("ba,...bij->...aij", g, moved)
        out -= np.moveaxis(corr, -3, m)
    return out


def covariant_derivative_form(conn: Connection, M, k: int) -> np.ndarray:
    """Derivative of a fixed skew operator (a 2-form) along e_k: ``[gamma_k, M]``."""
    return la.commutator(conn.gamma[k], np.asarray(M, dtype=float))


def curvature_derivative_values(conn: Connection, curv: CurvatureData, level: int) -> list[np.ndarray]:
    """Operator values of R, nabla R, ..., nabla^level R as stacks of matrices."""
    n = conn.dim
    T = curv.operators
    out = [T.reshape(-1, n, n)]
    for _ in range(level):
        T = covariant_derivative_tensor(conn, T)
        out.append(T.reshape(-1, n, n))
    return out


# ------------------------------------------------------------------ holonomy


def _span_coords(mats, n, tol) -> np.ndarray:
    if len(mats) == 0:
        return np.zeros((la.skew_dim(n), 0))
    V = np.array([la.skew_to_vec(M) for M in mats]).T
    return la.orth(V, tol)


@dataclass(frozen=True, eq=False)
class HolonomyAlgebra:
    """Basis of skew matrices in the orthonormal frame, orthonormal for
    ``<A, B> = tr(A^T B) / 2``."""

    basis: np.ndarray
    n: int
    level_reached: int
    stabilized: bool
    tol: Tolerance = field(default=DEFAULT_TOL)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def coordinates(self) -> np.ndarray:
        return np.array([la.skew_to_vec(B) for B in self.basis]).reshape(-1, la.skew_dim(self.n)).T

    def residual(self, M) -> float:
        return la.projection_residual(self.coordinates(), la.skew_to_vec(M))

    def contains(self, M) -> bool:
        return self.residual(M) <= max(self.tol.rel, 1e-9)

    def closure_residual(self) -> float:
        Q = self.coordinates()
        worst = 0.0
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                c = la.skew_to_vec(la.commutator(self.basis[i], self.basis[j]))
                worst = max(worst, la.max_abs(la.project_out(Q, c)))
        return worst


def holonomy_algebra(
    conn: Connection,
    curv: CurvatureData | None = None,
    max_level: int | None = None,
    tol: Tolerance | None = None,
) -> HolonomyAlgebra:
    """Span of the curvature operators and their iterated covariant
    derivatives, closed under commutators.

    Each level adds ``[gamma_k, A]`` for the current span; since the
    argument corrections of the tensor derivative are combinations of
    values already in the span, this yields the same subspaces as
    differentiating the curvature tensor itself (tested against
    :func:`curvature_derivative_values`).
    """
    tol = conn.tol if tol is None else tol
    n = conn.dim
    if curv is None:
        curv = curvature(conn)
    if max_level is None:
        max_level = n * (n + 1) // 2
    Q = _span_coords(curv.nonzero_operators(), n, tol)
    level = 0
    stabilized = False
    while level < max_level:
        mats = [la.vec_to_skew(Q[:, i], n) for i in range(Q.shape[1])]
        new = [la.commutator(g, M) for g in conn.gamma for M in mats]
        Q2 = _span_coords(mats + new, n, tol)
        level += 1
        if Q2.shape[1] == Q.shape[1]:
            stabilized = True
            break
        Q = Q2
    if not stabilized:
        warnings.warn(f"holonomy span still growing after {max_level} derivative levels", NotStabilized, stacklevel=2)
    while True:
        mats = [la.vec_to_skew(Q[:, i], n) for i in range(Q.shape[1])]
        brs = [la.commutator(mats[i], mats[j]) for i in range(len(mats)) for j in range(i + 1, len(mats))]
        Q2 = _span_coords(mats + brs, n, tol)
        if Q2.shape[1] == Q.shape[1]:
            break
        Q = Q2
    C = la.canonical_basis(Q, tol) if Q.shape[1] else Q
    basis = np.array([la.vec_to_skew(C[:, i], n) for i in range(C.shape[1])]).reshape(-1, n, n) + 0.0
    return HolonomyAlgebra(basis, n, level, stabilized, tol)


# ---------------------------------------------------------- decomposition


@dataclass(frozen=True, eq=False)
class Factor:
    subspace: Subspace
    kind: str  # "flat", "surface" or "irreducible"
    curvature: float | None = None

    @property
    def dim(self) -> int:
        return self.subspace.dim

    def label(self) -> str:
        if self.kind == "flat":
            return f"Flat({self.dim})"
        if self.kind == "surface":
            return f"Surface({self.curvature:.6g})"
        return f"Irreducible({self.dim})"


@dataclass(frozen=True, eq=False)
class DeRhamDecomposition:
    factors: list
    holonomy: HolonomyAlgebra | None = None
    note: str = ""

    def label(self) -> str:
        return " x ".join(f.label() for f in self.factors)

    def kinds(self) -> list[str]:
        return [f.kind for f in self.factors]


def invariance_residual(S: Subspace, ops) -> float:
    worst = 0.0
    for B in ops:
        worst = max(worst, la.max_abs(la.project_out(S.basis, np.asarray(B) @ S.basis)))
    return worst


def _sym_commutant(ops, m, tol) -> np.ndarray:
    basis = la.sym_basis(m)
    if not len(ops):
        return basis
    L = np.stack([np.concatenate([la.commutator(S, B).ravel() for B in ops]) for S in basis], axis=1)
    N = la.nullspace(L, tol)
    return np.einsum("ki,kab->iab", N, basis)


def _split(W: np.ndarray, ops, rng, tol) -> list[np.ndarray]:
    m = W.shape[1]
    if m <= 1:
        return [W]
    restricted = [W.T @ B @ W for B in ops]
    sym = _sym_commutant(restricted, m, tol)
    if sym.shape[0] <= 1:
        return [W]
    scale = max(1.0, max(la.max_abs(B) for B in restricted))
    for _ in range(8):
        S = np.einsum("i,iab->ab", rng.standard_normal(sym.shape[0]), sym)
        vals, vecs = np.linalg.eigh(0.5 * (S + S.T))
        rho = float(np.abs(vals).max())
        gap = max(tol.abs, np.sqrt(tol.rel) * rho)
        groups = [g for g in _clusters_sorted(vals, gap)]
        if len(groups) < 2:
            continue
        pieces = [W @ vecs[:, g] for g in groups]
        if all(invariance_residual(Subspace(p), ops) <= 1e-8 * scale for p in pieces):
            return [q for p in pieces for q in _split(p, ops, rng, tol)]
    warnings.warn("symmetric commutant is not scalar but no splitting element was found", RuntimeWarning, stacklevel=2)
    return [W]


def _clusters_sorted(vals, gap):
    groups = [[0]]
    for i in range(1, len(vals)):
        if vals[i] - vals[i - 1] > gap:
            groups.append([])
        groups[-1].append(i)
    return groups


def _order_key(S: Subspace):
    P = S.projector()
    lead = int(np.argmax(np.diag(P) > 1e-9))
    return (lead, tuple(np.round(-np.abs(S.basis[:, 0]), 9)))


def invariant_decomposition(hol: HolonomyAlgebra, seed: int = 0, tol: Tolerance | None = None) -> list[Factor]:
    """Orthogonal splitting of R^n into holonomy-invariant pieces.

    The common kernel gives 1-dimensional flat factors. Its complement is
    split along eigenspaces of symmetric matrices commuting with the
    holonomy; a block is irreducible exactly when that commutant consists
    of multiples of the identity, because the orthogonal projector onto
    an invariant subspace of skew operators commutes with them.
    """
    tol = tol or hol.tol
    n = hol.n
    ops = list(hol.basis)
    if ops:
        K = la.nullspace(np.concatenate(ops, axis=0), tol)
    else:
        K = np.eye(n)
    K = la.canonical_basis(K, tol) if K.shape[1] else K
    factors = [Factor(Subspace(K[:, [i]]), "flat") for i in range(K.shape[1])]
    W = la.nullspace(K.T, tol) if K.shape[1] else np.eye(n)
    if W.shape[1]:
        rng = np.random.default_rng(seed)
        for piece in _split(W, ops, rng, tol):
            factors.append(Factor(Subspace.span(piece, n, tol), "irreducible"))
    factors.sort(key=lambda f: _order_key(f.subspace))
    return factors


SURFACE_NOTE = (
    "Surface curvatures are evaluated at the identity; a left-invariant "
    "metric is homogeneous, so the value holds at every point."
)


def derham_report(
    mla: MetricLieAlgebra,
    seed: int = 0,
    max_level: int | None = None,
    tol: Tolerance | None = None,
) -> DeRhamDecomposition:
    tol = tol or mla.tol
    conn = levi_civita(mla, tol)
    curv = curvature(conn)
    hol = holonomy_algebra(conn, curv, max_level, tol)
    pieces = invariant_decomposition(hol, seed, tol)
    factors = []
    flat = [f for f in pieces if f.kind == "flat"]
    merged = False
    for f in pieces:
        if f.kind == "flat":
            if not merged:
                basis = np.concatenate([g.subspace.basis for g in flat], axis=1)
                factors.append(Factor(Subspace.span(basis, mla.dim, tol), "flat"))
                merged = True
        elif f.dim == 2:
            x, y = f.subspace.basis.T
            factors.append(Factor(f.subspace, "surface", sectional(curv, x, y)))
        else:
            factors.append(f)
    note = SURFACE_NOTE if any(f.kind == "surface" for f in factors) else ""
    return DeRhamDecomposition(factors, hol, note)
