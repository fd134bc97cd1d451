"""Levi-Civita connection of a left-invariant metric, and the rotation-block
description of connections that commute with a two-plane rotation."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _linalg as la
from .algebra import (
    AlgebraError,
    Frame,
    LieAlgebra,
    MetricLieAlgebra,
    change_basis,
    orthonormal_frame,
)
from .tolerance import DEFAULT_TOL, Tolerance, as_tol


class NotBlockForm(AlgebraError):
    pass


class JacobiRelationsViolated(AlgebraError):
    def __init__(self, violated: list[tuple[str, float]]):
        self.violated = list(violated)
        labels = ", ".join(f"{k}={v:.3g}" for k, v in self.violated)
        super().__init__(f"Jacobi relations violated: {labels}")

    @property
    def labels(self) -> list[str]:
        return [k for k, _ in self.violated]


@dataclass(frozen=True, eq=False)
class Connection:
    """``gamma[i]`` is the matrix of the covariant derivative along the
    i-th vector of ``frame``; ``algebra`` holds the brackets in that frame."""

    frame: Frame
    gamma: np.ndarray
    algebra: LieAlgebra
    tol: Tolerance = field(default=DEFAULT_TOL)

    @property
    def dim(self) -> int:
        return self.gamma.shape[0]

    def operator(self, x) -> np.ndarray:
        return np.einsum("i,ijk->jk", np.asarray(x, dtype=float), self.gamma)

    def skew_residual(self) -> float:
        return la.max_abs(self.gamma + self.gamma.transpose(0, 2, 1))

    def torsion_residual(self) -> float:
        # torsion[i, j] = gamma_i e_j - gamma_j e_i - [e_i, e_j]
        g = self.gamma
        T = g.transpose(0, 2, 1) - g.transpose(0, 2, 1).transpose(1, 0, 2) - self.algebra.structure
        return la.max_abs(T)

    def reframe(self, Q) -> "Connection":
        """Re-express in the orthonormal frame with columns ``Q`` (orthogonal,
        in coordinates of the current frame)."""
        Q = np.asarray(Q, dtype=float)
        if la.max_abs(Q.T @ Q - np.eye(self.dim)) > 1e-9:
            raise AlgebraError("reframing requires an orthogonal matrix")
        g = np.einsum("ai,ajk->ijk", Q, self.gamma)
        g = np.einsum("jb,ibc,cd->ijd", Q.T, g, Q)
        return Connection(
            Frame(self.frame.matrix @ Q, self.tol),
            g,
            change_basis(self.algebra, Frame(Q, self.tol)),
            self.tol,
        )

    def in_input_frame(self) -> np.ndarray:
        """Matrices of the covariant derivatives along the input basis,
        acting on input coordinates."""
        P = self.frame.matrix
        Pinv = np.linalg.inv(P)
        g = np.einsum("ai,ajk->ijk", Pinv, self.gamma)
        return np.einsum("jb,ibc,cd->ijd", P, g, Pinv)


def koszul_gamma(c: np.ndarray) -> np.ndarray:
    """Connection matrices from structure constants in an orthonormal frame.

    ``<nabla_i e_j, e_k> = (c_ijk - c_jki + c_kij) / 2``
    """
    c = np.asarray(c, dtype=float)
    half = 0.5 * (c - c.transpose(2, 0, 1) + c.transpose(1, 2, 0))
    # half[i, j, k] is the e_k coefficient of nabla_i e_j, i.e. gamma[i][k, j]
    return half.transpose(0, 2, 1).copy()


def levi_civita(mla: MetricLieAlgebra, tol: Tolerance | None = None) -> Connection:
    tol = mla.tol if tol is None else tol
    frame = orthonormal_frame(mla, tol)
    alg = change_basis(mla.algebra, frame)
    conn = Connection(frame, koszul_gamma(alg.structure), alg, tol)
    scale = max(1.0, la.max_abs(alg.structure))
    assert conn.skew_residual() <= 1e-9 * scale
    assert conn.torsion_residual() <= 1e-9 * scale
    return conn


# ------------------------------------------------------------ rotation blocks


def _is_two_block(M, eps) -> bool:
    off = np.array(M, dtype=float)
    off[:2, :2] = 0.0
    off[2:, 2:] = 0.0
    return la.max_abs(off) <= eps


def connection_form_decomposition(conn: Connection, H, frame=None, tol: Tolerance | None = None):
    """Split a 4-dimensional connection commuting with ``H`` into two
    rotation forms.

    The frame (current one, or the orthogonal ``frame`` given relative to
    it) must be adapted so that ``H = blocks(rot(a1), rot(a2))`` on the
    ordered basis ``(e1, f1, e2, f2)`` with ``|a1| != |a2|``. Then every
    covariant derivative is ``alpha(x) rot(e1, f1) + beta(x) rot(e2, f2)``
    and the returned covectors are ``alpha(x) = <nabla_x e1, f1>`` and
    ``beta(x) = <nabla_x e2, f2>``.
    """
    tol = conn.tol if tol is None else tol
    if conn.dim != 4:
        raise NotBlockForm(f"rotation-block decomposition needs dimension 4, got {conn.dim}")
    H = np.asarray(H, dtype=float)
    if frame is not None:
        Q = frame.matrix if isinstance(frame, Frame) else np.asarray(frame, dtype=float)
        conn = conn.reframe(Q)
        H = Q.T @ H @ Q
    hscale = max(1.0, la.max_abs(H))
    if not _is_two_block(H, tol.threshold(hscale)) or la.max_abs(H + H.T) > tol.threshold(hscale):
        raise NotBlockForm("H is not of the form blocks(rot(a1), rot(a2)) in this frame")
    a1, a2 = H[1, 0], H[3, 2]
    if abs(abs(a1) - abs(a2)) <= tol.threshold(hscale):
        raise NotBlockForm(f"H has |a1| = |a2| = {abs(a1):.6g}; the two planes are not determined")
    eps = tol.threshold(max(1.0, la.max_abs(conn.gamma)))
    for i, g in enumerate(conn.gamma):
        if not _is_two_block(g, eps):
            raise NotBlockForm(f"covariant derivative along basis vector {i} mixes the two planes")
    alpha = conn.gamma[:, 1, 0].copy()
    beta = conn.gamma[:, 3, 2].copy()
    return alpha + 0.0, beta + 0.0


def brackets_from_forms(alpha, beta) -> LieAlgebra:
    """Brackets on the orthonormal basis ``(e1, f1, e2, f2)`` of the
    torsion-free connection ``nabla_x = alpha(x) rot(e1, f1) + beta(x) rot(e2, f2)``."""
    a = np.asarray(alpha, dtype=float)
    b = np.asarray(beta, dtype=float)
    if a.shape != (4,) or b.shape != (4,):
        raise AlgebraError("alpha and beta must be covectors of length 4")
    E1, F1, E2, F2 = range(4)
    entries = [
        (E1, F1, E1, -a[E1]), (E1, F1, F1, -a[F1]),
        (E1, E2, F2, b[E1]), (E1, E2, F1, -a[E2]),
        (E1, F2, E2, -b[E1]), (E1, F2, F1, -a[F2]),
        (F1, E2, F2, b[F1]), (F1, E2, E1, a[E2]),
        (F1, F2, E2, -b[F1]), (F1, F2, E1, a[F2]),
        (E2, F2, E2, -b[E2]), (E2, F2, F2, -b[F2]),
    ]
    return LieAlgebra.from_brackets(4, entries)


def jacobi_relations(alpha, beta) -> dict[str, float]:
    """The ten quadratic relations equivalent to the Jacobi identity for
    :func:`brackets_from_forms`, labelled R1..R10."""
    ae1, af1, ae2, af2 = np.asarray(alpha, dtype=float)
    be1, bf1, be2, bf2 = np.asarray(beta, dtype=float)
    return {
        "R1": ae1 * be1 + af1 * bf1,
        "R2": ae1 * ae2 + af2 * bf1,
        "R3": -ae2 * af1 + af2 * be1,
        "R4": ae1 * af2 - ae2 * bf1,
        "R5": af1 * af2 + ae2 * be1,
        "R6": be2 * ae2 + bf2 * af2,
        "R7": be2 * be1 + bf1 * af2,
        "R8": -be1 * bf2 + bf1 * ae2,
        "R9": be2 * bf1 - be1 * af2,
        "R10": bf2 * bf1 + be1 * ae2,
    }


def relation_matrices(alpha, beta) -> dict[str, np.ndarray]:
    """2x2 matrices whose determinants and products encode the relations:
    ``det U`` is R1, ``det V`` is R6, the entries of ``A @ B`` are R2..R5
    and those of ``C @ D`` are R7..R10."""
    ae1, af1, ae2, af2 = np.asarray(alpha, dtype=float)
    be1, bf1, be2, bf2 = np.asarray(beta, dtype=float)
    U = np.array([[ae1, -bf1], [af1, be1]])
    V = np.array([[be2, -af2], [bf2, ae2]])
    A = np.array([[ae2, af2], [af2, -ae2]])
    B = np.array([[ae1, be1], [bf1, af1]])
    C = np.array([[be1, bf1], [bf1, -be1]])
    D = np.array([[be2, ae2], [af2, bf2]])
    return {"U": U, "V": V, "A": A, "B": B, "C": C, "D": D, "AB": A @ B, "CD": C @ D}


def matrix_relations_residual(alpha, beta) -> float:
    m = relation_matrices(alpha, beta)
    return max(
        abs(np.linalg.det(m["U"])),
        abs(np.linalg.det(m["V"])),
        la.max_abs(m["AB"]),
        la.max_abs(m["CD"]),
    )


def build_from_connection_forms(alpha, beta, tol: Tolerance | None = None) -> MetricLieAlgebra:
    """Metric Lie algebra (orthonormal basis ``e1, f1, e2, f2``) whose
    Levi-Civita connection is given by the rotation forms ``alpha, beta``.

    Raises :class:`JacobiRelationsViolated` listing the failing relations.
    """
    tol = as_tol(tol)
    a = np.asarray(alpha, dtype=float)
    b = np.asarray(beta, dtype=float)
    if la.max_abs(a) == 0.0 and la.max_abs(b) == 0.0:
        raise AlgebraError("alpha and beta are both zero")
    scale = max(la.max_abs(a), la.max_abs(b))
    eps = tol.threshold(scale * scale)
    rel = jacobi_relations(a, b)
    bad = [(k, float(v)) for k, v in rel.items() if abs(v) > eps]
    if bad:
        raise JacobiRelationsViolated(bad)
    return MetricLieAlgebra(brackets_from_forms(a, b), np.eye(4), tol)
