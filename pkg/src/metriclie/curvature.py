from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _linalg as la
from .algebra import AlgebraError, LieAlgebra
from .connection import Connection
from .tolerance import DEFAULT_TOL, Tolerance


class FrameMismatch(AlgebraError):
    pass


class DegeneratePlane(AlgebraError):
    pass


@dataclass(frozen=True, eq=False)
class CurvatureData:
    """``operators[i, j]`` is the matrix of R(e_i, e_j) in the orthonormal frame."""

    operators: np.ndarray
    tol: Tolerance = field(default=DEFAULT_TOL)

    @property
    def dim(self) -> int:
        return self.operators.shape[0]

    def operator(self, x, y) -> np.ndarray:
        return np.einsum("i,j,ijkl->kl", x, y, self.operators)

    def tensor(self) -> np.ndarray:
        """``T[i, j, k, l] = <R(e_i, e_j) e_k, e_l>``."""
        return self.operators.transpose(0, 1, 3, 2).copy()

    def antisymmetry_residual(self) -> float:
        return la.max_abs(self.operators + self.operators.transpose(1, 0, 2, 3))

    def skew_residual(self) -> float:
        return la.max_abs(self.operators + self.operators.transpose(0, 1, 3, 2))

    def bianchi_residual(self) -> float:
        # v[i, j, k] = R(e_i, e_j) e_k
        v = self.operators.transpose(0, 1, 3, 2)
        return la.max_abs(v + v.transpose(1, 2, 0, 3) + v.transpose(2, 0, 1, 3))

    def pair_symmetry_residual(self) -> float:
        T = self.tensor()
        return la.max_abs(T - T.transpose(2, 3, 0, 1))

    def is_flat(self) -> bool:
        return la.max_abs(self.operators) <= self.tol.abs

    def nonzero_operators(self):
        n = self.dim
        return [self.operators[i, j] for i in range(n) for j in range(i + 1, n)]


@dataclass(frozen=True, eq=False)
class RicciData:
    operator: np.ndarray
    scalar: float

    def symmetry_residual(self) -> float:
        return la.max_abs(self.operator - self.operator.T)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(0.5 * (self.operator + self.operator.T))

    def charpoly(self) -> np.ndarray:
        return la.charpoly(self.operator)


def curvature(conn: Connection, algebra: LieAlgebra | None = None) -> CurvatureData:
    """R(x, y) = [nabla_x, nabla_y] - nabla_[x, y] on frame vectors.

    ``algebra`` defaults to the brackets stored with the connection; when
    given it must be expressed in the same frame.
    """
    if algebra is None:
        algebra = conn.algebra
    elif algebra.dim != conn.dim or la.max_abs(algebra.structure - conn.algebra.structure) > conn.tol.threshold(
        max(1.0, la.max_abs(conn.algebra.structure))
    ):
        raise FrameMismatch("brackets are not expressed in the frame of the connection")
    g = conn.gamma
    gg = np.einsum("iab,jbc->ijac", g, g)
    R = gg - gg.transpose(1, 0, 2, 3) - np.einsum("ijk,kab->ijab", algebra.structure, g)
    R = R + 0.0
    return CurvatureData(R, conn.tol)


def ricci(curv: CurvatureData) -> RicciData:
    """``Ric[j, k] = sum_i <R(e_i, e_j) e_k, e_i>``."""
    Ric = np.einsum("ijik->jk", curv.operators) + 0.0
    return RicciData(Ric, float(np.trace(Ric)))


def sectional(curv: CurvatureData, x, y) -> float:
    """K(x, y) = <R(x, y) y, x> / (|x|^2 |y|^2 - <x, y>^2), orthonormal coordinates."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    area = (x @ x) * (y @ y) - (x @ y) ** 2
    if area <= curv.tol.threshold((x @ x) * (y @ y)):
        raise DegeneratePlane("x and y do not span a plane")
    return float(x @ (curv.operator(x, y) @ y)) / area
