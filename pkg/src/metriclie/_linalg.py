"""Tolerance-aware dense linear algebra used throughout the package.

Subspaces are passed around as ``n x d`` arrays whose columns span them.
"""
from __future__ import annotations

import numpy as np

from .tolerance import Tolerance, as_tol


def svd_rank(s: np.ndarray, tol: Tolerance) -> int:
    if s.size == 0:
        return 0
    return int(np.sum(s > tol.threshold(s[0])))


def rank(A, tol: Tolerance | None = None) -> int:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0:
        return 0
    return svd_rank(np.linalg.svd(A, compute_uv=False), as_tol(tol))


def nullspace(A, tol: Tolerance | None = None) -> np.ndarray:
    """Orthonormal basis (columns) of the kernel of ``A``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = A.shape[1]
    if A.shape[0] == 0 or n == 0:
        return np.eye(n)
    _, s, vt = np.linalg.svd(A, full_matrices=True)
    r = svd_rank(s, as_tol(tol))
    return vt[r:].T.copy()


def orth(A, tol: Tolerance | None = None) -> np.ndarray:
    """Orthonormal basis (columns) of the column space of ``A``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0:
        return np.zeros((A.shape[0], 0))
    u, s, _ = np.linalg.svd(A, full_matrices=False)
    return u[:, : svd_rank(s, as_tol(tol))].copy()


def rref(A, tol: Tolerance | None = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form with partial pivoting.

    Entries at or below the threshold (relative to the largest entry)
    are not used as pivots. Returns the nonzero rows and pivot columns.
    """
    R = np.array(A, dtype=float)
    m, n = R.shape
    if R.size == 0:
        return R[:0], []
    eps = as_tol(tol).threshold(np.abs(R).max())
    pivots = []
    row = 0
    for col in range(n):
        if row >= m:
            break
        p = row + int(np.argmax(np.abs(R[row:, col])))
        if abs(R[p, col]) <= eps:
            R[row:, col] = 0.0
            continue
        R[[row, p]] = R[[p, row]]
        R[row] /= R[row, col]
        for r in range(m):
            if r != row:
                R[r] -= R[r, col] * R[row]
        pivots.append(col)
        row += 1
    return R[:row], pivots


def gram_schmidt(B) -> np.ndarray:
    """Orthonormalise the columns of ``B`` in order (no pivoting)."""
    B = np.asarray(B, dtype=float)
    if B.shape[1] == 0:
        return B.copy()
    q, r = np.linalg.qr(B)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def canonical_basis(B, tol: Tolerance | None = None) -> np.ndarray:
    """Deterministic orthonormal basis of span(B).

    The basis depends only on the subspace: the echelon form of any
    spanning set is unique, and it is then orthonormalised in order.
    Coordinate subspaces come out as coordinate vectors.
    """
    Q = orth(B, tol)
    if Q.shape[1] == 0:
        return Q
    R, _ = rref(Q.T, tol)
    C = gram_schmidt(R.T)
    C[np.abs(C) < 1e-15] = 0.0
    return C


def project_out(Q: np.ndarray, V) -> np.ndarray:
    V = np.asarray(V, dtype=float)
    if Q.shape[1] == 0:
        return V.copy()
    return V - Q @ (Q.T @ V)


def projection_residual(Q: np.ndarray, V) -> float:
    """Largest relative distance from a column of ``V`` to span(Q).

    ``Q`` must have orthonormal columns. Zero columns count as inside.
    """
    V = np.atleast_2d(np.asarray(V, dtype=float))
    if V.ndim == 2 and V.shape[0] != Q.shape[0]:
        V = V.T
    if V.shape[1] == 0:
        return 0.0
    norms = np.linalg.norm(V, axis=0)
    res = np.linalg.norm(project_out(Q, V), axis=0)
    rel = np.where(norms > 0, res / np.where(norms > 0, norms, 1.0), 0.0)
    return float(rel.max())


def same_span(P: np.ndarray, Q: np.ndarray) -> float:
    """Mutual projection residual between two orthonormal bases."""
    if P.shape[1] != Q.shape[1]:
        return float("inf")
    return max(projection_residual(P, Q), projection_residual(Q, P))


# skew matrices <-> coordinate vectors over {E_ab : a < b}, where E_ab sends
# e_a to e_b; the coordinate of E_ab in M is M[b, a]


def skew_pairs(n: int) -> list[tuple[int, int]]:
    return [(a, b) for a in range(n) for b in range(a + 1, n)]


def skew_dim(n: int) -> int:
    return n * (n - 1) // 2


def skew_to_vec(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    a, b = np.triu_indices(M.shape[0], 1)
    return M[b, a].copy()


def vec_to_skew(v, n: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    M = np.zeros((n, n))
    a, b = np.triu_indices(n, 1)
    M[b, a] = v
    M[a, b] = -v
    return M


def skew_basis(n: int) -> np.ndarray:
    return np.array([vec_to_skew(e, n) for e in np.eye(skew_dim(n))]).reshape(-1, n, n)


def rot(n: int, a: int, b: int, angle: float = 1.0) -> np.ndarray:
    """Plane rotation generator sending e_a to angle * e_b."""
    M = np.zeros((n, n))
    M[b, a] = angle
    M[a, b] = -angle
    return M


def sym_basis(m: int) -> np.ndarray:
    out = []
    for i in range(m):
        for j in range(i, m):
            S = np.zeros((m, m))
            S[i, j] = S[j, i] = 1.0
            out.append(S)
    return np.array(out).reshape(-1, m, m)


def commutator(A, B) -> np.ndarray:
    return A @ B - B @ A


def skew_commutant(ops, n: int, tol: Tolerance | None = None) -> np.ndarray:
    """Skew matrices commuting with every matrix in ``ops``.

    Returned as coordinate vectors (columns) in the skew basis.
    """
    E = skew_basis(n)
    if len(ops) == 0 or E.shape[0] == 0:
        return np.eye(E.shape[0])
    L = np.stack([np.concatenate([commutator(g, e).ravel() for g in ops]) for e in E], axis=1)
    return nullspace(L, tol)


def charpoly(M) -> np.ndarray:
    """Monic characteristic polynomial coefficients, highest degree first."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return np.ones(1)
    c = np.real(np.poly(np.linalg.eigvals(M)))
    scale = max(1.0, float(np.abs(M).max())) ** np.arange(len(c))
    c[np.abs(c) < 1e-12 * scale] = 0.0
    return c + 0.0


def max_abs(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.abs(x).max()) if x.size else 0.0
