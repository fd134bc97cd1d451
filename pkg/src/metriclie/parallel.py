"""Parallel skew-symmetric endomorphisms: solving, spectral classification,
and isometry-invariant fingerprints."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import _linalg as la
from .algebra import (
    AlgebraError,
    MetricLieAlgebra,
    Subspace,
    center,
    derived_subalgebra,
    preserves,
    restrict,
    second_derived,
)
from .connection import Connection, levi_civita
from .curvature import curvature, ricci
from .tolerance import DEFAULT_TOL, Tolerance

NOT_PRESERVED = "not preserved"


class NotParallel(AlgebraError):
    pass


@dataclass(frozen=True, eq=False)
class ParallelBasis:
    """Basis of the parallel skew endomorphisms, as matrices in the
    orthonormal frame of the connection. Orthonormal for the inner product
    ``<A, B> = tr(A^T B) / 2`` (plane rotations have unit length)."""

    elements: np.ndarray
    n: int
    tol: Tolerance = field(default=DEFAULT_TOL)

    @property
    def dim(self) -> int:
        return self.elements.shape[0]

    def __len__(self):
        return self.dim

    def __iter__(self):
        return iter(self.elements)

    def coordinates(self) -> np.ndarray:
        """Skew coordinates of the elements, as columns."""
        return np.array([la.skew_to_vec(H) for H in self.elements]).reshape(-1, la.skew_dim(self.n)).T

    def residual(self, H) -> float:
        """Relative distance of a skew matrix from the span."""
        return la.projection_residual(self.coordinates(), la.skew_to_vec(H))

    def contains(self, H) -> bool:
        return self.residual(H) <= max(self.tol.rel, 1e-9)

    def combination(self, coeffs) -> np.ndarray:
        return np.einsum("i,ijk->jk", np.asarray(coeffs, dtype=float), self.elements)


def commutation_residual(conn: Connection, H) -> float:
    H = np.asarray(H, dtype=float)
    return max((la.max_abs(la.commutator(g, H)) for g in conn.gamma), default=0.0)


def parallel_space(conn: Connection, tol: Tolerance | None = None) -> ParallelBasis:
    """All skew H with [nabla_{e_i}, H] = 0 for every i.

    The basis is the echelon basis of the solution space in skew
    coordinates (ordered (0,1), (0,2), ..., (n-2,n-1)), orthonormalised in
    order, so it does not depend on SVD round-off.
    """
    tol = conn.tol if tol is None else tol
    n = conn.dim
    N = la.skew_commutant(list(conn.gamma), n, tol)
    C = la.canonical_basis(N, tol) if N.shape[1] else N
    els = np.array([la.vec_to_skew(C[:, i], n) for i in range(C.shape[1])]).reshape(-1, n, n)
    return ParallelBasis(els + 0.0, n, tol)


@dataclass(frozen=True, eq=False)
class SpectralClass:
    """Normal form of a skew endomorphism: ``H e_i = a_i f_i`` and
    ``H f_i = -a_i e_i`` on orthogonal planes, zero on the kernel."""

    rotation_pairs: list
    kernel: Subspace
    is_complex_multiple: bool
    is_complex_structure: bool

    @property
    def angles(self) -> list[float]:
        return [a for a, _ in self.rotation_pairs]

    def adapted_frame(self) -> np.ndarray:
        """Orthogonal matrix with columns e_1, f_1, e_2, f_2, ..., kernel."""
        cols = [p.basis for _, p in self.rotation_pairs] + [self.kernel.basis]
        return np.concatenate(cols, axis=1)


def _clusters(vals: np.ndarray, gap: float) -> list[list[int]]:
    order = np.argsort(vals)
    groups = [[int(order[0])]] if len(order) else []
    for a, b in zip(order[:-1], order[1:]):
        if vals[b] - vals[a] > gap:
            groups.append([])
        groups[-1].append(int(b))
    return groups


def classify_element(H, tol: Tolerance | None = None) -> SpectralClass:
    tol = tol or DEFAULT_TOL
    H = np.asarray(H, dtype=float)
    n = H.shape[0]
    S = H.T @ H
    mu, V = np.linalg.eigh(0.5 * (S + S.T))
    a = np.sqrt(np.clip(mu, 0.0, None))
    amax = float(a.max()) if n else 0.0
    zero = tol.threshold(amax)
    ker_idx = [i for i in range(n) if a[i] <= zero]
    pairs = []
    nz = [i for i in range(n) if a[i] > zero]
    for group in _clusters(a[nz], tol.threshold(amax) * 1e3) if nz else []:
        idx = [nz[g] for g in group]
        W = la.canonical_basis(V[:, idx])
        ang = float(np.mean(a[idx]))
        while W.shape[1] > 0:
            e = W[:, 0]
            f = H @ e / ang
            f = f / np.linalg.norm(f)
            pairs.append((ang, Subspace(np.column_stack([e, f]))))
            W = la.orth(la.project_out(np.column_stack([e, f]), W))
    pairs.sort(key=lambda p: -p[0])
    kernel = Subspace.span(V[:, ker_idx], n) if ker_idx else Subspace(np.zeros((n, 0)))
    angles = [p[0] for p in pairs]
    cm = bool(pairs) and kernel.dim == 0 and (max(angles) - min(angles) <= tol.threshold(max(angles)) * 1e3)
    cs = cm and abs(angles[0] - 1.0) <= tol.threshold(1.0) * 1e3
    return SpectralClass(pairs, kernel, bool(cm), bool(cs))


def contains_non_complex_multiple(basis: ParallelBasis, seed: int = 0, tol: Tolerance | None = None):
    """Search the span for an element that is not a multiple of a complex
    structure. Returns ``(found, witness)``; ``witness`` is None if not found.

    Candidates: the basis elements, the pairwise combinations
    ``H_i + c H_j`` for ``c`` in (1, -1, 2), then 8 seeded random draws.
    """
    tol = tol or basis.tol
    els = list(basis.elements)
    cands = list(els)
    for i, j in combinations(range(len(els)), 2):
        cands += [els[i] + c * els[j] for c in (1.0, -1.0, 2.0)]
    rng = np.random.default_rng(seed)
    if els:
        cands += [basis.combination(rng.standard_normal(len(els))) for _ in range(8)]
    for H in cands:
        if la.max_abs(H) <= tol.abs:
            continue
        if not classify_element(H, tol).is_complex_multiple:
            return True, H + 0.0
    return False, None


# ------------------------------------------------------------- fingerprints


@dataclass(frozen=True, eq=False)
class Fingerprint:
    """Isometric-isomorphism invariants of a pair (metric Lie algebra, H).

    ``dims`` is (dim g, dim [g,g], dim z(g), dim [[g,g],[g,g]], dim of the
    parallel space). ``killing_charpoly`` is the characteristic polynomial
    of the Killing form as an operator through the metric.
    """

    ric_charpoly: np.ndarray
    h_charpoly: np.ndarray
    h_on_derived_charpoly: object
    h_on_center_charpoly: object
    dims: tuple
    killing_charpoly: np.ndarray

    def fields(self) -> dict:
        return {
            "dims": self.dims,
            "ric_charpoly": self.ric_charpoly,
            "killing_charpoly": self.killing_charpoly,
            "h_charpoly": self.h_charpoly,
            "h_on_derived_charpoly": self.h_on_derived_charpoly,
            "h_on_center_charpoly": self.h_on_center_charpoly,
        }


def _restricted_charpoly(H, S: Subspace, tol):
    if not preserves(H, S, tol):
        return NOT_PRESERVED
    return la.charpoly(restrict(H, S))


def killing_form(algebra) -> np.ndarray:
    ad = algebra.ad_matrices()
    return np.einsum("iab,jba->ij", ad, ad)


def fingerprint(mla: MetricLieAlgebra, H, orthonormal: bool = False, tol: Tolerance | None = None) -> Fingerprint:
    """Fingerprint of ``(mla, H)``.

    ``H`` is given in the input basis of ``mla`` unless ``orthonormal`` is
    set, in which case it is read in the orthonormal frame.
    """
    tol = tol or mla.tol
    conn = levi_civita(mla, tol)
    H = np.asarray(H, dtype=float)
    if not orthonormal:
        H = conn.frame.operator_to_frame(H)
    res = commutation_residual(conn, H)
    if res > tol.threshold(max(1.0, la.max_abs(conn.gamma)) * max(1.0, la.max_abs(H))) * 10:
        raise NotParallel(f"H does not commute with the connection (residual {res:.3e})")
    alg = conn.algebra
    der = derived_subalgebra(alg, tol)
    cen = center(alg, tol)
    dims = (alg.dim, der.dim, cen.dim, second_derived(alg, tol).dim, parallel_space(conn, tol).dim)
    return Fingerprint(
        ric_charpoly=ricci(curvature(conn)).charpoly(),
        h_charpoly=la.charpoly(H),
        h_on_derived_charpoly=_restricted_charpoly(H, der, tol),
        h_on_center_charpoly=_restricted_charpoly(H, cen, tol),
        dims=dims,
        killing_charpoly=la.charpoly(killing_form(alg)),
    )


@dataclass(frozen=True)
class Distinct:
    reason: str
    field: str

    def __str__(self):
        return f"Distinct: {self.reason}"


@dataclass(frozen=True)
class Inconclusive:
    reason: str = "all fingerprint fields agree; equivalence is not decided"

    def __str__(self):
        return f"Inconclusive: {self.reason}"


def _fmt_poly(p) -> str:
    if isinstance(p, str):
        return p
    return "[" + ", ".join(f"{x:.6g}" for x in p) + "]"


def compare_fingerprints(fa: Fingerprint, fb: Fingerprint, tol: Tolerance | None = None):
    tol = tol or DEFAULT_TOL
    if fa.dims != fb.dims:
        return Distinct(f"dimension tuples differ: {fa.dims} vs {fb.dims}", "dims")
    for name, pa in fa.fields().items():
        if name == "dims":
            continue
        pb = fb.fields()[name]
        if isinstance(pa, str) or isinstance(pb, str):
            if isinstance(pa, str) and isinstance(pb, str):
                continue
            return Distinct(f"{name}: {_fmt_poly(pa)} vs {_fmt_poly(pb)}", name)
        if len(pa) != len(pb):
            return Distinct(f"{name} degrees differ", name)
        scale = max(1.0, la.max_abs(pa), la.max_abs(pb))
        if la.max_abs(np.asarray(pa) - np.asarray(pb)) > tol.threshold(scale):
            return Distinct(f"{name}: {_fmt_poly(pa)} vs {_fmt_poly(pb)}", name)
    return Inconclusive()


def distinguish(a, b, orthonormal: bool = False, tol: Tolerance | None = None):
    """Compare two pairs ``(mla, H)``. Returns :class:`Distinct` when an
    invariant differs, else :class:`Inconclusive`. Never claims equivalence."""
    fa = fingerprint(a[0], a[1], orthonormal, tol)
    fb = fingerprint(b[0], b[1], orthonormal, tol)
    return compare_fingerprints(fa, fb, tol)
