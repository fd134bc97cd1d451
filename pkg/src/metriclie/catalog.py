"""Built-in metric Lie algebras.

Groups:

* ``family``: bare solvable Lie algebras of dimension <= 4 with the
  identity metric (aff, h3, r3_lambda, r3p_lambda, r4plambda0, d4lambda,
  d4plambda, abelian).
* ``kahler``: 4-dimensional Kahler Lie algebras on an orthonormal basis,
  with their complex structures.
* ``reducible``: 4-dimensional metric Lie algebras carrying a parallel
  tensor that is not a multiple of a complex structure; basis
  (e1, f1, e2, f2), metric t*I (or diag(t, t, ts, ts)), tensor
  ``H = blocks(rot(a1), rot(a2))``.
* ``irreducible``: the d-type algebras on basis (e0, e1, e2, e3) with
  metric t*I and tensor ``J = c * J0``.

Symbols: ``r4p`` is r'_{4,lambda,0}, ``d4p`` is d'_{4,lambda}, ``d4half``
is d_{4,1/2}, ``d4.2`` is d_{4,2}.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _linalg as la
from .algebra import AlgebraError, MetricLieAlgebra, validate_lie_algebra
from .connection import levi_civita
from .parallel import commutation_residual, parallel_space
from .tolerance import Tolerance, as_tol


class UnknownEntry(AlgebraError):
    pass


class ParamOutOfRange(AlgebraError):
    pass


@dataclass(frozen=True)
class Param:
    name: str
    default: float
    constraint: str
    check: Callable[[float], bool] = field(repr=False, default=lambda v: True)
    integer: bool = False


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    symbol: str
    group: str
    params: tuple
    builder: Callable = field(repr=False)
    expected_parallel_dim: int | None = None

    def defaults(self) -> dict:
        return {p.name: p.default for p in self.params}

    def describe(self) -> dict:
        return {
            "name": self.name,
            "symbol": self.symbol,
            "group": self.group,
            "params": {p.name: {"default": p.default, "constraint": p.constraint} for p in self.params},
            "expected_parallel_dim": self.expected_parallel_dim,
        }


@dataclass(frozen=True, eq=False)
class CatalogBuild:
    name: str
    params: dict
    mla: MetricLieAlgebra
    tensors: dict
    generators: list
    algebra_key: tuple
    expected_parallel_dim: int | None = None


def _pos(v):
    return v > 0


def _t():
    return Param("t", 1.0, "t > 0", _pos)


def _cs(n, pairs):
    """Complex structure with J e_i = sign * e_j (and J e_j = -sign * e_i)."""
    J = np.zeros((n, n))
    for i, j, s in pairs:
        J[j, i] = s
        J[i, j] = -s
    return J


def _blocks(a1, a2):
    return la.rot(4, 0, 1, a1) + la.rot(4, 2, 3, a2)


J0_D = np.array([[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]], dtype=float)
J0_D42 = _blocks(1.0, 1.0)


def _mla(n, brackets, gram=None):
    return MetricLieAlgebra.from_brackets(n, brackets, gram)


# ------------------------------------------------------------------ families


def _abelian(p):
    n = int(p["n"])
    return _mla(n, []), {}, [], ("abelian", n)


def _aff(p):
    return _mla(2, [(0, 1, 1, 1.0)]), {}, [], ("aff",)


def _h3(p):
    return _mla(3, [(0, 1, 2, 1.0)]), {}, [], ("h3",)


def _r3(p):
    lam = p["lambda"]
    key = lam if abs(lam) <= 1 else 1.0 / lam
    return _mla(3, [(0, 1, 1, 1.0), (0, 2, 2, lam)]), {}, [], ("r3", round(key, 12))


def _r3p(p):
    lam = p["lambda"]
    br = [(0, 1, 1, lam), (0, 1, 2, -1.0), (0, 2, 1, 1.0), (0, 2, 2, lam)]
    return _mla(3, br), {}, [], ("r3p", round(abs(lam), 12))


def _r4p_bare(p):
    lam = p["lambda"]
    br = [(3, 0, 0, lam), (3, 1, 2, -1.0), (3, 2, 1, 1.0)]
    return _mla(4, br), {}, [], ("r4p", round(lam, 12))


def _d4_bare(p):
    lam = p["lambda"]
    br = [(3, 0, 0, lam), (3, 1, 1, 1.0 - lam), (3, 2, 2, 1.0), (0, 1, 2, 1.0)]
    return _mla(4, br), {}, [], ("d4", round(lam, 12))


def _d4p_bare(p):
    lam = p["lambda"]
    br = [(3, 0, 0, lam), (3, 0, 1, -1.0), (3, 1, 0, 1.0), (3, 1, 1, lam), (3, 2, 2, 2 * lam), (0, 1, 2, 1.0)]
    return _mla(4, br), {}, [], ("d4p", round(lam, 12))


# -------------------------------------------------------------------- kahler


def _k_r2_aff(p):
    t = p["t"]
    J = _cs(4, [(0, 1, 1), (2, 3, 1)])
    return _mla(4, [(0, 1, 1, t)]), {"J": J}, [J], ("R2_x_aff",)


def _k_r_e2(p):
    t = p["t"]
    J = _cs(4, [(0, 3, 1), (1, 2, 1)])
    return _mla(4, [(0, 1, 2, -t), (0, 2, 1, t)]), {"J": J}, [J], ("R_x_r3p", 0.0)


def _k_aff_aff(p):
    t, s = p["t"], p["s"]
    J = _cs(4, [(0, 1, 1), (2, 3, 1)])
    return _mla(4, [(0, 1, 1, t), (2, 3, 3, s)]), {"J": J}, [J], ("aff_x_aff",)


def _k_r4p(p):
    t, lam = p["t"], p["lambda"]
    br = [(3, 0, 0, t), (3, 1, 2, -t / lam), (3, 2, 1, t / lam)]
    J1 = _cs(4, [(0, 3, -1), (1, 2, 1)])
    J2 = _cs(4, [(0, 3, -1), (1, 2, -1)])
    return _mla(4, br), {"J1": J1, "J2": J2}, [J1, J2], ("r4p", round(lam, 12))


def _k_d42(p):
    t = p["t"]
    br = [(0, 1, 2, t), (3, 2, 2, t / 2), (3, 0, 0, t), (3, 1, 1, -t / 2)]
    J = _cs(4, [(3, 0, -1), (1, 2, 1)])
    return _mla(4, br), {"J": J}, [J], ("d4", 2.0)


def _k_d4half(p):
    t = p["t"]
    br = [(0, 1, 2, t), (3, 2, 2, t), (3, 0, 0, t / 2), (3, 1, 1, t / 2)]
    J = _cs(4, [(0, 1, 1), (3, 2, 1)])
    return _mla(4, br), {"J": J}, [J], ("d4", 0.5)


def _k_d4p(p):
    t, d = p["t"], p["delta"]
    br = [
        (0, 1, 2, t),
        (3, 0, 0, t / 2), (3, 0, 1, -t / d),
        (3, 2, 2, t),
        (3, 1, 0, t / d), (3, 1, 1, t / 2),
    ]
    J1 = _cs(4, [(0, 1, 1), (3, 2, 1)])
    return _mla(4, br), {"J1": J1, "J2": -J1}, [J1, -J1], ("d4p", round(d / 2, 12))


# ----------------------------------------------------------------- reducible


def _H(p):
    return _blocks(p["a1"], p["a2"])


_RED_GENS = [_blocks(1.0, 0.0), _blocks(0.0, 1.0)]


def _r_e2(p):
    t = p["t"]
    br = [(0, 2, 3, -1.0), (0, 3, 2, 1.0)]
    return _mla(4, br, t * np.eye(4)), {"H": _H(p)}, list(_RED_GENS), ("R_x_r3p", 0.0)


def _r2_aff(p):
    t = p["t"]
    return _mla(4, [(2, 3, 3, 1.0)], t * np.eye(4)), {"H": _H(p)}, list(_RED_GENS), ("R2_x_aff",)


def _r4p_red(p):
    t, lam = p["t"], p["lambda"]
    br = [(0, 1, 1, lam), (0, 3, 2, 1.0), (0, 2, 3, -1.0)]
    return _mla(4, br, t * np.eye(4)), {"H": _H(p)}, list(_RED_GENS), ("r4p", round(lam, 12))


def _aff_aff_red(p):
    t, s = p["t"], p["s"]
    br = [(0, 1, 1, 1.0), (2, 3, 3, 1.0)]
    G = np.diag([t, t, t * s, t * s])
    return _mla(4, br, G), {"H": _H(p)}, list(_RED_GENS), ("aff_x_aff",)


# --------------------------------------------------------------- irreducible


def _d4half(p):
    t, c = p["t"], p["c"]
    br = [(1, 2, 3, 1.0), (0, 1, 1, 0.5), (0, 2, 2, 0.5), (0, 3, 3, 1.0)]
    return _mla(4, br, t * np.eye(4)), {"J": c * J0_D}, [J0_D.copy()], ("d4", 0.5)


def _d42(p):
    t, c = p["t"], p["c"]
    br = [(1, 2, 3, 1.0), (0, 1, 1, -1.0), (0, 2, 2, 0.5), (0, 3, 3, -0.5)]
    return _mla(4, br, t * np.eye(4)), {"J": c * J0_D42}, [J0_D42.copy()], ("d4", 2.0)


def _d4p(p):
    t, c, lam = p["t"], p["c"], p["lambda"]
    w = 1.0 / (2.0 * lam)
    br = [(1, 2, 3, 1.0), (0, 1, 1, 0.5), (0, 1, 2, -w), (0, 2, 1, w), (0, 2, 2, 0.5), (0, 3, 3, 1.0)]
    return _mla(4, br, t * np.eye(4)), {"J": c * J0_D}, [J0_D.copy()], ("d4p", round(lam, 12))


def _any(v):
    return True


_A1 = Param("a1", 1.0, "any real", _any)
_A2 = Param("a2", 2.0, "any real", _any)

_ENTRIES = [
    CatalogEntry("abelian", "R^n", "family", (Param("n", 4, "integer n >= 1", lambda v: v >= 1 and v == int(v), True),), _abelian),
    CatalogEntry("aff", "aff(R)", "family", (), _aff),
    CatalogEntry("h3", "h_3", "family", (), _h3),
    CatalogEntry("r3_lambda", "r_{3,lambda}", "family", (Param("lambda", 1.0, "any real", _any),), _r3),
    CatalogEntry("r3p_lambda", "r'_{3,lambda}", "family", (Param("lambda", 0.0, "any real", _any),), _r3p),
    CatalogEntry("r4plambda0", "r'_{4,lambda,0}", "family", (Param("lambda", 1.0, "lambda > 0", _pos),), _r4p_bare),
    CatalogEntry("d4lambda", "d_{4,lambda}", "family", (Param("lambda", 1.0, "lambda >= 1/2", lambda v: v >= 0.5),), _d4_bare),
    CatalogEntry("d4plambda", "d'_{4,lambda}", "family", (Param("lambda", 0.0, "lambda >= 0", lambda v: v >= 0),), _d4p_bare),
    CatalogEntry("kahler_r2_aff", "R^2 x aff(R)", "kahler", (_t(),), _k_r2_aff),
    CatalogEntry("kahler_r_e2", "R x e(2)", "kahler", (_t(),), _k_r_e2),
    CatalogEntry("kahler_aff_x_aff", "aff(R) x aff(R)", "kahler", (_t(), Param("s", 1.0, "s > 0", _pos)), _k_aff_aff),
    CatalogEntry("kahler_r4p", "r'_{4,lambda,0}", "kahler", (_t(), Param("lambda", 1.0, "lambda > 0", _pos)), _k_r4p),
    CatalogEntry("kahler_d4.2", "d_{4,2}", "kahler", (_t(),), _k_d42),
    CatalogEntry("kahler_d4half", "d_{4,1/2}", "kahler", (_t(),), _k_d4half),
    CatalogEntry("kahler_d4p", "d'_{4,delta/2}", "kahler", (_t(), Param("delta", 2.0, "delta > 0", _pos)), _k_d4p),
    CatalogEntry("R_x_e2", "R x e(2)", "reducible", (_t(), _A1, _A2), _r_e2, 2),
    CatalogEntry("R2_x_aff", "R^2 x aff(R)", "reducible", (_t(), _A1, _A2), _r2_aff, 2),
    CatalogEntry("r4p_lambda_0", "r'_{4,lambda,0}", "reducible", (Param("lambda", 1.0, "lambda > 0", _pos), _t(), _A1, _A2), _r4p_red, 2),
    CatalogEntry(
        "aff_x_aff", "aff(R) x aff(R)", "reducible",
        (_t(), Param("s", 1.0, "0 < s <= 1", lambda v: 0 < v <= 1), _A1, _A2), _aff_aff_red, 2,
    ),
    CatalogEntry("d4half", "d_{4,1/2}", "irreducible", (_t(), Param("c", 1.0, "c > 0", _pos)), _d4half, 1),
    CatalogEntry("d4.2", "d_{4,2}", "irreducible", (_t(), Param("c", 1.0, "c > 0", _pos)), _d42, 1),
    CatalogEntry(
        "d4p", "d'_{4,lambda}", "irreducible",
        (Param("lambda", 1.0, "lambda > 0", _pos), _t(), Param("c", 1.0, "c != 0", lambda v: v != 0)), _d4p, 1,
    ),
]

_REGISTRY = {e.name: e for e in _ENTRIES}


def catalog_list() -> list[CatalogEntry]:
    return list(_ENTRIES)


def get_entry(name: str) -> CatalogEntry:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownEntry(f"unknown catalog entry {name!r}; try 'catalog list'") from None


def resolve_params(entry: CatalogEntry, params: dict | None) -> dict:
    vals = entry.defaults()
    known = set(vals)
    for k, v in (params or {}).items():
        if k not in known:
            raise ParamOutOfRange(f"{entry.name} has no parameter {k!r} (parameters: {sorted(known) or 'none'})")
        try:
            vals[k] = float(v)
        except (TypeError, ValueError):
            raise ParamOutOfRange(f"{entry.name}: parameter {k} must be a number, got {v!r}") from None
    for p in entry.params:
        v = vals[p.name]
        if not np.isfinite(v) or not p.check(v):
            raise ParamOutOfRange(f"{entry.name}: {p.name}={v:g} violates {p.constraint}")
        if p.integer:
            vals[p.name] = int(v)
    return vals


def catalog_build(name: str, params: dict | None = None, **kw) -> CatalogBuild:
    """Instantiate a catalog entry. Tensors and generators are matrices in
    the input basis of the returned metric Lie algebra."""
    entry = get_entry(name)
    vals = resolve_params(entry, {**(params or {}), **kw})
    mla, tensors, gens, key = entry.builder(vals)
    return CatalogBuild(entry.name, vals, mla, tensors, gens, key, entry.expected_parallel_dim)


@dataclass(frozen=True, eq=False)
class VerificationReport:
    name: str
    params: dict
    jacobi_ok: bool
    tensor_residuals: dict
    complex_residuals: dict
    generator_residuals: dict
    parallel_dim: int
    expected_parallel_dim: int | None

    @property
    def tensors_parallel(self) -> bool:
        return all(r <= 1e-9 for r in self.tensor_residuals.values())

    @property
    def dim_ok(self) -> bool:
        return self.expected_parallel_dim is None or self.parallel_dim == self.expected_parallel_dim

    @property
    def ok(self) -> bool:
        return (
            self.jacobi_ok
            and self.tensors_parallel
            and self.dim_ok
            and all(r <= 1e-9 for r in self.complex_residuals.values())
            and all(r <= 1e-9 for r in self.generator_residuals.values())
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "params": self.params,
            "jacobi_ok": self.jacobi_ok,
            "tensor_residuals": self.tensor_residuals,
            "complex_structure_residuals": self.complex_residuals,
            "generator_residuals": self.generator_residuals,
            "parallel_dim": self.parallel_dim,
            "expected_parallel_dim": self.expected_parallel_dim,
            "ok": self.ok,
        }


def verify_table_entry(name: str, params: dict | None = None, tol: Tolerance | None = None) -> VerificationReport:
    """Check the designated tensors of an entry: parallel (commutator
    residual with every covariant derivative), ``J^2 = -I`` for Kahler
    structures, printed generators inside the parallel space, and the
    parallel-space dimension against the expected one."""
    tol = as_tol(tol)
    b = catalog_build(name, params)
    try:
        validate_lie_algebra(b.mla.algebra, tol)
        jac = True
    except AlgebraError:
        jac = False
    conn = levi_civita(b.mla, tol)
    par = parallel_space(conn, tol)
    res = {}
    cres = {}
    for k, T in b.tensors.items():
        To = conn.frame.operator_to_frame(T)
        res[k] = commutation_residual(conn, To) / max(1.0, la.max_abs(To))
        if get_entry(name).group == "kahler":
            cres[k] = la.max_abs(To @ To + np.eye(b.mla.dim))
    gres = {f"generator{i}": par.residual(conn.frame.operator_to_frame(g)) for i, g in enumerate(b.generators)}
    return VerificationReport(b.name, b.params, jac, res, cres, gres, par.dim, b.expected_parallel_dim)
