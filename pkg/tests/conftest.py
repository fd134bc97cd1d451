"""Independent reference computations used as test oracles.

These use explicit loops in the input basis (with a general metric), so
they share no code path with the vectorised orthonormal-frame routines.
"""
import itertools

import numpy as np
import pytest

from metriclie.catalog import catalog_build, catalog_list


def bracket_loop(c, x, y):
    n = len(x)
    out = np.zeros(n)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                out[k] += x[i] * y[j] * c[i][j][k]
    return out


def jacobi_loop(c):
    """Largest coefficient of the cyclic Jacobi sum over basis triples."""
    n = len(c)
    E = np.eye(n)
    worst = 0.0
    for i, j, k in itertools.product(range(n), repeat=3):
        s = (
            bracket_loop(c, bracket_loop(c, E[i], E[j]), E[k])
            + bracket_loop(c, bracket_loop(c, E[j], E[k]), E[i])
            + bracket_loop(c, bracket_loop(c, E[k], E[i]), E[j])
        )
        worst = max(worst, float(np.abs(s).max()))
    return worst


def koszul_input_basis(c, G):
    """nabla[i][:, j] = coordinates of nabla_{e_i} e_j, from
    2<nabla_x y, z> = <[x,y],z> - <[y,z],x> + <[z,x],y> with a general Gram matrix."""
    n = len(G)
    E = np.eye(n)
    G = np.asarray(G, dtype=float)

    def ip(u, v):
        return float(u @ G @ v)

    nab = np.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            rhs = np.array(
                [
                    0.5
                    * (
                        ip(bracket_loop(c, E[i], E[j]), E[k])
                        - ip(bracket_loop(c, E[j], E[k]), E[i])
                        + ip(bracket_loop(c, E[k], E[i]), E[j])
                    )
                    for k in range(n)
                ]
            )
            nab[i][:, j] = np.linalg.solve(G, rhs)
    return nab


def curvature_input_basis(c, G):
    """R[i][j] = matrix of R(e_i, e_j) in the input basis, by loops."""
    nab = koszul_input_basis(c, G)
    n = len(G)
    R = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(n):
            br = bracket_loop(c, np.eye(n)[i], np.eye(n)[j])
            nb = sum(br[k] * nab[k] for k in range(n))
            R[i, j] = nab[i] @ nab[j] - nab[j] @ nab[i] - nb
    return R


def ricci_input_basis(c, G):
    """Ricci operator in the input basis: Ric(y) = sum over a G-orthonormal
    basis u_a of R(u_a, y) u_a ... traced as Ric(y, z) = tr(x -> R(x, y) z)."""
    R = curvature_input_basis(c, G)
    n = len(G)
    # ric(y, z) = trace of x -> R(x, y) z, a bilinear form
    ric = np.zeros((n, n))
    for y in range(n):
        for z in range(n):
            ric[y, z] = sum(R[x, y][x, z] for x in range(n))
    # as an operator through the metric: Ric_op = G^{-1} ric (ric symmetric)
    return np.linalg.solve(np.asarray(G, float), ric)


ALL_ENTRIES = [e.name for e in catalog_list()]
ENTRIES_WITH_T = [e.name for e in catalog_list() if any(p.name == "t" for p in e.params)]


@pytest.fixture(params=ALL_ENTRIES)
def entry_name(request):
    return request.param


def build(name, **params):
    return catalog_build(name, params)
