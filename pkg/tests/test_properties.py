import numpy as np
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from conftest import ALL_ENTRIES, build, koszul_input_basis
from metriclie import _linalg as la
from metriclie.algebra import Frame, MetricLieAlgebra, Subspace, center, change_basis, derived_subalgebra, jacobi_residual
from metriclie.connection import brackets_from_forms, jacobi_relations, levi_civita, matrix_relations_residual
from metriclie.curvature import curvature, ricci
from metriclie.holonomy import matrix_to_two_form, two_form_to_matrix
from metriclie.parallel import parallel_space

FAST = settings(max_examples=40, deadline=None)
entries = st.sampled_from([n for n in ALL_ENTRIES if n not in ("abelian", "aff", "h3")])
seeds = st.integers(0, 2**32 - 1)
finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


def spd(seed, n, cond=20.0):
    rng = np.random.default_rng(seed)
    Q = np.linalg.qr(rng.standard_normal((n, n)))[0]
    return Q @ np.diag(np.exp(rng.uniform(0, np.log(cond), n))) @ Q.T


@FAST
@given(entries, seeds)
def test_random_metric_connection(name, seed):
    alg = build(name).mla.algebra
    G = spd(seed, alg.dim)
    conn = levi_civita(MetricLieAlgebra(alg, G))
    assert conn.skew_residual() < 1e-9
    assert conn.torsion_residual() < 1e-9
    assert np.abs(conn.in_input_frame() - koszul_input_basis(alg.structure, G)).max() < 1e-8


@FAST
@given(entries, seeds)
def test_random_metric_curvature_symmetries(name, seed):
    alg = build(name).mla.algebra
    curv = curvature(levi_civita(MetricLieAlgebra(alg, spd(seed, alg.dim))))
    scale = max(1.0, np.abs(curv.operators).max())
    assert curv.bianchi_residual() < 1e-9 * scale
    assert curv.pair_symmetry_residual() < 1e-9 * scale
    assert curv.skew_residual() < 1e-9 * scale
    assert ricci(curv).symmetry_residual() < 1e-9 * scale


@FAST
@given(entries, seeds)
def test_isometric_copies_have_same_ricci_spectrum_and_parallel_dim(name, seed):
    mla = build(name).mla
    n = mla.dim
    P = np.random.default_rng(seed).standard_normal((n, n)) + 3 * np.eye(n)
    # pulling back the metric along P gives an isometric copy
    moved = MetricLieAlgebra(change_basis(mla.algebra, Frame(P)), P.T @ mla.gram @ P)
    c0, c1 = levi_civita(mla), levi_civita(moved)
    e0 = ricci(curvature(c0)).eigenvalues()
    e1 = ricci(curvature(c1)).eigenvalues()
    assert np.allclose(e0, e1, atol=1e-8)
    assert parallel_space(c0).dim == parallel_space(c1).dim


@FAST
@given(entries, seeds)
def test_structural_subspaces_transform_covariantly(name, seed):
    alg = build(name).mla.algebra
    n = alg.dim
    P = np.random.default_rng(seed).standard_normal((n, n)) + 3 * np.eye(n)
    moved = change_basis(alg, Frame(P))
    for fn in (derived_subalgebra, center):
        assert Subspace.span(P @ fn(moved).basis, n).equals(fn(alg))


@FAST
@given(arrays(np.float64, 10, elements=finite))
def test_two_form_round_trip(v):
    M = la.vec_to_skew(v, 5)
    assert np.array_equal(two_form_to_matrix(matrix_to_two_form(M)), M)
    assert np.array_equal(la.skew_to_vec(M), v + 0.0)


@FAST
@given(arrays(np.float64, 4, elements=finite), arrays(np.float64, 4, elements=finite))
def test_relations_match_matrix_form(a, b):
    r = jacobi_relations(a, b)
    worst = max(abs(x) for x in r.values())
    assert abs(matrix_relations_residual(a, b) - worst) <= 1e-9 * max(1.0, worst)


@FAST
@given(arrays(np.float64, 4, elements=finite), arrays(np.float64, 4, elements=finite))
def test_relations_vanish_iff_jacobi(a, b):
    alg = brackets_from_forms(a, b)
    worst = max(abs(x) for x in jacobi_relations(a, b).values())
    jr = jacobi_residual(alg)
    # every Jacobi coefficient is one of the relations up to sign
    assert abs(jr - worst) <= 1e-9 * max(1.0, worst)


@FAST
@given(st.floats(0.05, 5), st.floats(0.05, 5), seeds)
def test_commutant_of_rotation_pair(s, t, seed):
    if abs(s - t) < 1e-3:
        return
    B = la.rot(4, 0, 1, s) + la.rot(4, 2, 3, t)
    Q = np.linalg.qr(np.random.default_rng(seed).standard_normal((4, 4)))[0]
    C = la.skew_commutant([Q @ B @ Q.T], 4)
    assert C.shape[1] == 2
    for col in C.T:
        A = Q.T @ la.vec_to_skew(col, 4) @ Q
        assert np.abs(A[:2, 2:]).max() < 1e-9
