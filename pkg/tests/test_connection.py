import numpy as np
import pytest

from conftest import ALL_ENTRIES, ENTRIES_WITH_T, build, koszul_input_basis
from metriclie import _linalg as la
from metriclie.algebra import AlgebraError, Frame, LieAlgebra, MetricLieAlgebra, validate_lie_algebra
from metriclie.catalog import J0_D42
from metriclie.connection import (
    JacobiRelationsViolated,
    NotBlockForm,
    brackets_from_forms,
    build_from_connection_forms,
    connection_form_decomposition,
    jacobi_relations,
    koszul_gamma,
    levi_civita,
    matrix_relations_residual,
    relation_matrices,
)

H = 0.5
D42_GAMMA = np.array(
    [
        np.zeros((4, 4)),
        [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -H], [0, 0, H, 0]],
        [[0, 0, H, 0], [0, 0, 0, H], [-H, 0, 0, 0], [0, -H, 0, 0]],
        [[0, 0, 0, -H], [0, 0, H, 0], [0, -H, 0, 0], [H, 0, 0, 0]],
    ]
)


def test_d42_connection_matrices():
    conn = levi_civita(build("d4.2").mla)
    assert np.abs(conn.gamma - D42_GAMMA).max() < 1e-12


def test_aff_connection_by_hand():
    # [e, f] = f, orthonormal: nabla_e = 0, nabla_f e = -f, nabla_f f = e
    mla = MetricLieAlgebra(LieAlgebra.from_brackets(2, [(0, 1, 1, 1.0)]), np.eye(2))
    g = levi_civita(mla).gamma
    assert np.array_equal(g[0], np.zeros((2, 2)))
    assert np.array_equal(g[1], [[0.0, 1.0], [-1.0, 0.0]])


def test_koszul_gamma_zero_for_abelian():
    assert not koszul_gamma(np.zeros((3, 3, 3))).any()


@pytest.mark.parametrize("name", ALL_ENTRIES)
def test_connection_matches_loop_oracle(name):
    b = build(name, t=2.5) if name in ENTRIES_WITH_T else build(name)
    conn = levi_civita(b.mla)
    oracle = koszul_input_basis(b.mla.algebra.structure, b.mla.gram)
    assert np.abs(conn.in_input_frame() - oracle).max() < 1e-10


def test_general_metric_matches_loop_oracle():
    rng = np.random.default_rng(11)
    A = rng.standard_normal((4, 4))
    G = A @ A.T + np.eye(4)
    alg = build("d4p").mla.algebra
    conn = levi_civita(MetricLieAlgebra(alg, G))
    assert conn.skew_residual() < 1e-12
    assert conn.torsion_residual() < 1e-12
    assert np.abs(conn.in_input_frame() - koszul_input_basis(alg.structure, G)).max() < 1e-10


@pytest.mark.parametrize("name", ["d4.2", "aff_x_aff", "kahler_d4p", "R_x_e2"])
@pytest.mark.parametrize("t", [0.25, 4.0, 9.0])
def test_homothety_scales_connection(name, t):
    mla = build(name).mla
    g1 = levi_civita(mla).gamma
    gt = levi_civita(mla.scaled(t)).gamma
    assert np.abs(gt - g1 / np.sqrt(t)).max() < 1e-12


def test_reframe_keeps_connection_properties():
    conn = levi_civita(build("d4half").mla)
    Q = np.linalg.qr(np.random.default_rng(2).standard_normal((4, 4)))[0]
    moved = conn.reframe(Q)
    assert moved.skew_residual() < 1e-12
    assert moved.torsion_residual() < 1e-12
    assert np.abs(moved.in_input_frame() - conn.in_input_frame()).max() < 1e-12
    with pytest.raises(AlgebraError):
        conn.reframe(2 * np.eye(4))


# -- rotation-form reconstruction


def test_equal_angles_are_refused():
    conn = levi_civita(build("d4.2").mla)
    # J0 rotates both planes by the same angle, so the planes are not determined
    with pytest.raises(NotBlockForm):
        connection_form_decomposition(conn, J0_D42)


def test_reducible_decomposition_round_trip():
    b = build("R2_x_aff", a1=1, a2=2)
    conn = levi_civita(b.mla)
    alpha, beta = connection_form_decomposition(conn, b.tensors["H"])
    assert np.allclose(alpha, 0.0)
    assert np.allclose(beta, [0, 0, 0, -1.0])
    rebuilt = build_from_connection_forms(alpha, beta)
    assert np.abs(rebuilt.algebra.structure - b.mla.algebra.structure).max() < 1e-12


def test_decomposition_rejects_wrong_shapes():
    conn = levi_civita(build("h3").mla)
    with pytest.raises(NotBlockForm):
        connection_form_decomposition(conn, np.zeros((3, 3)))
    conn = levi_civita(build("aff_x_aff").mla)
    with pytest.raises(NotBlockForm):
        connection_form_decomposition(conn, la.rot(4, 0, 2))


def test_decomposition_in_rotated_frame():
    b = build("aff_x_aff", t=1, s=0.5, a1=3, a2=1)
    conn = levi_civita(b.mla)
    # swap the planes: (e2, f2, e1, f1)
    Q = np.eye(4)[:, [2, 3, 0, 1]]
    alpha, beta = connection_form_decomposition(conn, b.tensors["H"], frame=Q)
    a0, b0 = connection_form_decomposition(conn, b.tensors["H"])
    assert np.allclose(alpha, b0[[2, 3, 0, 1]])
    assert np.allclose(beta, a0[[2, 3, 0, 1]])


def test_brackets_from_forms_is_torsion_free():
    rng = np.random.default_rng(4)
    for _ in range(20):
        a, b = rng.standard_normal(4), rng.standard_normal(4)
        alg = brackets_from_forms(a, b)
        g = np.array([a[i] * la.rot(4, 0, 1) + b[i] * la.rot(4, 2, 3) for i in range(4)])
        # nabla_i e_j - nabla_j e_i = [e_i, e_j]
        for i in range(4):
            for j in range(4):
                assert np.allclose(g[i][:, j] - g[j][:, i], alg.bracket(np.eye(4)[i], np.eye(4)[j]))


def test_relation_matrices_encode_relations():
    rng = np.random.default_rng(5)
    for _ in range(20):
        a, b = rng.standard_normal(4), rng.standard_normal(4)
        r = jacobi_relations(a, b)
        m = relation_matrices(a, b)
        assert np.linalg.det(m["U"]) == pytest.approx(r["R1"], abs=1e-12)
        assert np.linalg.det(m["V"]) == pytest.approx(r["R6"], abs=1e-12)
        ab = sorted(abs(x) for x in m["AB"].ravel())
        cd = sorted(abs(x) for x in m["CD"].ravel())
        assert np.allclose(ab, sorted(abs(r[k]) for k in ("R2", "R3", "R4", "R5")))
        assert np.allclose(cd, sorted(abs(r[k]) for k in ("R7", "R8", "R9", "R10")))


def test_build_rejects_violations_with_labels():
    with pytest.raises(JacobiRelationsViolated) as exc:
        build_from_connection_forms([1, 1, 0, 0], [1, 1, 0, 0])
    assert "R1" in exc.value.labels
    with pytest.raises(AlgebraError):
        build_from_connection_forms(np.zeros(4), np.zeros(4))


def test_build_accepts_flat_example():
    # alpha = 0, beta = e1*: nabla_{e1} rotates (e2, f2), the R x e(2) shape
    mla = build_from_connection_forms([0, 0, 0, 0], [1, 0, 0, 0])
    validate_lie_algebra(mla.algebra)
    assert matrix_relations_residual([0, 0, 0, 0], [1, 0, 0, 0]) == 0.0


def test_commutant_of_two_rotations_has_block_form():
    B = la.rot(4, 0, 1, 0.7) + la.rot(4, 2, 3, -1.9)
    C = la.skew_commutant([B], 4)
    assert C.shape[1] == 2
    for col in C.T:
        A = la.vec_to_skew(col, 4)
        assert np.abs(A[:2, 2:]).max() < 1e-12 and np.abs(A[2:, :2]).max() < 1e-12


def test_frame_argument_accepts_frame_object():
    b = build("R2_x_aff", a1=1, a2=2)
    conn = levi_civita(b.mla)
    a1, b1 = connection_form_decomposition(conn, b.tensors["H"], frame=Frame.identity(4))
    a2, b2 = connection_form_decomposition(conn, b.tensors["H"])
    assert np.array_equal(a1, a2) and np.array_equal(b1, b2)
