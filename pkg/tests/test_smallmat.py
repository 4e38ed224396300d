"""Tests for the 2x2/3x3 matrix core: validation, exponentials, spectra."""

import numpy as np
import pytest
import scipy.linalg

import oracle_refs

from zmaplab import (
    ConvergenceFailure,
    DimensionMismatch,
    EigenSystem,
    NonHermitianInput,
    UnitaryOperator,
    herm_exp,
    random_unitary,
    unitary_eigensystem,
    unitarity_defect,
)
from zmaplab.smallmat import as_square, matrix_of


SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


def circ_dist(a, b):
    """Distance between two phases on the circle."""
    d = np.abs(np.asarray(a) - np.asarray(b)) % (2.0 * np.pi)
    return np.minimum(d, 2.0 * np.pi - d)


# ---------------------------------------------------------------- as_square


def test_as_square_accepts_2x2_and_3x3():
    assert as_square(np.eye(2)).shape == (2, 2)
    assert as_square(np.eye(3)).shape == (3, 3)


@pytest.mark.parametrize(
    "bad",
    [np.eye(4), np.ones(3), np.ones((2, 3)), np.zeros((2, 2, 2))],
)
def test_as_square_rejects_wrong_shapes(bad):
    with pytest.raises(DimensionMismatch):
        as_square(bad)


def test_as_square_rejects_non_finite():
    m = np.eye(2, dtype=complex)
    m[0, 1] = np.nan
    with pytest.raises(DimensionMismatch):
        as_square(m)


# ---------------------------------------------------------- unitarity_defect


def test_defect_of_identity_is_zero():
    assert unitarity_defect(np.eye(2)) == 0.0
    assert unitarity_defect(np.eye(3)) == 0.0


def test_defect_of_diag_2_0():
    # M^H M - I = diag(3, -1), Frobenius norm sqrt(10)
    assert unitarity_defect(np.diag([2.0, 0.0])) == pytest.approx(
        np.sqrt(10.0), rel=1e-15
    )


def test_defect_of_random_unitaries_is_tiny():
    rng = np.random.default_rng(7)
    for dim in (2, 3):
        for _ in range(50):
            u = random_unitary(dim, rng)
            assert unitarity_defect(u) <= 1e-14


# ------------------------------------------------------------ UnitaryOperator


def test_unitary_operator_accepts_unitary_and_freezes_matrix():
    op = UnitaryOperator(np.eye(2, dtype=complex))
    assert op.dim == 2
    assert op.defect <= 1e-15
    with pytest.raises(ValueError):
        op.matrix[0, 0] = 5.0


def test_unitary_operator_copies_input():
    m = np.eye(2, dtype=complex)
    op = UnitaryOperator(m)
    m[0, 0] = 7.0
    assert op.matrix[0, 0] == 1.0


def test_unitary_operator_rejects_non_unitary():
    with pytest.raises(DimensionMismatch):
        UnitaryOperator(np.diag([2.0, 0.0]).astype(complex))


def test_unitary_operator_rejects_dim_4():
    with pytest.raises(DimensionMismatch):
        UnitaryOperator(np.eye(4, dtype=complex))


def test_matrix_of_unwraps_operator():
    op = UnitaryOperator(np.eye(3, dtype=complex))
    assert matrix_of(op) is op.matrix
    raw = np.eye(2, dtype=complex)
    assert matrix_of(raw).shape == (2, 2)


# ------------------------------------------------------------------ herm_exp


def test_herm_exp_zero_gives_identity():
    assert np.array_equal(herm_exp(np.zeros((2, 2)), 1.3).matrix, np.eye(2))
    assert np.array_equal(herm_exp(np.zeros((3, 3)), 0.2).matrix, np.eye(3))


def test_herm_exp_sigma_x_quarter_turn():
    got = herm_exp(SX, np.pi / 2).matrix
    want = np.array([[0.0, -1j], [-1j, 0.0]])
    assert np.allclose(got, want, atol=1e-15)


def test_herm_exp_diagonal():
    got = herm_exp(np.diag([1.0, -1.0]), 0.25).matrix
    want = np.diag([np.exp(-0.25j), np.exp(0.25j)])
    assert np.allclose(got, want, atol=1e-15)


def test_herm_exp_rejects_non_hermitian():
    with pytest.raises(NonHermitianInput):
        herm_exp(np.array([[0.0, 1.0], [0.0, 0.0]]), 1.0)
    with pytest.raises(NonHermitianInput):
        herm_exp(np.array([[1j, 0.0], [0.0, 0.0]]), 1.0)


def test_herm_exp_matches_scipy_expm():
    # independent route: dense matrix exponential
    rng = np.random.default_rng(11)
    for dim in (2, 3):
        for _ in range(25):
            g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
            h = 0.5 * (g + g.conj().T)
            s = rng.uniform(-2.0, 2.0)
            want = scipy.linalg.expm(-1j * s * h)
            got = herm_exp(h, s).matrix
            assert np.max(np.abs(got - want)) <= 1e-12


def test_herm_exp_composes_in_scale():
    rng = np.random.default_rng(5)
    for dim in (2, 3):
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        h = 0.5 * (g + g.conj().T)
        for a, b in [(0.3, 0.4), (-1.1, 0.25), (2.0, -2.0)]:
            lhs = herm_exp(h, a).matrix @ herm_exp(h, b).matrix
            rhs = herm_exp(h, a + b).matrix
            assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_herm_exp_output_is_unitary_operator():
    out = herm_exp(SX, 0.7)
    assert isinstance(out, UnitaryOperator)
    assert out.defect <= 1e-14


# -------------------------------------------------------- unitary_eigensystem


def test_eigensystem_distinct_phases():
    u = np.diag([np.exp(1j * np.pi / 3), np.exp(-1j * np.pi / 3)])
    es = unitary_eigensystem(u)
    assert isinstance(es, EigenSystem)
    assert np.allclose(es.phases, [-np.pi / 3, np.pi / 3], atol=1e-12)
    assert es.multiplicities == (1, 1)
    assert np.allclose(es.projectors[0], np.diag([0.0, 1.0]), atol=1e-12)
    assert np.allclose(es.projectors[1], np.diag([1.0, 0.0]), atol=1e-12)


def test_eigensystem_identity_merges_to_one_cluster():
    es = unitary_eigensystem(np.eye(3, dtype=complex))
    assert es.multiplicities == (3,)
    assert es.phases[0] == pytest.approx(0.0, abs=1e-15)
    assert np.allclose(es.projectors[0], np.eye(3), atol=1e-12)


def test_eigensystem_merges_near_degenerate_pair():
    delta = 2e-10
    u = np.diag([np.exp(1j * (0.5 - delta)), np.exp(1j * (0.5 + delta)), 1.0])
    es = unitary_eigensystem(u, merge_tol=1e-9)
    assert es.multiplicities == (1, 2)
    assert circ_dist(es.phases[1], 0.5) <= 1e-9


def test_eigensystem_merges_across_pi_seam():
    eps = 4e-10
    u = np.diag([np.exp(1j * (np.pi - eps)), np.exp(1j * (-np.pi + eps))])
    es = unitary_eigensystem(u, merge_tol=1e-9)
    assert es.multiplicities == (2,)
    assert circ_dist(es.phases[0], np.pi) <= 1e-9
    # contract range is (-pi, pi]
    assert -np.pi < es.phases[0] <= np.pi


def test_eigensystem_phase_range_and_separation():
    rng = np.random.default_rng(23)
    for dim in (2, 3):
        for _ in range(200):
            es = unitary_eigensystem(random_unitary(dim, rng))
            assert np.all(es.phases > -np.pi)
            assert np.all(es.phases <= np.pi)
            for i in range(len(es.phases)):
                for j in range(i + 1, len(es.phases)):
                    assert circ_dist(es.phases[i], es.phases[j]) > 1e-9


def test_eigensystem_projector_algebra_and_reconstruction():
    rng = np.random.default_rng(12345)
    for dim in (2, 3):
        for _ in range(500):
            u = random_unitary(dim, rng)
            es = unitary_eigensystem(u)
            assert sum(es.multiplicities) == dim
            total = np.zeros((dim, dim), dtype=complex)
            recon = np.zeros((dim, dim), dtype=complex)
            for ph, p, m in zip(es.phases, es.projectors, es.multiplicities):
                assert np.max(np.abs(p - p.conj().T)) <= 1e-9
                assert np.max(np.abs(p @ p - p)) <= 1e-9
                assert np.trace(p).real == pytest.approx(m, abs=1e-9)
                total += p
                recon += np.exp(1j * ph) * p
            assert np.max(np.abs(total - np.eye(dim))) <= 1e-9
            assert np.linalg.norm(recon - u) <= 1e-9
            for i in range(len(es.projectors)):
                for j in range(i + 1, len(es.projectors)):
                    assert np.max(np.abs(es.projectors[i] @ es.projectors[j])) <= 1e-9


def test_eigensystem_agrees_with_reference_average():
    # dual route: spectral populations vs the reference implementation
    rng = np.random.default_rng(99)
    for dim in (2, 3):
        for _ in range(50):
            u = random_unitary(dim, rng)
            es = unitary_eigensystem(u)
            v = np.zeros(dim, dtype=complex)
            v[0] = 1.0
            mine = np.zeros(dim)
            for p in es.projectors:
                w = p @ v
                mine += (w.real**2 + w.imag**2)
            ref = oracle_refs.spectral_average(u, 0)
            assert np.max(np.abs(mine - ref)) <= 1e-9


def test_eigensystem_rejects_far_from_unitary():
    with pytest.raises(ConvergenceFailure):
        unitary_eigensystem(np.array([[2.0, 0.0], [0.0, 0.5]], dtype=complex))
    with pytest.raises(ConvergenceFailure):
        unitary_eigensystem(np.array([[2.0, 0.0], [0.0, 0.0]], dtype=complex))


def test_eigensystem_rejects_bad_merge_tol():
    with pytest.raises(ValueError):
        unitary_eigensystem(np.eye(2, dtype=complex), merge_tol=0.0)


# -------------------------------------------------------------- random_unitary


def test_random_unitary_is_unitary_and_seeded():
    a = random_unitary(3, np.random.default_rng(42))
    b = random_unitary(3, np.random.default_rng(42))
    assert np.array_equal(a, b)
    assert unitarity_defect(a) <= 1e-14
    with pytest.raises(DimensionMismatch):
        random_unitary(4, np.random.default_rng(0))
