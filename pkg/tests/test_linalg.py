import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qpca import linalg
from qpca.errors import NotDensityMatrix, NotHermitian, NotUnitary, PhaseWrapRisk

from conftest import random_hermitian


def test_eigh_half_identity():
    spec = linalg.eigh(np.eye(2) / 2)
    assert np.allclose(spec.eigenvalues, [0.5, 0.5])


def test_eigh_diagonal():
    spec = linalg.eigh(np.diag([0.3, 0.7]))
    assert np.allclose(spec.eigenvalues, [0.7, 0.3])
    assert np.allclose(spec.vector(0), [0, 1])
    assert np.allclose(spec.vector(1), [1, 0])


def test_eigh_residuals_orthonormality_and_reconstruction(rng):
    a = random_hermitian(rng, 8)
    spec = linalg.eigh(a)
    for i in range(8):
        assert np.linalg.norm(a @ spec.vector(i) - spec.eigenvalues[i] * spec.vector(i)) <= 1e-8
    v = spec.eigenvectors
    assert np.max(np.abs(v.conj().T @ v - np.eye(8))) <= 1e-9
    assert np.linalg.norm(a - spec.reconstruct()) <= 1e-8 * np.linalg.norm(a)
    assert np.all(np.diff(np.abs(spec.eigenvalues)) <= 1e-12)


def test_eigh_phase_convention(rng):
    spec = linalg.eigh(random_hermitian(rng, 6))
    for i in range(6):
        v = spec.vector(i)
        k = int(np.argmax(np.abs(v)))
        assert abs(v[k].imag) <= 1e-12 and v[k].real > 0


def test_eigh_is_deterministic(rng):
    a = random_hermitian(rng, 8)
    s1, s2 = linalg.eigh(a), linalg.eigh(a)
    assert np.array_equal(s1.eigenvalues, s2.eigenvalues)
    assert np.array_equal(s1.eigenvectors, s2.eigenvectors)


def test_eigh_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        linalg.eigh(np.array([[0, 1], [0, 0]]))


def test_gap_is_magnitude_difference():
    spec = linalg.eigh(np.diag([0.6, -0.5, 0.1]))
    assert spec.gap == pytest.approx(0.1)
    assert linalg.eigh(np.ones((1, 1))).gap == math.inf


def test_matrix_function_identity(rng):
    a = random_hermitian(rng, 5)
    assert np.linalg.norm(linalg.matrix_function(a, lambda x: x) - a) <= 1e-10


def test_matrix_function_diagonal_exponential():
    out = linalg.matrix_function(np.diag([math.pi, 0.0]), lambda x: np.exp(-1j * x / 2))
    assert np.allclose(out, np.diag([np.exp(-1j * math.pi / 2), 1.0]), atol=1e-12)


def test_matrix_function_square(rng):
    a = random_hermitian(rng, 6)
    assert np.linalg.norm(linalg.matrix_function(a, lambda x: x**2) - a @ a) <= 1e-9


def test_principal_log_identity():
    assert np.allclose(linalg.principal_log_unitary(np.eye(3)), 0, atol=1e-12)


def test_principal_log_round_trip_diagonal():
    u = linalg.expm_hermitian(np.diag([0.3, 0.1]))
    assert np.allclose(linalg.principal_log_unitary(u), np.diag([0.3, 0.1]), atol=1e-9)


def test_principal_log_refuses_near_branch_cut():
    u = np.diag(np.exp(-1j * np.array([3.10, 0.2])))
    with pytest.raises(PhaseWrapRisk):
        linalg.principal_log_unitary(u)


def test_principal_log_rejects_non_unitary():
    with pytest.raises(NotUnitary):
        linalg.principal_log_unitary(np.diag([1.0, 0.5]))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_log_exp_round_trip(n, seed):
    rng = np.random.default_rng(seed)
    h = random_hermitian(rng, n, norm=0.5)
    u = linalg.matrix_function(h, lambda x: np.exp(-1j * x))
    assert np.linalg.norm(linalg.principal_log_unitary(u) - h) <= 1e-8


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.floats(-50, 50), st.integers(0, 2**32 - 1))
def test_exponential_is_unitary(n, t, seed):
    h = random_hermitian(np.random.default_rng(seed), n)
    u = linalg.expm_hermitian(h, t)
    assert linalg.unitary_defect(u) <= 1e-9


@pytest.mark.parametrize(
    "rho",
    [
        np.diag([0.5, 0.6]),
        np.array([[0.5, 0.1], [0.0, 0.5]]),
        np.diag([1.1, -0.1]),
        np.eye(3) / 3,
    ],
)
def test_as_density_rejects(rho):
    with pytest.raises(NotDensityMatrix):
        linalg.as_density(rho)


def test_unitary_dilation_contains_block(rng):
    b = random_hermitian(rng, 4, norm=0.9)
    u = linalg.unitary_dilation(b)
    assert linalg.unitary_defect(u) <= 1e-10
    assert np.allclose(u[:4, :4], b)


@pytest.mark.parametrize("n", [1, 2, 5, 8])
def test_householder_first_column(rng, n):
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x /= np.linalg.norm(x)
    u = linalg.householder_unitary(x)
    assert np.linalg.norm(u[:, 0] - x) <= 1e-12
    assert linalg.unitary_defect(u) <= 1e-10


def test_phase_distance_ignores_global_phase(rng):
    x = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    assert linalg.phase_distance(np.exp(0.7j) * x, x) <= 1e-12
