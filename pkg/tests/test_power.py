import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qpca import blockenc, linalg, power, qsvt, synthetic
from qpca.blockenc import extract_block
from qpca.errors import GapTooSmall, InvalidEigenvalue, NotUnitNorm, ZeroMatrixPower, ZeroVector

SPECTRUM = [0.5, 0.3, 0.15, 0.05]


def exact_density_encoding(rho):
    """Exact alpha = 1 encoding of pi rho / 4 by purification."""
    spec = linalg.eigh(rho)
    n = rho.shape[0]
    phi = np.zeros(n * n, dtype=complex)
    for i in range(n):
        phi += math.sqrt(max(spec.eigenvalues[i], 0.0)) * np.kron(np.eye(n)[i], spec.vector(i))
    be = blockenc.purify_density(linalg.householder_unitary(phi), n, n)
    return blockenc.scale_down(be, 4 / math.pi)


def test_classical_diagonal():
    est = power.classical_power_method(np.diag([0.7, 0.3]), np.ones(2) / math.sqrt(2), 40)
    assert abs(est.value - 0.7) <= 1e-6


def test_classical_identity_is_immediate():
    est = power.classical_power_method(np.eye(3), np.array([1, 2, 3.0]), 1)
    assert est.value == pytest.approx(1.0)


def test_classical_eigenvector_start():
    est = power.classical_power_method(np.diag([1.0, 0.0]), np.array([1.0, 0.0]), 1)
    assert est.value == 1.0 and np.allclose(est.vector, [1, 0])


def test_classical_errors():
    with pytest.raises(ZeroVector):
        power.classical_power_method(np.eye(2), np.zeros(2), 3)
    with pytest.raises(ZeroMatrixPower):
        power.classical_power_method(np.diag([0.0, 1.0]), np.array([1.0, 0.0]), 2)


def test_classical_iteration_count_from_gap(rng):
    rho = synthetic.density_from_spectrum(SPECTRUM, rng)
    gap, delta = 0.2, 1e-6
    k = math.ceil(1 / gap * math.log(1 / delta))
    est = power.classical_power_method(rho, power.haar_state(4, rng), k)
    assert abs(est.value - 0.5) <= delta


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_overlap_is_monotone(n, seed):
    rng = np.random.default_rng(seed)
    values = np.sort(rng.dirichlet(np.ones(n)))[::-1]
    values[0] += 0.05
    values /= values.sum()
    rho = synthetic.density_from_spectrum(values, rng)
    top = linalg.eigh(rho).vector(0)
    x0 = power.haar_state(n, rng)
    overlaps = [abs(np.vdot(top, power.classical_power_method(rho, x0, k).vector)) for k in range(1, 15)]
    assert all(b >= a - 1e-12 for a, b in zip(overlaps, overlaps[1:]))


def test_power_state_pure():
    be = qsvt.block_encode_density(np.diag([1.0, 0.0]), 1e-2)
    state, _ = power.quantum_power_state(be, 1, 1e-2)
    assert linalg.phase_distance(state, np.array([1.0, 0.0])) <= 1e-9


def test_power_state_converges(rng):
    rho = synthetic.density_from_spectrum(SPECTRUM, rng)
    eps, gap = 1e-2, 0.2
    k = math.ceil(1 / gap * math.log(1 / eps))
    state, ledger = power.quantum_power_state(qsvt.block_encode_density(rho, eps / k), k, eps)
    assert abs(np.vdot(linalg.eigh(rho).vector(0), state)) >= 1 - 1e-2
    assert ledger.unitary_calls >= k


def test_power_state_ledger_is_k_squared_over_eps_squared(rng):
    rho = synthetic.density_from_spectrum(SPECTRUM, rng)
    k, eps = 10, 1e-2
    _, ledger = power.quantum_power_state(qsvt.block_encode_density(rho, eps / k), k, eps)
    assert ledger.rho_copies == pytest.approx(k**2 / eps**2 / 4, rel=1e-3)


def test_eigenvalue_of_exact_eigenvector(rng):
    rho = synthetic.density_from_spectrum(SPECTRUM, rng)
    be = exact_density_encoding(rho)
    v = linalg.eigh(rho).vector(0)
    assert be.alpha * np.vdot(v, extract_block(be) @ v).real == pytest.approx(0.5 * math.pi / 4)
    assert power.estimate_top_eigenvalue(be, v, 1e-3) == pytest.approx(0.5)


def test_eigenvalue_diagonal():
    be = exact_density_encoding(np.diag([0.6, 0.4]).astype(complex))
    assert power.estimate_top_eigenvalue(be, np.array([1.0, 0.0]), 1e-3) == pytest.approx(0.6)


def test_sampled_eigenvalue_hits_99_percent(rng):
    rho = synthetic.density_from_spectrum(SPECTRUM, rng)
    be = exact_density_encoding(rho)
    v = linalg.eigh(rho).vector(0)
    hits = sum(abs(power.estimate_top_eigenvalue(be, v, 0.05, "sampled", seed=s) - 0.5) <= 0.05 for s in range(100))
    assert hits >= 99


def test_eigenvalue_rejects_bad_state():
    be = exact_density_encoding(np.diag([0.6, 0.4]).astype(complex))
    with pytest.raises(NotUnitNorm):
        power.estimate_top_eigenvalue(be, np.array([1.0, 1.0]), 1e-2)


def test_top_diagonal():
    est = power.qpca_top(power.DensitySource(np.diag([0.9, 0.1])), 1e-2)
    assert abs(est.value - 0.9) <= 1e-2
    assert linalg.phase_distance(est.vector, np.array([1.0, 0.0])) <= 1e-2
    assert est.residual >= 0


def test_top_degenerate_raises():
    with pytest.raises(GapTooSmall):
        power.qpca_top(power.DensitySource(np.eye(4) / 4), 1e-2)


def test_top_planted_sixteen(rng):
    rho = synthetic.density_from_spectrum(synthetic.planted_spectrum(16, 0.25, rng), rng)
    spec = linalg.eigh(rho)
    est = power.qpca_top(power.DensitySource(rho), 1e-2)
    assert abs(np.vdot(spec.vector(0), est.vector)) >= 0.99
    assert abs(est.value - spec.eigenvalues[0]) <= 1e-2


def test_top_sample_faithful_and_sampled_shots(rng):
    rho = synthetic.density_from_spectrum(SPECTRUM, rng)
    spec = linalg.eigh(rho)
    est = power.qpca_top(power.DensitySource(rho, mode="sample"), 5e-2, shots="sampled")
    assert abs(est.value - 0.5) <= 5e-2
    assert linalg.phase_distance(est.vector, spec.vector(0)) <= 5e-2


def test_top_copy_scaling(rng):
    rho = synthetic.density_from_spectrum([0.5, 0.25, 0.15, 0.1], rng)
    grid = np.array([1e-3, 1e-4, 1e-5, 1e-6])
    copies = [power.qpca_top(power.DensitySource(rho, log_mode="oracle"), e).ledger.rho_copies for e in grid]
    assert abs(np.polyfit(np.log(1 / grid), np.log(copies), 1)[0] - 2) <= 0.3


def test_top_is_deterministic(rng):
    rho = synthetic.density_from_spectrum(SPECTRUM, rng)
    a = power.qpca_top(power.DensitySource(rho), 1e-2)
    b = power.qpca_top(power.DensitySource(rho), 1e-2)
    assert np.array_equal(a.vector, b.vector) and a.ledger == b.ledger


def test_deflate_pure_state():
    rho = np.diag([1.0, 0.0]).astype(complex)
    eps = 1e-2
    out = power.deflate(qsvt.block_encode_density(rho, eps), 1.0, np.array([1.0, 0.0]), eps)
    assert np.linalg.norm(extract_block(out), 2) <= 2 * eps


def test_deflate_diagonal():
    rho = np.diag([0.7, 0.3]).astype(complex)
    eps = 1e-2
    out = power.deflate(qsvt.block_encode_density(rho, eps), 0.7, np.array([1.0, 0.0]), eps)
    assert np.linalg.norm(extract_block(out) - math.pi / 8 * np.diag([0.0, 0.3]), 2) <= eps


def test_deflated_top_eigenvalue_is_second(rng):
    rho = synthetic.density_from_spectrum(SPECTRUM, rng)
    spec = linalg.eigh(rho)
    out = power.deflate(exact_density_encoding(rho), 0.5, spec.vector(0), 1e-2)
    assert linalg.eigh(extract_block(out)).eigenvalues[0] == pytest.approx(math.pi / 8 * 0.3, abs=1e-9)


def test_deflation_exactness(rng):
    values = [0.4, 0.3, 0.2, 0.1, 0.0, 0.0, 0.0, 0.0]
    rho = synthetic.density_from_spectrum(values, rng)
    spec = linalg.eigh(rho)
    out = power.deflate(exact_density_encoding(rho), 0.4, spec.vector(0), 1e-2)
    got = np.sort(linalg.eigh(extract_block(out)).eigenvalues * 8 / math.pi)[::-1]
    assert np.allclose(got, [0.3, 0.2, 0.1, 0, 0, 0, 0, 0], atol=1e-8)


def test_deflate_sample_faithful_vector(rng):
    rho = synthetic.density_from_spectrum(SPECTRUM, rng)
    spec = linalg.eigh(rho)
    eps = 1e-2
    out = power.deflate(qsvt.block_encode_density(rho, eps), 0.5, spec.vector(0), eps, mode="sample", copy_cost=3)
    want = math.pi / 8 * (rho - 0.5 * np.outer(spec.vector(0), spec.vector(0).conj()))
    assert np.linalg.norm(extract_block(out) - want, 2) <= eps
    assert out.ledger.rho_copies >= 3 * math.ceil(0.25 / eps**2)


@pytest.mark.parametrize("r", [0.0, -0.1, 1.5])
def test_deflate_rejects_eigenvalue(r):
    be = exact_density_encoding(np.diag([0.7, 0.3]).astype(complex))
    with pytest.raises(InvalidEigenvalue):
        power.deflate(be, r, np.array([1.0, 0.0]), 1e-2)


def test_components_diagonal():
    found = power.qpca_components(power.DensitySource(np.diag(SPECTRUM)), 3, 1e-2)
    assert np.allclose(found.values, SPECTRUM[:3], atol=1e-2)
    for i, c in enumerate(found.components):
        assert linalg.phase_distance(c.vector, np.eye(4)[i]) <= 1e-2
    v = found.vectors
    assert np.max(np.abs(v.conj().T @ v - np.eye(3))) <= 2e-2
    assert all(a > b for a, b in zip(found.values, found.values[1:]))


def test_single_component_matches_top(rng):
    rho = synthetic.density_from_spectrum(SPECTRUM, rng)
    src = power.DensitySource(rho)
    one = power.qpca_components(src, 1, 1e-2).components[0]
    top = power.qpca_top(src, 1e-2)
    assert one.value == top.value and np.array_equal(one.vector, top.vector)


def test_rank_two_residual(rng):
    values = [0.7, 0.3] + [0.0] * 6
    rho = synthetic.density_from_spectrum(values, rng)
    eps = 1e-2
    found = power.qpca_components(power.DensitySource(rho), 2, eps)
    rest = rho - sum(c.value * np.outer(c.vector, c.vector.conj()) for c in found.components)
    assert np.linalg.norm(rest, 2) <= 2 * eps


def test_copies_compound_across_stages(rng):
    rho = synthetic.density_from_spectrum(SPECTRUM, rng)
    found = power.qpca_components(power.DensitySource(rho), 2, 1e-2)
    first = found.components[0].ledger.rho_copies
    assert found.components[1].ledger.rho_copies >= first**2
    assert found.total_ledger.circuit_depth >= found.components[0].ledger.circuit_depth


def test_components_partial_on_degenerate_stage():
    rho = np.diag([0.5, 0.25, 0.25, 0.0]).astype(complex)
    with pytest.raises(GapTooSmall) as info:
        power.qpca_components(power.DensitySource(rho), 3, 1e-2)
    partial = info.value.partial
    assert partial is not None and len(partial) == 1
    assert abs(partial.components[0].value - 0.5) <= 1e-2


def test_k_max_formula():
    assert power.k_max(1e-2) == math.ceil(1000 * math.log(100))
