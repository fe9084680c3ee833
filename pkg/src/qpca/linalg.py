"""Dense complex matrix helpers and the exact eigendecomposition oracle.

Every accuracy claim elsewhere in the package is checked against
:func:`eigh`, so this module stays deliberately boring: LAPACK via numpy,
a fixed eigenvector phase convention, and explicit tolerance gates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NotDensityMatrix, NotHermitian, NotUnitary, PhaseWrapRisk

HERMITIAN_ATOL = 1e-8
UNITARY_ATOL = 1e-8
DENSITY_ATOL = 1e-10
PHASE_WRAP_MARGIN = 0.1


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(a).T


def hermitian_defect(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - dagger(a)))


def unitary_defect(u: np.ndarray) -> float:
    return float(np.linalg.norm(dagger(u) @ u - np.eye(u.shape[0])))


def is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def check_square(a: np.ndarray) -> None:
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")


def check_hermitian(a, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    a = as_matrix(a)
    check_square(a)
    defect = hermitian_defect(a)
    if defect > atol:
        raise NotHermitian(f"||A - A^dagger||_F = {defect:.3e} exceeds {atol:.0e}")
    return a


def check_unitary(u, atol: float = UNITARY_ATOL) -> np.ndarray:
    u = as_matrix(u)
    check_square(u)
    defect = unitary_defect(u)
    if defect > atol:
        raise NotUnitary(f"||U^dagger U - I||_F = {defect:.3e} exceeds {atol:.0e}")
    return u


def as_density(rho, atol: float = DENSITY_ATOL) -> np.ndarray:
    """Validate ``rho`` as a density matrix on a power-of-two dimension."""
    rho = as_matrix(rho)
    check_square(rho)
    n = rho.shape[0]
    if not is_power_of_two(n):
        raise NotDensityMatrix(f"dimension {n} is not a power of two")
    if hermitian_defect(rho) > atol:
        raise NotDensityMatrix("matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1.0) > atol:
        raise NotDensityMatrix(f"trace is {tr.real:.12f}, expected 1")
    hermitian = 0.5 * (rho + dagger(rho))
    lo = np.linalg.eigvalsh(hermitian)[0]
    if lo < -atol:
        raise NotDensityMatrix(f"minimum eigenvalue {lo:.3e} is negative")
    return hermitian


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted by descending magnitude, with paired unit eigenvectors.

    ``eigenvectors[:, i]`` belongs to ``eigenvalues[i]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def gap(self) -> float:
        if len(self.eigenvalues) < 2:
            return math.inf
        return float(abs(abs(self.eigenvalues[0]) - abs(self.eigenvalues[1])))

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def vector(self, i: int) -> np.ndarray:
        return self.eigenvectors[:, i]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate ``v`` so its largest-magnitude entry (lowest index on ties) is real positive."""
    k = int(np.argmax(np.abs(v)))
    if v[k] == 0:
        return v
    return v * (abs(v[k]) / v[k])


def eigh(a) -> Spectrum:
    a = check_hermitian(a)
    h = 0.5 * (a + dagger(a))
    values, vectors = np.linalg.eigh(h)
    order = np.argsort(-np.abs(values), kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    vectors = np.column_stack([fix_phase(vectors[:, i]) for i in range(vectors.shape[1])])
    return Spectrum(values, vectors)


def matrix_function(a, f) -> np.ndarray:
    """Return ``sum_i f(r_i) |v_i><v_i|`` for Hermitian ``a``."""
    spec = eigh(a)
    fx = np.asarray(f(spec.eigenvalues))
    v = spec.eigenvectors
    return (v * fx) @ dagger(v)


def expm_hermitian(h, t: float = 1.0) -> np.ndarray:
    """``exp(-i h t)`` for Hermitian ``h``."""
    return matrix_function(h, lambda x: np.exp(-1j * t * x))


def eigenphases(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenphases and an orthonormal eigenbasis of a unitary (normal) matrix."""
    t, z = scipy.linalg.schur(u, output="complex")
    return np.angle(np.diag(t)), z


def principal_log_unitary(u) -> np.ndarray:
    """Return Hermitian ``H`` with ``u = exp(-iH)`` and spectrum inside (-pi, pi).

    Raises :class:`PhaseWrapRisk` when an eigenphase lies within 0.1 of the
    branch cut, where the logarithm is numerically ambiguous.
    """
    u = check_unitary(u)
    theta, z = eigenphases(u)
    worst = float(np.max(np.abs(theta)))
    if worst > math.pi - PHASE_WRAP_MARGIN:
        raise PhaseWrapRisk(f"eigenphase {worst:.4f} is too close to +-pi")
    h = (z * -theta) @ dagger(z)
    return 0.5 * (h + dagger(h))


def spectral_norm(a) -> float:
    return float(np.linalg.norm(a, 2))


def trace_norm(a) -> float:
    return float(np.sum(np.linalg.svd(a, compute_uv=False)))


def phase_distance(u: np.ndarray, v: np.ndarray) -> float:
    """``min_phi ||exp(i phi) u - v||`` for vectors of equal length."""
    ov = np.vdot(u, v)
    phase = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.linalg.norm(phase * u - v))


def unitary_dilation(b: np.ndarray) -> np.ndarray:
    """Minimal unitary with ``b`` as its top-left block (one extra qubit).

    ``[[B, sqrt(I - B B^dag)], [sqrt(I - B^dag B), -B^dag]]``. Singular values
    of ``b`` must not exceed 1 beyond round-off.
    """
    b = as_matrix(b)
    w, s, vh = np.linalg.svd(b)
    if s[0] > 1 + 1e-9:
        raise ValueError(f"block norm {s[0]:.6f} exceeds 1; cannot dilate")
    c = np.sqrt(np.clip(1.0 - np.minimum(s, 1.0) ** 2, 0.0, None))
    top_right = (w * c) @ dagger(w)
    bottom_left = (dagger(vh) * c) @ vh
    return np.block([[b, top_right], [bottom_left, -dagger(b)]])


def householder_unitary(x) -> np.ndarray:
    """Deterministic unitary whose first column is the unit vector ``x``.

    A Householder reflection times a global phase; the identity when
    ``x`` equals ``e_0``.
    """
    x = np.asarray(x, dtype=complex).ravel()
    n = x.size
    phase = x[0] / abs(x[0]) if abs(x[0]) > 0 else 1.0
    y = x / phase
    w = y.copy()
    w[0] -= 1.0
    nw = np.vdot(w, w).real
    if nw < 1e-30:
        return phase * np.eye(n, dtype=complex)
    return phase * (np.eye(n) - 2.0 * np.outer(w, np.conj(w)) / nw)
