"""Density-matrix exponentiation by the partial-swap trick.

One step maps ``sigma`` to ``Tr_1[exp(-iS dt) (rho (x) sigma) exp(iS dt)]``,
which agrees with ``exp(-i rho dt) sigma exp(i rho dt)`` to first order in
``dt``. Repeating ``N`` times with ``dt = t/N`` approximates conjugation by
``exp(-i rho t)`` with error ``O(t^2/N)``.

The ``N``-step channel is handled as an ``n^2 x n^2`` superoperator raised
to the ``N``-th power, so very large step counts stay cheap.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .blockenc import ResourceLedger, swap_matrix
from .errors import DimensionMismatch, InvalidAccuracy


@dataclass(frozen=True)
class SwapOperator:
    dim: int

    @property
    def matrix(self) -> np.ndarray:
        return swap_matrix(self.dim)


def partial_trace_first(m: np.ndarray, n: int) -> np.ndarray:
    return np.einsum("ijik->jk", m.reshape(n, n, n, n))


def swap_step(rho, sigma, dt: float) -> np.ndarray:
    """One partial-swap step, computed literally on the doubled register."""
    rho = linalg.as_density(rho)
    sigma = linalg.as_matrix(sigma)
    n = rho.shape[0]
    if sigma.shape != rho.shape:
        raise DimensionMismatch(f"rho is {rho.shape}, sigma is {sigma.shape}")
    s = SwapOperator(n).matrix
    # S^2 = I, so exp(-iS dt) = cos(dt) I - i sin(dt) S exactly
    step = math.cos(dt) * np.eye(n * n) - 1j * math.sin(dt) * s
    joint = step @ np.kron(rho, sigma) @ linalg.dagger(step)
    return partial_trace_first(joint, n)


def step_superoperator(rho: np.ndarray, dt: float) -> np.ndarray:
    """Row-major superoperator of :func:`swap_step` (``vec(AXB) = (A kron B^T) vec(X)``).

    Closed form: ``X -> cos^2 X + sin^2 tr(X) rho - i sin cos [rho, X]``.
    """
    n = rho.shape[0]
    c, s = math.cos(dt), math.sin(dt)
    eye = np.eye(n)
    vec_rho = rho.reshape(-1)
    vec_eye = eye.reshape(-1)
    sup = c * c * np.eye(n * n, dtype=complex)
    sup += s * s * np.outer(vec_rho, vec_eye)
    sup += -1j * s * c * (np.kron(rho, eye) - np.kron(eye, rho.T))
    return sup


def apply_superoperator(sup: np.ndarray, x: np.ndarray) -> np.ndarray:
    n = x.shape[0]
    return (sup @ x.reshape(-1)).reshape(n, n)


def hermitian_probes(n: int) -> list[np.ndarray]:
    """The ``n^2`` matrix units symmetrized into Hermitian probes (trace norm 1 each)."""
    probes = []
    for j in range(n):
        for k in range(j, n):
            p = np.zeros((n, n), dtype=complex)
            if j == k:
                p[j, j] = 1.0
                probes.append(p)
                continue
            p[j, k] = p[k, j] = 0.5
            probes.append(p)
            q = np.zeros((n, n), dtype=complex)
            q[j, k], q[k, j] = -0.5j, 0.5j
            probes.append(q)
    return probes


def step_count(t: float, eps: float, c_dme: float = 1.0) -> int:
    if not 0 < eps < 1:
        raise InvalidAccuracy(f"eps must lie in (0, 1), got {eps}")
    return max(1, math.ceil(c_dme * t * t / eps))


@dataclass(frozen=True)
class DmeResult:
    channel_output: np.ndarray
    implied_unitary: np.ndarray
    empirical_error: float
    ledger: ResourceLedger
    superoperator: np.ndarray
    n_steps: int
    t: float

    def effective_unitary(self) -> np.ndarray:
        """Nearest unitary conjugation to the realized channel.

        Dominant Kraus operator of the Choi matrix, polar-projected onto the
        unitaries. The global phase, which the channel cannot see, is fixed
        from ``tr(rho) = 1``: the unwrapped eigenphases must sum to ``-t``.
        """
        n = self.implied_unitary.shape[0]
        lr = self.superoperator.reshape(n, n, n, n)
        choi = lr.transpose(2, 0, 3, 1).reshape(n * n, n * n)
        choi = 0.5 * (choi + linalg.dagger(choi))
        w, vecs = np.linalg.eigh(choi)
        kraus = vecs[:, -1].reshape(n, n).T * math.sqrt(max(w[-1], 0.0))
        left, _, right = np.linalg.svd(kraus)
        v = left @ right
        theta = np.angle(np.linalg.eigvals(v))
        centre = np.angle(np.sum(np.exp(1j * theta)))
        unwrapped = centre + np.angle(np.exp(1j * (theta - centre)))
        phi = (-self.t - unwrapped.sum()) / n
        return np.exp(1j * phi) * v


def channel_error(sup: np.ndarray, exact: np.ndarray, probes=None) -> float:
    """Max over Hermitian probes of the trace distance to exact conjugation."""
    n = exact.shape[0]
    probes = hermitian_probes(n) if probes is None else probes
    worst = 0.0
    for p in probes:
        diff = apply_superoperator(sup, p) - exact @ p @ linalg.dagger(exact)
        worst = max(worst, 0.5 * linalg.trace_norm(diff))
    return worst


def exponentiate_density(
    rho,
    t: float,
    eps: float | None = None,
    *,
    c_dme: float = 1.0,
    n_steps: int | None = None,
    sigma=None,
    measure_error: bool = True,
) -> DmeResult:
    """Approximate conjugation by ``exp(-i rho t)`` with ``N = ceil(c_dme t^2 / eps)`` steps.

    Pass ``n_steps`` to fix ``N`` directly. ``sigma`` (default ``|0><0|``)
    is pushed through the channel to give ``channel_output``.
    """
    rho = linalg.as_density(rho)
    if not math.isfinite(t):
        raise InvalidAccuracy(f"t must be finite, got {t}")
    if n_steps is None:
        if eps is None:
            raise InvalidAccuracy("give eps or n_steps")
        n_steps = step_count(t, eps, c_dme)
    elif n_steps < 1:
        raise InvalidAccuracy("n_steps must be positive")
    n = rho.shape[0]
    sup = np.linalg.matrix_power(step_superoperator(rho, t / n_steps), n_steps)
    exact = linalg.expm_hermitian(rho, t)
    if sigma is None:
        sigma = np.zeros((n, n), dtype=complex)
        sigma[0, 0] = 1.0
    out = apply_superoperator(sup, linalg.as_matrix(sigma))
    err = channel_error(sup, exact) if measure_error else math.nan
    ledger = ResourceLedger(rho_copies=n_steps, circuit_depth=n_steps * math.log2(n))
    return DmeResult(out, exact, err, ledger, sup, n_steps, t)
