"""Eigenvalue transformation of block encodings and recovery of ``rho`` from ``exp(-i rho/2)``.

Polynomials act at the matrix level on the Hermitian block, and the result
is embedded in a unitary completion. Phase-factor synthesis is not done;
resource ledgers charge what the corresponding circuits would use.

Recovery pipeline (``block_encode_density``)::

    exp(-i rho/2)  --LCU of iU and -iU^dag-->  sin(rho/2)
                   --odd arcsin polynomial-->  rho/(2 pi)   (encodes 2H/pi = rho/pi, alpha 2)
                   --uniform amplification by pi^2/2-->  pi rho / 4   (alpha 1)
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial import chebyshev

from . import dme, linalg
from .blockenc import (
    BlockEncoding,
    ResourceLedger,
    _from_block,
    extract_block,
    lcu,
    rescale_target,
)
from .errors import (
    InvalidAccuracy,
    InvalidParameters,
    NotHermitianTarget,
    PhaseOutOfRange,
    SupNormViolation,
)

TRANSFORM_SUP = 0.5
ARCSIN_HALF_WIDTH = math.sin(0.5)
# certify on a slightly wider interval so eigenphases a hair past 1/2 stay covered
_CERT_WIDTH = math.sin(0.5 + 1e-3)
PHASE_SLACK = 1e-6
AMPLIFY_GAIN = math.pi**2 / 2
AMPLIFY_DELTA = 0.2


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial in the Chebyshev basis with a certified sup norm on [-1, 1]."""

    coeffs: np.ndarray
    parity: str
    sup_bound: float
    max_error: float = 0.0

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if self.parity not in ("even", "odd", "none"):
            raise InvalidParameters(f"unknown parity {self.parity!r}")
        if self.parity == "odd" and np.any(c[0::2] != 0):
            raise InvalidParameters("odd polynomial has nonzero even coefficients")
        if self.parity == "even" and np.any(c[1::2] != 0):
            raise InvalidParameters("even polynomial has nonzero odd coefficients")
        grid = np.linspace(-1, 1, 2001)
        if np.max(np.abs(chebyshev.chebval(grid, c))) > self.sup_bound + 1e-12:
            raise SupNormViolation("sup_bound is violated on the sample grid")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        return chebyshev.chebval(x, self.coeffs)


def chebyshev_poly(coeffs, sup_bound=None) -> Polynomial:
    """Wrap Chebyshev coefficients, inferring parity and (if absent) a sup bound."""
    c = np.asarray(coeffs, dtype=float)
    if np.all(c[0::2] == 0):
        parity = "odd"
    elif np.all(c[1::2] == 0):
        parity = "even"
    else:
        parity = "none"
    if sup_bound is None:
        sup_bound = float(np.max(np.abs(chebyshev.chebval(np.linspace(-1, 1, 20001), c))))
    return Polynomial(c, parity, sup_bound)


def _arcsin_taylor(n_terms: int) -> np.ndarray:
    """Coefficients of ``x^(2k+1)`` in the arcsin series, ``k < n_terms``."""
    out = np.empty(n_terms)
    c = 1.0
    for k in range(n_terms):
        out[k] = c / (2 * k + 1)
        c *= (2 * k + 1) / (2 * k + 2)
    return out


def arcsin_poly(eps_poly: float, scale: float = 1 / math.pi) -> Polynomial:
    """Odd polynomial within ``eps_poly`` of ``scale * arcsin(x)`` for ``|x| <= sin(1/2)``.

    Truncated Taylor series. All coefficients are positive, so the maximum
    of ``|P|`` on [-1, 1] is ``P(1) < scale * pi/2``, which is 1/2 at the
    default scale. The tail bound ``scale * c_{K+1} x^{2K+3} / (1 - x^2)``
    picks the number of terms.
    """
    if not 0 < eps_poly <= 0.5:
        raise InvalidAccuracy(f"eps_poly must lie in (0, 1/2], got {eps_poly}")
    x = _CERT_WIDTH
    terms = 1
    while True:
        a = _arcsin_taylor(terms + 1)
        tail = scale * a[terms] * x ** (2 * terms + 1) / (1 - x * x)
        if tail <= eps_poly:
            break
        terms += 1
    power = np.zeros(2 * terms)
    power[1::2] = scale * a[:terms]
    cheb = chebyshev.poly2cheb(power)
    cheb[0::2] = 0.0
    sup = max(float(np.sum(power)), float(abs(chebyshev.chebval(1.0, cheb)))) + 1e-15
    return Polynomial(cheb, "odd", sup, tail)


def _hermitian_block(be: BlockEncoding, atol: float) -> np.ndarray:
    b = extract_block(be)
    defect = linalg.hermitian_defect(b)
    if defect > atol:
        raise NotHermitianTarget(f"encoded block is not Hermitian (defect {defect:.2e})")
    return 0.5 * (b + linalg.dagger(b))


def eigen_poly_transform(be: BlockEncoding, poly: Polynomial, *, hermitian_atol: float = 1e-6) -> BlockEncoding:
    """``(1, a+2, 4d sqrt(eps/alpha))``-encoding of ``P(A/alpha)``.

    Any approximation error of ``P`` against an intended function is the
    caller's to add.
    """
    if poly.sup_bound > TRANSFORM_SUP + 1e-12:
        raise SupNormViolation(f"sup bound {poly.sup_bound:.6f} exceeds 1/2")
    h = _hermitian_block(be, hermitian_atol)
    d = poly.degree
    block = linalg.matrix_function(h, poly)
    block = 0.5 * (block + linalg.dagger(block))
    eps = 4 * d * math.sqrt(be.eps / be.alpha)
    lg = be.ledger
    ledger = ResourceLedger(
        rho_copies=lg.rho_copies,
        circuit_depth=d * lg.circuit_depth + (be.ledger.ancilla_qubits + 1) * d,
        ancilla_qubits=lg.ancilla_qubits + 2,
        unitary_calls=d * lg.unitary_calls,
    )
    target = None
    if be.target is not None and linalg.hermitian_defect(be.target) <= 1e-8:
        target = linalg.matrix_function(be.target / be.alpha, poly)
    return _from_block(block, alpha=1.0, eps=eps, ledger=ledger, target=target)


def _unitary_of(be: BlockEncoding) -> np.ndarray:
    return be.unitary if be.ancillas == 0 else extract_block(be)


def log_unitary(be_u: BlockEncoding, eps: float, *, mode: str = "polynomial") -> BlockEncoding:
    """Encoding of ``2H/pi`` (``alpha = 2``) from an encoding of ``U = exp(-iH)``, ``||H|| <= 1/2``.

    ``mode="polynomial"`` runs the arcsin-of-sine route; ``mode="oracle"``
    takes the exact principal logarithm. Both charge the same ledger.
    """
    if not 0 < eps <= 0.5:
        raise InvalidAccuracy(f"eps must lie in (0, 1/2], got {eps}")
    u = _unitary_of(be_u)
    theta, _ = linalg.eigenphases(u)
    if np.max(np.abs(theta)) > 0.5 + PHASE_SLACK:
        raise PhaseOutOfRange(f"eigenphase {np.max(np.abs(theta)):.6f} exceeds 1/2")
    poly = arcsin_poly(eps / 2)
    n = u.shape[0]

    if mode == "polynomial":
        plus = BlockEncoding(1j * u, 1.0, 0, be_u.eps, n, be_u.ledger)
        minus = BlockEncoding(-1j * linalg.dagger(u), 1.0, 0, be_u.eps, n, be_u.ledger)
        # realized once and reused, so copies are not double counted
        sine = lcu([0.5, 0.5], [plus, minus])
        sine = replace(sine, ledger=replace(sine.ledger, rho_copies=be_u.ledger.rho_copies))
        out = eigen_poly_transform(sine, poly)
        out = replace(out, eps=out.eps + poly.max_error)
    elif mode == "oracle":
        h = linalg.principal_log_unitary(u)
        d = poly.degree
        lg = be_u.ledger
        ledger = ResourceLedger(
            rho_copies=lg.rho_copies,
            circuit_depth=d * lg.circuit_depth + 2 * d,
            ancilla_qubits=lg.ancilla_qubits + 1,
            unitary_calls=d * lg.unitary_calls,
        )
        out = _from_block(h / math.pi, alpha=1.0, eps=4 * d * math.sqrt(be_u.eps), ledger=ledger)
    else:
        raise InvalidParameters(f"unknown log_unitary mode {mode!r}")
    return rescale_target(out, 2.0)


def amplify_cost(gamma: float, delta: float, eps: float, c: float = 1.0) -> ResourceLedger:
    """Ledger of uniform singular value amplification by ``gamma``.

    ``m = ceil(c (gamma/delta) ln(gamma/eps))`` uses of ``U`` and ``U^dag``
    on a single extra ancilla.
    """
    if not gamma > 1 or not 0 < delta < 0.5 or not 0 < eps < 0.5:
        raise InvalidParameters(f"need gamma > 1 and delta, eps in (0, 1/2); got {gamma}, {delta}, {eps}")
    m = c * (gamma / delta) * math.log(gamma / eps)
    if not math.isfinite(m):
        raise InvalidParameters("amplification cost overflows")
    m = math.ceil(m)
    return ResourceLedger(circuit_depth=float(m), ancilla_qubits=1, unitary_calls=m)


def amplify(be: BlockEncoding, gamma: float, *, delta: float = AMPLIFY_DELTA, eps: float = 1e-3) -> BlockEncoding:
    """Multiply the block by ``gamma`` (exact renormalization; circuit cost from :func:`amplify_cost`).

    Requires ``||block|| <= (1 - delta)/gamma``. The encoded operator is
    unchanged, so ``alpha`` drops by ``gamma`` and ``eps`` is kept.
    """
    block = extract_block(be)
    limit = (1 - delta) / gamma
    norm = linalg.spectral_norm(block)
    if norm > limit + 1e-12:
        raise InvalidParameters(f"block norm {norm:.6f} exceeds amplification window {limit:.6f}")
    cost = amplify_cost(gamma, delta, eps)
    m = cost.unitary_calls
    lg = be.ledger
    ledger = ResourceLedger(
        rho_copies=lg.rho_copies,
        circuit_depth=m * lg.circuit_depth + cost.circuit_depth,
        ancilla_qubits=lg.ancilla_qubits + 1,
        unitary_calls=m * lg.unitary_calls,
    )
    return _from_block(gamma * block, alpha=be.alpha / gamma, eps=be.eps, ledger=ledger, target=be.target)


def block_encode_density(
    rho,
    eps: float,
    *,
    mode: str = "oracle",
    log_mode: str = "polynomial",
    c_dme: float = 1.0,
) -> BlockEncoding:
    """``eps``-accurate, ``alpha = 1`` encoding of ``pi rho / 4`` from copies of ``rho``.

    ``exp(-i rho/2)`` is realized by density-matrix exponentiation at
    accuracy ``eps^2`` (``N = ceil(c_dme / (4 eps^2))`` copies). In
    ``mode="sample"`` the unitary is the one the ``N``-step channel actually
    implements; in ``mode="oracle"`` it is exact, and the same ``N`` copies
    are charged.
    """
    if not 0 < eps < 0.5:
        raise InvalidAccuracy(f"eps must lie in (0, 1/2), got {eps}")
    rho = linalg.as_density(rho)
    n = rho.shape[0]
    t = 0.5
    acc = eps * eps
    if mode == "sample":
        res = dme.exponentiate_density(rho, t, acc, c_dme=c_dme, measure_error=False)
        u = res.effective_unitary()
        u_eps = acc
        ledger = replace(res.ledger, unitary_calls=1)
    elif mode == "oracle":
        steps = dme.step_count(t, acc, c_dme)
        u = linalg.expm_hermitian(rho, t)
        u_eps = 0.0
        ledger = ResourceLedger(rho_copies=steps, circuit_depth=steps * math.log2(n), unitary_calls=1)
    else:
        raise InvalidParameters(f"unknown mode {mode!r}")
    be_u = BlockEncoding(u, 1.0, 0, u_eps, n, ledger)
    # error budget: the final block error is (pi^2/4) x the log-unitary error
    lu = log_unitary(be_u, 2 * eps / math.pi**2, mode=log_mode)
    presented = rescale_target(lu, math.pi**2 / 4)
    out = amplify(presented, AMPLIFY_GAIN, eps=min(eps, 0.25))
    return out.with_target(math.pi * rho / 4)
