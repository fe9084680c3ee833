"""Power iteration on block encodings, top eigenpair extraction and deflation.

Eigenvalues are reported in units of the density matrix: every source's
encoding represents ``(pi/4) A`` for the operator ``A`` being analysed, and
the ``pi/4`` (and the deflation LCU's subnormalization) is divided out at
reporting time.

Copy counts follow the accounting of the underlying analysis: a round of
the power method at power ``k`` prepares one ``(eps/k)``-accurate encoding
(``~k^2/eps^2`` copies) and applies it ``k`` times.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import dme, linalg, qsvt
from .blockenc import (
    BlockEncoding,
    ResourceLedger,
    extract_block,
    lcu,
    purify_density,
    scale_down,
)
from .errors import (
    GapTooSmall,
    InvalidAccuracy,
    InvalidEigenvalue,
    NotUnitNorm,
    ZeroMatrixPower,
    ZeroVector,
)

PI_4 = math.pi / 4
DEFAULT_SEED = 0x5EED_C0FF_EE00_0001
GAP_FLOOR = 1e-3
K_CONSTANT = 1.0
MAX_RESEEDS = 8
MIN_OVERLAP = 1e-6
SHOT_CONSTANT = 10.0


@dataclass(frozen=True)
class EigenEstimate:
    value: float
    vector: np.ndarray
    residual: float
    ledger: ResourceLedger
    k: int = 0
    subnormalization: float = math.nan

    def __post_init__(self):
        norm = float(np.linalg.norm(self.vector))
        if abs(norm - 1.0) > 1e-10:
            raise NotUnitNorm(f"eigenvector norm {norm}")
        if self.residual < 0:
            raise ValueError("residual must be nonnegative")


@dataclass(frozen=True)
class ComponentList:
    components: list
    total_ledger: ResourceLedger = field(default_factory=ResourceLedger)

    @property
    def values(self) -> np.ndarray:
        return np.array([c.value for c in self.components])

    @property
    def vectors(self) -> np.ndarray:
        return np.column_stack([c.vector for c in self.components]) if self.components else np.zeros((0, 0))

    def __len__(self):
        return len(self.components)


def haar_state(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return z / np.linalg.norm(z)


def _check_vector(x) -> np.ndarray:
    x = np.asarray(x, dtype=complex).ravel()
    norm = np.linalg.norm(x)
    if norm == 0 or not np.isfinite(norm):
        raise ZeroVector("starting vector is zero")
    return x / norm


def _iterate(a: np.ndarray, x0: np.ndarray, k: int) -> tuple[np.ndarray, float]:
    """Normalized ``a^k x0`` and ``log ||a^k x0||`` with per-step renormalization."""
    x = x0
    log_norm = 0.0
    for _ in range(k):
        x = a @ x
        norm = np.linalg.norm(x)
        if norm == 0 or not np.isfinite(norm):
            raise ZeroMatrixPower("matrix power annihilated the vector")
        x = x / norm
        log_norm += math.log(norm)
    return x, log_norm


def classical_power_method(a, x0, k: int) -> EigenEstimate:
    """Normalized ``A^k x0`` with its Rayleigh quotient."""
    a = linalg.check_hermitian(a)
    if k < 1:
        raise InvalidAccuracy("k must be positive")
    x, _ = _iterate(a, _check_vector(x0), k)
    value = float(np.real(np.vdot(x, a @ x)))
    residual = float(np.linalg.norm(a @ x - value * x))
    return EigenEstimate(value, linalg.fix_phase(x), residual, ResourceLedger(), k)


def _power_ledger(be: BlockEncoding, k: int, subnormalization: float, eps: float) -> ResourceLedger:
    lg = be.ledger
    ledger = ResourceLedger(
        rho_copies=lg.rho_copies,
        circuit_depth=k * lg.circuit_depth,
        ancilla_qubits=lg.ancilla_qubits,
        unitary_calls=k * lg.unitary_calls,
    )
    gain = 1.0 / subnormalization
    if gain > 1:
        amp_eps = min(eps, 0.25)
        try:
            cost = qsvt.amplify_cost(gain, 0.25, amp_eps)
        except Exception as exc:
            raise GapTooSmall(f"amplification by {gain:.3e} is not representable") from exc
        m = cost.unitary_calls
        ledger = ResourceLedger(
            rho_copies=ledger.rho_copies,
            circuit_depth=m * ledger.circuit_depth + cost.circuit_depth,
            ancilla_qubits=ledger.ancilla_qubits + 1,
            unitary_calls=m * ledger.unitary_calls,
        )
    return ledger


def quantum_power_state(be: BlockEncoding, k: int, eps: float, *, seed: int = DEFAULT_SEED, x0=None):
    """State ``B^k x0 / ||B^k x0||`` for the encoded block ``B`` and its ledger.

    The ``k``-fold product encoding is applied implicitly; the ledger charges
    ``k`` uses of ``be`` plus amplification by the inverse subnormalization.
    """
    if k < 1:
        raise InvalidAccuracy("k must be positive")
    if x0 is None:
        x0 = haar_state(be.target_dim, np.random.default_rng(seed))
    x, log_norm = _iterate(extract_block(be), _check_vector(x0), k)
    sub = math.exp(log_norm) if log_norm > -700 else 0.0
    if sub == 0.0:
        raise GapTooSmall("subnormalization underflowed")
    return x, _power_ledger(be, k, sub, eps)


def estimate_top_eigenvalue(
    be: BlockEncoding,
    state,
    eps: float,
    shots: str = "exact",
    seed=None,
    scale: float = PI_4,
) -> float:
    """``<state| alpha B |state> / scale``, exactly or from Hadamard-test shots.

    Sampled mode draws ``ceil(C (alpha / (scale eps))^2)`` shots with
    ``P(0) = (1 + Re<B>)/2``.
    """
    psi = np.asarray(state, dtype=complex).ravel()
    if psi.size != be.target_dim:
        raise ValueError(f"state has length {psi.size}, encoding acts on {be.target_dim}")
    if abs(np.linalg.norm(psi) - 1) > 1e-8:
        raise NotUnitNorm("state must be unit norm")
    expect = float(np.real(np.vdot(psi, extract_block(be) @ psi)))
    if shots == "exact":
        return be.alpha * expect / scale
    if shots != "sampled":
        raise ValueError(f"unknown shot model {shots!r}")
    count = math.ceil(SHOT_CONSTANT * (be.alpha / (scale * eps)) ** 2)
    rng = np.random.default_rng(seed)
    p0 = min(max((1 + expect) / 2, 0.0), 1.0)
    zeros = rng.binomial(count, p0)
    return be.alpha * (2 * zeros / count - 1) / scale


def estimation_ledger(be: BlockEncoding, eps: float) -> ResourceLedger:
    reps = math.ceil(1 / eps)
    lg = be.ledger
    return ResourceLedger(circuit_depth=reps * lg.circuit_depth, unitary_calls=reps * lg.unitary_calls)


# ---- sources: anything that can hand out an eps-accurate encoding of (pi/4) A


@dataclass(frozen=True)
class DensitySource:
    """Copies of ``rho``, turned into encodings of ``pi rho / 4`` on demand."""

    rho: np.ndarray
    mode: str = "oracle"
    log_mode: str = "polynomial"
    c_dme: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "rho", linalg.as_density(self.rho))

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    def operator(self) -> np.ndarray:
        return self.rho

    def encode(self, eps: float) -> BlockEncoding:
        return qsvt.block_encode_density(self.rho, eps, mode=self.mode, log_mode=self.log_mode, c_dme=self.c_dme)


@dataclass(frozen=True)
class FixedEncoding:
    """A prebuilt encoding of ``(pi/4) A`` (for example a covariance encoding)."""

    encoding: BlockEncoding
    mode: str = "oracle"
    c_dme: float = 1.0

    @property
    def dim(self) -> int:
        return self.encoding.target_dim

    def operator(self) -> np.ndarray:
        b = self.encoding.represented / PI_4
        return 0.5 * (b + linalg.dagger(b))

    def encode(self, eps: float) -> BlockEncoding:
        return self.encoding


@dataclass(frozen=True)
class DeflatedSource:
    """``base`` with ``r v v^dag`` removed for each ``(r, v, copy_cost)`` entry.

    ``copy_cost`` is the number of copies of ``rho`` spent on one copy of
    ``v``; it is charged for every copy of ``v`` the encoding consumes.
    """

    base: object
    removed: tuple = ()

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def mode(self) -> str:
        return self.base.mode

    @property
    def c_dme(self) -> float:
        return self.base.c_dme

    def operator(self) -> np.ndarray:
        a = self.base.operator().copy()
        for r, v, _ in self.removed:
            a = a - r * np.outer(v, np.conj(v))
        return a

    def encode(self, eps: float) -> BlockEncoding:
        share = eps / (len(self.removed) + 1)
        be = self.base.encode(share)
        for r, v, cost in self.removed:
            be = deflate(be, r, v, share, mode=self.mode, c_dme=self.c_dme, copy_cost=cost)
        return be

    def push(self, r: float, v, copy_cost: int) -> "DeflatedSource":
        return DeflatedSource(self.base, self.removed + ((r, np.asarray(v, dtype=complex), copy_cost),))


def vector_encoding(v, eps: float, *, mode: str = "oracle", c_dme: float = 1.0, copy_cost: int = 0) -> BlockEncoding:
    """Encoding of ``pi v v^dag / 4`` (``alpha = 1``) fed by copies of ``v``.

    Oracle mode purifies ``v`` exactly; sample mode runs the density
    pipeline on ``v v^dag``. Either way ``ceil(c_dme / (4 eps^2))`` copies of
    ``v`` are charged, each worth ``copy_cost`` copies of ``rho``.
    """
    v = _check_vector(v)
    n = v.size
    if mode == "sample":
        be = qsvt.block_encode_density(np.outer(v, np.conj(v)), eps, mode="sample", c_dme=c_dme)
    else:
        be = scale_down(purify_density(linalg.householder_unitary(v), 1, n), 4 / math.pi)
    copies = dme.step_count(0.5, eps * eps, c_dme)
    return replace(be, ledger=replace(be.ledger, rho_copies=copies * copy_cost))


def deflate(
    be_rho: BlockEncoding,
    r: float,
    vec,
    vec_copies_eps: float,
    *,
    mode: str = "oracle",
    c_dme: float = 1.0,
    copy_cost: int = 0,
) -> BlockEncoding:
    """Encoding of ``(pi/4)(A - r v v^dag)`` from an encoding of ``(pi/4) A``.

    For ``be_rho`` with ``alpha = 1`` the block is ``(pi/8)(A - r v v^dag)``.
    """
    if not 0 < r <= 1:
        raise InvalidEigenvalue(f"eigenvalue {r} outside (0, 1]")
    v = np.asarray(vec, dtype=complex).ravel()
    if abs(np.linalg.norm(v) - 1) > 1e-8:
        raise NotUnitNorm("deflation vector must be unit norm")
    vbe = vector_encoding(v, vec_copies_eps, mode=mode, c_dme=c_dme, copy_cost=copy_cost)
    if r < 1:
        vbe = scale_down(vbe, 1 / r)
    return lcu([1.0, 1.0], [be_rho, vbe], [1, -1])


# ---- adaptive top eigenpair


def k_max(eps: float, gap_floor: float = GAP_FLOOR, c: float = K_CONSTANT) -> int:
    return max(1, math.ceil(c / gap_floor * math.log(1 / eps)))


def _phase_distance(x, y) -> float:
    return linalg.phase_distance(x, y)


def qpca_top(
    source,
    eps: float,
    *,
    seed: int = DEFAULT_SEED,
    gap_floor: float = GAP_FLOOR,
    shots: str = "exact",
) -> EigenEstimate:
    """Top eigenpair of the source operator to accuracy ``eps``.

    ``k`` doubles from 1. Each round builds an ``(eps/k)``-accurate
    encoding and runs two independent Haar seeds. The round is accepted
    when the seeds agree to ``eps``, the first seed's state moved by less
    than ``eps/2`` and the eigenvalue by less than ``eps/2``.
    """
    if not 0 < eps < 0.5:
        raise InvalidAccuracy(f"eps must lie in (0, 1/2), got {eps}")
    limit = k_max(eps, gap_floor)
    rng = np.random.default_rng(seed)
    n = source.dim
    starts = [haar_state(n, rng), haar_state(n, rng)]
    total = ResourceLedger()
    prev_state = prev_value = None
    reseeds = 0
    k = 1
    while True:
        if k > limit:
            raise GapTooSmall(f"no convergence by k = {limit}; spectral gap below {gap_floor}")
        be = source.encode(eps / k)
        block = extract_block(be)
        states, logs = [], []
        for x0 in starts:
            x, log_norm = _iterate(block, x0, k)
            states.append(x)
            logs.append(log_norm)
        value = estimate_top_eigenvalue(be, states[0], eps, "exact")
        b1 = value * PI_4 / be.alpha
        log_sub = logs[0]
        if log_sub < -700:
            raise GapTooSmall(f"subnormalization underflowed at k = {k} before convergence; spectral gap too small")
        if abs(b1) > 0:
            overlap = math.exp(log_sub - k * math.log(abs(b1)))
            if overlap < MIN_OVERLAP and reseeds < MAX_RESEEDS:
                reseeds += 1
                starts = [haar_state(n, rng), haar_state(n, rng)]
                prev_state = prev_value = None
                continue
        total = total + _power_ledger(be, k, math.exp(log_sub), eps)
        agree = _phase_distance(states[0], states[1]) <= eps
        settled = (
            prev_state is not None
            and _phase_distance(states[0], prev_state) < eps / 2
            and abs(value - prev_value) < eps / 2
        )
        if agree and settled:
            break
        prev_state, prev_value = states[0], value
        k *= 2
    x = linalg.fix_phase(states[0])
    if shots != "exact":
        value = estimate_top_eigenvalue(be, x, eps, shots, seed=rng.integers(2**63))
    total = total + estimation_ledger(be, eps)
    a = be.represented / PI_4
    residual = float(np.linalg.norm(a @ x - value * x))
    return EigenEstimate(float(value), x, residual, total, k, math.exp(log_sub))


def qpca_components(
    source,
    R: int,
    eps: float,
    *,
    seed: int = DEFAULT_SEED,
    gap_floor: float = GAP_FLOOR,
    shots: str = "exact",
) -> ComponentList:
    """Top ``R`` eigenpairs by repeated top-pair extraction and deflation.

    One copy of the stage-``j`` vector costs the whole stage-``j`` run, so
    copy counts compound across stages.
    """
    if R < 1:
        raise InvalidAccuracy("R must be positive")
    found = []
    total = ResourceLedger()
    current = source
    for j in range(R):
        try:
            est = qpca_top(current, eps, seed=seed + j, gap_floor=gap_floor, shots=shots)
        except GapTooSmall as exc:
            raise GapTooSmall(f"stage {j + 1}: {exc}", partial=ComponentList(found, total)) from exc
        if found and est.value >= found[-1].value - gap_floor:
            raise GapTooSmall(
                f"stage {j + 1} value {est.value:.4f} does not descend below {found[-1].value:.4f}",
                partial=ComponentList(found, total),
            )
        found.append(est)
        total = total + est.ledger
        if j + 1 < R:
            if not 0 < est.value <= 1:
                raise GapTooSmall(
                    f"stage {j + 1} value {est.value:.4f} cannot be deflated",
                    partial=ComponentList(found, total),
                )
            if not isinstance(current, DeflatedSource):
                current = DeflatedSource(current)
            current = current.push(est.value, est.vector, max(1, est.ledger.rho_copies))
    return ComponentList(found, total)
