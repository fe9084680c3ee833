"""Block encodings as explicit unitaries, with first-order error bookkeeping.

A :class:`BlockEncoding` of an operator ``A`` stores a unitary ``U`` on an
ancilla register of ``ancillas`` qubits (outermost) times an ``n``-dimensional
system register, such that ``alpha * (<0|U|0>) ~ A`` within ``eps`` in
spectral norm.

Combinators build the composed circuit unitary literally while the result
fits in :data:`MAX_EXPLICIT_DIM`. Past that size they compute the top-left
block from the input blocks and store its minimal unitary dilation (one
ancilla qubit) instead. The ancilla count a full circuit would need is kept
in ``ledger.ancilla_qubits`` either way.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import linalg
from .errors import (
    BadRegisterSplit,
    DimensionMismatch,
    EmptyCombination,
    InvalidParameters,
    InvalidScale,
    NotUnitary,
)

MAX_EXPLICIT_DIM = 256
UNITARY_TOL = 1e-9


@dataclass(frozen=True)
class ResourceLedger:
    """Resource counters charged by a construction.

    Addition sums copies, depth and unitary calls. Ancilla qubits combine by
    ``max`` (peak register width), which keeps addition commutative and
    associative.
    """

    rho_copies: int = 0
    circuit_depth: float = 0.0
    ancilla_qubits: int = 0
    unitary_calls: int = 0

    def __post_init__(self):
        if min(self.rho_copies, self.circuit_depth, self.ancilla_qubits, self.unitary_calls) < 0:
            raise ValueError("ledger counters must be nonnegative")

    def __add__(self, other: "ResourceLedger") -> "ResourceLedger":
        if not isinstance(other, ResourceLedger):
            return NotImplemented
        return ResourceLedger(
            rho_copies=self.rho_copies + other.rho_copies,
            circuit_depth=self.circuit_depth + other.circuit_depth,
            ancilla_qubits=max(self.ancilla_qubits, other.ancilla_qubits),
            unitary_calls=self.unitary_calls + other.unitary_calls,
        )

    def __radd__(self, other):
        # lets sum() start from 0
        if other == 0:
            return self
        return NotImplemented

    def times(self, k: int) -> "ResourceLedger":
        """Ledger of ``k`` sequential repetitions."""
        return ResourceLedger(
            rho_copies=self.rho_copies * k,
            circuit_depth=self.circuit_depth * k,
            ancilla_qubits=self.ancilla_qubits,
            unitary_calls=self.unitary_calls * k,
        )

    def to_dict(self) -> dict:
        return {
            "rho_copies": int(self.rho_copies),
            "circuit_depth": float(self.circuit_depth),
            "ancilla_qubits": int(self.ancilla_qubits),
            "unitary_calls": int(self.unitary_calls),
        }


@dataclass(frozen=True)
class BlockEncoding:
    """An ``(alpha, ancillas, eps)`` block encoding of an ``target_dim``-square operator.

    ``target`` optionally carries the operator the encoding claims to
    represent, for testing (:meth:`target_error`).
    """

    unitary: np.ndarray
    alpha: float
    ancillas: int
    eps: float
    target_dim: int
    ledger: ResourceLedger = field(default_factory=ResourceLedger)
    target: np.ndarray | None = None

    def __post_init__(self):
        u = self.unitary
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise DimensionMismatch(f"unitary must be square, got {u.shape}")
        if u.shape[0] != (2 ** self.ancillas) * self.target_dim:
            raise DimensionMismatch(
                f"unitary dimension {u.shape[0]} != 2^{self.ancillas} * {self.target_dim}"
            )
        if not self.alpha > 0:
            raise InvalidParameters(f"alpha must be positive, got {self.alpha}")
        if self.eps < 0:
            raise InvalidParameters(f"eps must be nonnegative, got {self.eps}")
        if linalg.unitary_defect(u) > UNITARY_TOL * max(1.0, math.sqrt(u.shape[0])):
            raise NotUnitary("block-encoding unitary is not unitary")

    @property
    def dim(self) -> int:
        return self.unitary.shape[0]

    @property
    def block(self) -> np.ndarray:
        return extract_block(self)

    @property
    def represented(self) -> np.ndarray:
        """``alpha`` times the top-left block: the operator actually encoded."""
        return self.alpha * extract_block(self)

    def target_error(self) -> float:
        if self.target is None:
            raise ValueError("no target attached")
        return linalg.spectral_norm(self.represented - self.target)

    def with_target(self, target) -> "BlockEncoding":
        return replace(self, target=np.asarray(target, dtype=complex))


def extract_block(be: BlockEncoding) -> np.ndarray:
    """Top-left ``target_dim`` block, i.e. all ancillas projected onto ``|0...0>``."""
    n = be.target_dim
    return be.unitary[:n, :n].copy()


def _log2_exact(d: int, what: str) -> int:
    if not linalg.is_power_of_two(d):
        raise BadRegisterSplit(f"{what} dimension {d} is not a power of two")
    return d.bit_length() - 1


def _from_block(block, *, alpha, eps, ledger, target=None) -> BlockEncoding:
    """Realize ``block`` as a unitary completion.

    Uses ``ledger.ancilla_qubits`` qubits when that fits under the explicit
    size cap (dilation on the innermost ancilla, identity on the rest), and a
    single-qubit dilation otherwise.
    """
    n = block.shape[0]
    logical = max(1, ledger.ancilla_qubits)
    u = linalg.unitary_dilation(block)
    physical = 1
    if (2 ** logical) * n <= MAX_EXPLICIT_DIM:
        u = np.kron(np.eye(2 ** (logical - 1)), u)
        physical = logical
    if ledger.ancilla_qubits < physical:
        ledger = replace(ledger, ancilla_qubits=physical)
    return BlockEncoding(u, alpha, physical, eps, n, ledger, target)


def compress(be: BlockEncoding) -> BlockEncoding:
    """Replace the stored circuit by the one-ancilla dilation of its block."""
    u = linalg.unitary_dilation(extract_block(be))
    return BlockEncoding(u, be.alpha, 1, be.eps, be.target_dim, be.ledger, be.target)


def encode_self(u, *, depth: float = 1.0, calls: int = 1) -> BlockEncoding:
    """A unitary is an exact ``(1, 0, 0)`` encoding of itself."""
    u = linalg.check_unitary(u)
    ledger = ResourceLedger(circuit_depth=depth, unitary_calls=calls)
    return BlockEncoding(u, 1.0, 0, 0.0, u.shape[0], ledger, u.copy())


def _embed(u: np.ndarray, inner: int, outer: int) -> np.ndarray:
    """Insert an identity on a middle register of size ``inner``.

    ``u`` acts on (a, s) with ``a`` of size ``outer``; the result acts on
    (a, inner, s) and is the identity on the middle register.
    """
    n = u.shape[0] // outer
    ur = u.reshape(outer, n, outer, n)
    full = np.einsum("iskt,jl->ijsklt", ur, np.eye(inner))
    d = outer * inner * n
    return full.reshape(d, d)


def _product_meta(be1, be2):
    eps = be1.alpha * be2.eps + be2.alpha * be1.eps
    ledger = be1.ledger + be2.ledger
    ledger = replace(ledger, ancilla_qubits=be1.ledger.ancilla_qubits + be2.ledger.ancilla_qubits)
    target = None
    if be1.target is not None and be2.target is not None:
        target = be1.target @ be2.target
    return eps, ledger, target


def product(be1: BlockEncoding, be2: BlockEncoding) -> BlockEncoding:
    """Encoding of ``A1 @ A2`` with ``alpha = alpha1 * alpha2``.

    The circuit applies ``U2`` then ``U1`` on disjoint ancilla registers
    (``be1``'s outermost).
    """
    if be1.target_dim != be2.target_dim:
        raise DimensionMismatch(f"target dims differ: {be1.target_dim} vs {be2.target_dim}")
    n = be1.target_dim
    eps, ledger, target = _product_meta(be1, be2)
    alpha = be1.alpha * be2.alpha
    d1, d2 = 2**be1.ancillas, 2**be2.ancillas
    if d1 * d2 * n <= MAX_EXPLICIT_DIM:
        u2 = np.kron(np.eye(d1), be2.unitary)
        u1 = _embed(be1.unitary, d2, d1)
        return BlockEncoding(u1 @ u2, alpha, be1.ancillas + be2.ancillas, eps, n, ledger, target)
    block = extract_block(be1) @ extract_block(be2)
    return _from_block(block, alpha=alpha, eps=eps, ledger=ledger, target=target)


def power(be: BlockEncoding, k: int) -> BlockEncoding:
    """``k``-fold self product by repeated squaring."""
    if k < 1:
        raise InvalidParameters("power needs k >= 1")
    result = None
    base = be
    while k:
        if k & 1:
            result = base if result is None else product(result, base)
        k >>= 1
        if k:
            base = product(base, base)
    return result


def _pad_ancillas(be: BlockEncoding, a: int) -> np.ndarray:
    extra = a - be.ancillas
    if extra == 0:
        return be.unitary
    return np.kron(np.eye(2**extra), be.unitary)


def lcu(weights, bes, signs=None) -> BlockEncoding:
    """Encoding of ``sum_i sign_i * w_i * A_i`` by PREPARE-SELECT-UNPREPARE.

    The prepared selection state has amplitudes ``sqrt(w_i alpha_i / alpha)``
    with ``alpha = sum_i w_i alpha_i``, so the top-left block is
    ``sum_i sign_i w_i A_i / alpha``. ``eps`` is ``sum_i w_i eps_i``.
    """
    bes = list(bes)
    weights = [float(w) for w in weights]
    if not bes:
        raise EmptyCombination("lcu of an empty list")
    if len(weights) != len(bes):
        raise InvalidParameters("weights and encodings differ in length")
    signs = [1] * len(bes) if signs is None else [int(s) for s in signs]
    if len(signs) != len(bes) or any(s not in (1, -1) for s in signs):
        raise InvalidParameters("signs must be a list of +1/-1 matching the encodings")
    if any(not math.isfinite(w) or w < 0 for w in weights):
        raise InvalidParameters("weights must be finite and nonnegative")
    n = bes[0].target_dim
    if any(b.target_dim != n for b in bes):
        raise DimensionMismatch("all encodings must share a target dimension")
    coeffs = np.array([w * b.alpha for w, b in zip(weights, bes)])
    alpha = float(coeffs.sum())
    if alpha <= 0:
        raise EmptyCombination("all lcu weights are zero")
    m = len(bes)
    sel = math.ceil(math.log2(m)) if m > 1 else 0
    a_max = max(b.ancillas for b in bes)

    eps = float(sum(w * b.eps for w, b in zip(weights, bes)))
    ledger = sum(b.ledger for b in bes)
    ledger = replace(
        ledger,
        circuit_depth=m * max(b.ledger.circuit_depth for b in bes),
        ancilla_qubits=max(b.ledger.ancilla_qubits for b in bes) + sel,
    )
    target = None
    if all(b.target is not None for b in bes):
        target = sum(s * w * b.target for s, w, b in zip(signs, weights, bes))

    if (2 ** (sel + a_max)) * n <= MAX_EXPLICIT_DIM:
        amps = np.zeros(2**sel, dtype=complex)
        amps[:m] = np.sqrt(coeffs / alpha)
        prep = linalg.householder_unitary(amps)
        inner = (2**a_max) * n
        select = np.zeros(((2**sel) * inner,) * 2, dtype=complex)
        for i in range(2**sel):
            sl = slice(i * inner, (i + 1) * inner)
            select[sl, sl] = signs[i] * _pad_ancillas(bes[i], a_max) if i < m else np.eye(inner)
        prep_full = np.kron(prep, np.eye(inner))
        u = linalg.dagger(prep_full) @ select @ prep_full
        return BlockEncoding(u, alpha, sel + a_max, eps, n, ledger, target)

    block = sum(s * c * extract_block(b) for s, c, b in zip(signs, coeffs, bes)) / alpha
    return _from_block(block, alpha=alpha, eps=eps, ledger=ledger, target=target)


def tensor(bes) -> BlockEncoding:
    """Encoding of ``M_1 (x) M_2 (x) ...``; ancilla registers ordered before systems."""
    bes = list(bes)
    if not bes:
        raise EmptyCombination("tensor of an empty list")
    if len(bes) == 1:
        return bes[0]
    alphas = np.array([b.alpha for b in bes])
    alpha = float(np.prod(alphas))
    eps = float(sum(b.eps * np.prod(np.delete(alphas, i)) for i, b in enumerate(bes)))
    ledger = sum(b.ledger for b in bes)
    ledger = replace(
        ledger,
        circuit_depth=max(b.ledger.circuit_depth for b in bes) + 1,
        ancilla_qubits=sum(b.ledger.ancilla_qubits for b in bes),
    )
    target = None
    if all(b.target is not None for b in bes):
        target = bes[0].target
        for b in bes[1:]:
            target = np.kron(target, b.target)
    n = int(np.prod([b.target_dim for b in bes]))
    a = sum(b.ancillas for b in bes)
    total = (2**a) * n
    if total <= MAX_EXPLICIT_DIM:
        u = bes[0].unitary
        for b in bes[1:]:
            u = np.kron(u, b.unitary)
        k = len(bes)
        shape = []
        for b in bes:
            shape += [2**b.ancillas, b.target_dim]
        perm = [2 * i for i in range(k)] + [2 * i + 1 for i in range(k)]
        ur = u.reshape(shape + shape)
        ur = ur.transpose(perm + [2 * k + p for p in perm])
        return BlockEncoding(ur.reshape(total, total), alpha, a, eps, n, ledger, target)
    block = extract_block(bes[0])
    for b in bes[1:]:
        block = np.kron(block, extract_block(b))
    return _from_block(block, alpha=alpha, eps=eps, ledger=ledger, target=target)


def rotation_encoding(p: float) -> BlockEncoding:
    """``R_Y(theta)`` with ``cos(theta/2) = 1/p``: a one-ancilla encoding of the scalar ``1/p``.

    The sign placement of ``sin(theta/2)`` does not affect the top-left entry.
    """
    c = 1.0 / p
    s = math.sqrt(max(0.0, 1.0 - c * c))
    ry = np.array([[c, -s], [s, c]], dtype=complex)
    ledger = ResourceLedger(circuit_depth=1.0, ancilla_qubits=1)
    return BlockEncoding(ry, 1.0, 1, 0.0, 1, ledger, np.array([[c]], dtype=complex))


def identity_encoding(n: int) -> BlockEncoding:
    eye = np.eye(n, dtype=complex)
    return BlockEncoding(eye, 1.0, 0, 0.0, n, ResourceLedger(), eye)


def scale_down(be: BlockEncoding, p: float) -> BlockEncoding:
    """Encoding of ``A / p`` (``p > 1``): ``(R_Y (x) I) @ U`` with unchanged ``alpha``."""
    if not p > 1:
        raise InvalidScale(f"scale factor must exceed 1, got {p}")
    scaler = tensor([rotation_encoding(p), identity_encoding(be.target_dim)])
    out = product(scaler, be)
    return replace(out, eps=be.eps / p)


def rescale_target(be: BlockEncoding, c: float) -> BlockEncoding:
    """Present the same circuit as an encoding of ``c * A`` (pure bookkeeping)."""
    if not c > 0:
        raise InvalidScale(f"rescale factor must be positive, got {c}")
    target = None if be.target is None else c * be.target
    return replace(be, alpha=be.alpha * c, eps=be.eps * c, target=target)


def narrow(be: BlockEncoding, target_dim: int) -> BlockEncoding:
    """Treat the outermost system qubits as extra ancillas.

    The new block is the top-left ``target_dim`` corner of the old one; the
    error bound carries over because a sub-block never has larger norm.
    """
    ratio, rem = divmod(be.target_dim, target_dim)
    if rem or not linalg.is_power_of_two(ratio):
        raise BadRegisterSplit(f"cannot narrow dimension {be.target_dim} to {target_dim}")
    extra = ratio.bit_length() - 1
    target = None if be.target is None else be.target[:target_dim, :target_dim]
    ledger = replace(be.ledger, ancilla_qubits=be.ledger.ancilla_qubits + extra)
    return BlockEncoding(be.unitary, be.alpha, be.ancillas + extra, be.eps, target_dim, ledger, target)


def swap_matrix(d: int) -> np.ndarray:
    """SWAP on two ``d``-dimensional registers."""
    s = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            s[j * d + i, i * d + j] = 1.0
    return s


def purify_density(prep, dim_a: int, dim_b: int, *, depth: float = 1.0) -> BlockEncoding:
    """Exact encoding of ``rho = Tr_A |Phi><Phi|`` with ``|Phi> = prep |0>_A |0>_B``.

    Circuit: ``(prep^dag (x) I) (I_A (x) SWAP_{B,B'}) (prep (x) I)`` on
    registers ``A, B`` (ancillas) and ``B'`` (system). Uses ``prep`` and its
    inverse once each.
    """
    prep = linalg.check_unitary(prep)
    if dim_a < 1 or dim_b < 1 or dim_a * dim_b != prep.shape[0]:
        raise BadRegisterSplit(f"{dim_a} x {dim_b} does not match prep dimension {prep.shape[0]}")
    a = _log2_exact(dim_a * dim_b, "ancilla")
    _log2_exact(dim_b, "system")
    phi = prep[:, 0].reshape(dim_a, dim_b)
    rho = phi.T @ np.conj(phi)
    ledger = ResourceLedger(circuit_depth=2 * depth + 1, ancilla_qubits=a, unitary_calls=2)
    d = dim_a * dim_b
    if d * dim_b <= MAX_EXPLICIT_DIM:
        left = np.kron(prep, np.eye(dim_b))
        sw = np.kron(np.eye(dim_a), swap_matrix(dim_b))
        u = linalg.dagger(left) @ sw @ left
        return BlockEncoding(u, 1.0, a, 0.0, dim_b, ledger, rho)
    return _from_block(rho, alpha=1.0, eps=0.0, ledger=ledger, target=rho)


def _pairs(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def to_json(be: BlockEncoding) -> str:
    """Debug dump: unitary as row-major ``[re, im]`` pairs plus metadata."""
    doc = {
        "alpha": be.alpha,
        "ancillas": be.ancillas,
        "eps": be.eps,
        "target_dim": be.target_dim,
        "ledger": be.ledger.to_dict(),
        "unitary": _pairs(be.unitary),
    }
    return json.dumps(doc)


def from_json(text: str) -> BlockEncoding:
    doc = json.loads(text)
    u = np.array([[complex(re, im) for re, im in row] for row in doc["unitary"]])
    return BlockEncoding(
        u, doc["alpha"], doc["ancillas"], doc["eps"], doc["target_dim"], ResourceLedger(**doc["ledger"])
    )
