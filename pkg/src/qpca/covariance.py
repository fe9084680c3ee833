"""Datasets and block encodings of their (centered) covariance matrices.

Points are normalized to quantum states on load. The weighted second moment
is ``rho_bar = sum_i p_i x_i x_i^dag`` and the centroid is
``mu = sum_i p_i x_i``, so the centered covariance is ``rho_bar - mu mu^dag``.
Both preparation routes produce an ``alpha = 2`` encoding whose block is
``(pi/8)(rho_bar - mu mu^dag)``.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import linalg, qsvt
from .blockenc import (
    BlockEncoding,
    ResourceLedger,
    encode_self,
    lcu,
    narrow,
    purify_density,
    scale_down,
)
from .errors import (
    EmptyDataset,
    InvalidAccuracy,
    InvalidParameters,
    NegativeWeight,
    NotUnitNorm,
    ParseError,
    WeightSumZero,
)


@dataclass(frozen=True)
class Dataset:
    points: np.ndarray
    weights: np.ndarray
    raw_norms: np.ndarray
    raw_dim: int

    def __post_init__(self):
        if abs(self.weights.sum() - 1) > 1e-12:
            raise WeightSumZero(f"weights sum to {self.weights.sum()}")
        norms = np.linalg.norm(self.points, axis=1)
        if np.any(np.abs(norms - 1) > 1e-10):
            raise NotUnitNorm("dataset points must be unit vectors")

    @property
    def n(self) -> int:
        return self.points.shape[1]

    @property
    def N(self) -> int:
        return self.points.shape[0]


def _next_power_of_two(d: int) -> int:
    return 1 << max(0, (d - 1).bit_length())


def dataset_from_rows(rows, weights=None) -> Dataset:
    """Normalize, zero-pad to a power-of-two dimension and normalize weights."""
    rows = np.asarray(rows, dtype=complex)
    if rows.ndim != 2 or rows.shape[0] == 0 or rows.shape[1] == 0:
        raise EmptyDataset("dataset has no points")
    count, dim = rows.shape
    norms = np.linalg.norm(rows, axis=1)
    for i, norm in enumerate(norms):
        if norm == 0 or not np.isfinite(norm):
            raise ParseError("data vector has zero or non-finite norm", row=i + 1)
    n = _next_power_of_two(dim)
    points = np.zeros((count, n), dtype=complex)
    points[:, :dim] = rows / norms[:, None]
    if weights is None:
        w = np.full(count, 1.0 / count)
    else:
        w = np.asarray(weights, dtype=float)
        if np.any(w < 0):
            raise NegativeWeight(f"negative weight at row {int(np.argmax(w < 0)) + 1}")
        total = w.sum()
        if total <= 0:
            raise WeightSumZero("weights sum to zero")
        w = w / total
    return Dataset(points, w, norms, dim)


def _parse_field(text: str, row: int, col: int) -> complex:
    text = text.strip()
    try:
        if ":" in text:
            re_part, im_part = text.split(":", 1)
            return complex(float(re_part), float(im_part))
        return complex(float(text), 0.0)
    except ValueError:
        raise ParseError(f"cannot parse {text!r}", row=row, column=col) from None


def _is_header(fields) -> bool:
    for f in fields:
        try:
            float(f.split(":")[0])
            return False
        except ValueError:
            continue
    return True


def load_dataset(path, weight_mode: str = "uniform") -> Dataset:
    """Read one data point per CSV row; fields are reals or ``re:im`` pairs.

    ``weight_mode="column"`` takes the last column as an unnormalized
    nonnegative weight. A first row with no numeric field is a header.
    """
    if weight_mode not in ("uniform", "column"):
        raise InvalidParameters(f"unknown weight mode {weight_mode!r}")
    with open(Path(path), newline="") as fh:
        raw = [r for r in csv.reader(fh) if any(f.strip() for f in r)]
    if raw and _is_header(raw[0]):
        raw = raw[1:]
        offset = 2
    else:
        offset = 1
    if not raw:
        raise EmptyDataset(f"{path} holds no data rows")
    width = len(raw[0])
    values, weights = [], []
    for i, fields in enumerate(raw):
        row = i + offset
        if len(fields) != width:
            raise ParseError(f"expected {width} fields, got {len(fields)}", row=row)
        parsed = [_parse_field(f, row, j + 1) for j, f in enumerate(fields)]
        if weight_mode == "column":
            if width < 2:
                raise ParseError("weight column needs at least one data column", row=row)
            w = parsed.pop()
            if w.imag != 0:
                raise ParseError("weight must be real", row=row, column=width)
            if w.real < 0:
                raise NegativeWeight(f"negative weight {w.real} at row {row}")
            weights.append(w.real)
        values.append(parsed)
    return dataset_from_rows(values, weights if weight_mode == "column" else None)


def centroid(ds: Dataset) -> np.ndarray:
    return ds.weights @ ds.points


def second_moment(ds: Dataset) -> np.ndarray:
    """``rho_bar = sum_i p_i x_i x_i^dag``."""
    rho = (ds.points.T * ds.weights) @ np.conj(ds.points)
    return 0.5 * (rho + linalg.dagger(rho))


def covariance_classical(ds: Dataset, centered: bool = True) -> np.ndarray:
    rho = second_moment(ds)
    if not centered:
        return rho
    mu = centroid(ds)
    return rho - np.outer(mu, np.conj(mu))


def state_prep_unitary(x) -> np.ndarray:
    """Unitary whose first column is the unit vector ``x``."""
    x = np.asarray(x, dtype=complex).ravel()
    if abs(np.linalg.norm(x) - 1) > 1e-10:
        raise NotUnitNorm(f"state has norm {np.linalg.norm(x)}")
    return linalg.householder_unitary(x)


def _prep_depth(n: int) -> float:
    return max(1.0, math.log2(n))


def mean_encoding(ds: Dataset) -> BlockEncoding:
    """Exact encoding of ``mu mu^dag``.

    ``U_p = sum_i p_i U_i`` is an LCU of the state-preparation unitaries;
    purifying ``U_p |0>`` on the full register gives ``|Phi><Phi|``, whose
    ancilla-zero corner is ``mu mu^dag``.
    """
    preps = [encode_self(state_prep_unitary(x), depth=_prep_depth(ds.n)) for x in ds.points]
    u_p = lcu(ds.weights, preps)
    full = u_p.unitary.shape[0]
    be = purify_density(u_p.unitary, 1, full, depth=u_p.ledger.circuit_depth)
    be = narrow(be, ds.n)
    mu = centroid(ds)
    ledger = be.ledger + ResourceLedger(ancilla_qubits=u_p.ledger.ancilla_qubits)
    return replace(be, ledger=ledger).with_target(np.outer(mu, np.conj(mu)))


def second_moment_encoding(ds: Dataset) -> BlockEncoding:
    """Exact encoding of ``rho_bar``: LCU of purified data states."""
    parts = [purify_density(state_prep_unitary(x), 1, ds.n, depth=_prep_depth(ds.n)) for x in ds.points]
    return lcu(ds.weights, parts).with_target(second_moment(ds))


@dataclass(frozen=True)
class CovarianceBundle:
    centroid: np.ndarray
    rho_bar: np.ndarray
    centered_target: np.ndarray
    encoding: BlockEncoding
    route: str
    ledger: ResourceLedger

    def to_json(self) -> str:
        spec = linalg.eigh(self.centered_target)
        doc = {
            "route": self.route,
            "centroid": [[float(z.real), float(z.imag)] for z in self.centroid],
            "target_spectrum": [float(v) for v in spec.eigenvalues],
            "alpha": self.encoding.alpha,
            "eps": self.encoding.eps,
            "ledger": self.ledger.to_dict(),
        }
        return json.dumps(doc, indent=2)


def covariance_encoding(ds: Dataset, route: str = "B", eps: float | None = None, *, c_dme: float = 1.0) -> CovarianceBundle:
    """Encoding of ``(pi/4)(rho_bar - mu mu^dag)`` with ``alpha = 2``.

    Route ``B`` purifies every data point and is exact. Route ``A`` feeds
    copies of ``rho_bar`` through the density pipeline (sample-faithful DME)
    and is ``eps``-accurate.
    """
    rho_bar = second_moment(ds)
    mu = centroid(ds)
    target = rho_bar - np.outer(mu, np.conj(mu))
    mean = scale_down(mean_encoding(ds), 4 / math.pi)
    if route == "B":
        moment = scale_down(second_moment_encoding(ds), 4 / math.pi)
    elif route == "A":
        if eps is None or not 0 < eps < 0.5:
            raise InvalidAccuracy(f"route A needs eps in (0, 1/2), got {eps}")
        moment = qsvt.block_encode_density(rho_bar, eps, mode="sample", c_dme=c_dme)
    else:
        raise InvalidParameters(f"unknown route {route!r}")
    enc = lcu([1.0, 1.0], [moment, mean], [1, -1]).with_target(math.pi / 4 * target)
    return CovarianceBundle(mu, rho_bar, target, enc, route, enc.ledger)
