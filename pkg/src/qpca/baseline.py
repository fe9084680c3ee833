"""Phase-estimation sampling model of the original QPCA and both cost models.

Phase estimation on ``exp(-i rho t)`` applied to ``rho`` leaves
``sum_i r_i |lambda_i><lambda_i| (x) |r~_i><r~_i|``; reading the phase
register yields outcome ``i`` with probability ``r_i``. The circuit is not
simulated; the outcome distribution stands in for it.

Cost formulas use natural logarithms and unit constants.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import linalg
from .errors import InvalidAccuracy, InvalidParameters, RankDeficient

MIN_T_BITS = 4
MAX_T_BITS = 24
CONVENTIONS = ("paper", "born")


@dataclass(frozen=True)
class SpectralSamplingModel:
    spectrum: linalg.Spectrum
    t_bits: int
    probabilities: np.ndarray
    estimates: np.ndarray

    @property
    def eps_pe(self) -> float:
        return 2.0 ** -self.t_bits

    def sample(self, draws: int, rng: np.random.Generator) -> np.ndarray:
        """Outcome indices of ``draws`` independent phase-register readings."""
        return rng.choice(len(self.probabilities), size=draws, p=self.probabilities)


def pe_distribution(rho, t_bits: int) -> SpectralSamplingModel:
    """Outcome ``i`` with probability ``r_i``, read out as ``r_i`` rounded to the ``t_bits`` grid."""
    if not MIN_T_BITS <= t_bits <= MAX_T_BITS:
        raise InvalidParameters(f"t_bits must lie in [{MIN_T_BITS}, {MAX_T_BITS}], got {t_bits}")
    spec = linalg.eigh(linalg.as_density(rho))
    probs = np.clip(spec.eigenvalues, 0.0, None)
    probs = probs / probs.sum()
    grid = 2.0**t_bits
    estimates = np.round(spec.eigenvalues * grid) / grid
    return SpectralSamplingModel(spec, t_bits, probs, estimates)


def default_t_bits(eps: float) -> int:
    return min(MAX_T_BITS, max(MIN_T_BITS, math.ceil(math.log2(1 / eps)) + 1))


def copies_per_shot(eps: float) -> int:
    """Copies of ``rho`` behind one phase-estimation reading (``t ~ 1/eps``)."""
    return math.ceil(1 / eps**3)


@dataclass(frozen=True)
class CostReport:
    method: str
    copies: float
    depth: float
    params: dict
    convention: str = "paper"
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.copies > 0 and self.depth > 0):
            raise InvalidParameters("costs must be positive")

    def to_row(self) -> dict:
        row = asdict(self)
        params = row.pop("params")
        extras = row.pop("extras")
        return {**row, **params, **extras}


@dataclass(frozen=True)
class SampledComponent:
    value: float
    vector: np.ndarray
    count: int
    frequency: float


def _stop_index(outcomes: np.ndarray, order_rank: np.ndarray, R: int, need: int, start: np.ndarray):
    """First draw after which the ``R`` largest observed outcomes each reach ``need`` counts."""
    n = len(start)
    onehot = np.zeros((len(outcomes), n), dtype=np.int64)
    onehot[np.arange(len(outcomes)), outcomes] = 1
    counts = start + np.cumsum(onehot, axis=0)
    by_value = counts[:, order_rank]
    seen = by_value > 0
    rank = np.cumsum(seen, axis=1)
    top = seen & (rank <= R)
    enough = (rank[:, -1] >= R) & np.all(~top | (by_value >= need), axis=1)
    hit = np.flatnonzero(enough)
    if hit.size:
        return int(hit[0]), counts[hit[0]]
    return None, counts[-1]


def sample_components(rho, eps: float, R: int, seed=None, *, t_bits: int | None = None):
    """Measure the phase register until the ``R`` largest readings each occur ``ceil(1/eps^2)`` times.

    Returns the top-``R`` components (by readout value) and a realized
    :class:`CostReport` charging ``copies_per_shot(eps)`` per reading.
    """
    if not 0 < eps < 1:
        raise InvalidAccuracy(f"eps must lie in (0, 1), got {eps}")
    rho = linalg.as_density(rho)
    t_bits = default_t_bits(eps) if t_bits is None else t_bits
    model = pe_distribution(rho, t_bits)
    support = int(np.sum(model.probabilities > 1e-12))
    if R < 1 or R > support:
        raise RankDeficient(f"asked for {R} components, rank is {support}")
    need = math.ceil(1 / eps**2)
    rng = np.random.default_rng(seed)
    n = len(model.probabilities)
    order = np.argsort(-model.estimates, kind="stable")
    counts = np.zeros(n, dtype=np.int64)
    draws = 0
    batch = max(1024, 4 * need * R)
    while True:
        outcomes = model.sample(batch, rng)
        stop, counts_now = _stop_index(outcomes, order, R, need, counts)
        if stop is not None:
            draws += stop + 1
            counts = counts_now
            break
        draws += batch
        counts = counts_now
    observed = [i for i in order if counts[i] > 0][:R]
    comps = [
        SampledComponent(float(model.estimates[i]), model.spectrum.vector(i), int(counts[i]), counts[i] / draws)
        for i in observed
    ]
    copies = draws * copies_per_shot(eps)
    report = CostReport(
        "original",
        float(copies),
        float(copies * max(math.log(n), 1.0)),
        {"eps": eps, "R": R, "n": n},
        "born",
        {"draws": draws},
    )
    return comps, report


def _positive(params, *names):
    for name in names:
        value = params.get(name)
        if value is None or not value > 0 or not math.isfinite(value):
            raise InvalidParameters(f"parameter {name} must be positive and finite, got {value}")


def cost_model(method: str, params: dict, convention: str = "paper") -> CostReport:
    """Analytic copies and depth with unit constants and natural logs.

    original: ``1 / (r^q eps^3)`` with ``r = r_min`` (``r_max`` when only
    that is given), ``q = 2`` under the ``paper`` convention (success
    probability ``r^2``) and ``q = 1`` under ``born`` (probability ``r``).
    new: ``((1/gamma^2) ln^2(1/eps) / eps^2)^R`` copies and
    ``R ln(n) ln^3(1/eps) / (gamma^3 eps^2)`` depth; the
    ``ln^2(1/eps)/eps^3`` depth form is reported in ``extras``.
    """
    if convention not in CONVENTIONS:
        raise InvalidParameters(f"unknown convention {convention!r}")
    params = dict(params)
    eps = params.get("eps")
    if eps is None or not 0 < eps < 1:
        raise InvalidParameters(f"eps must lie in (0, 1), got {eps}")
    R = int(params.setdefault("R", 1))
    if R < 1:
        raise InvalidParameters("R must be positive")
    n = params.setdefault("n", 2)
    _positive(params, "n")
    log_n = max(math.log(n), 1.0)
    log_e = math.log(1 / eps)
    if method == "original":
        r = params.get("r_min", params.get("r_max"))
        if r is None or not 0 < r <= 1:
            raise InvalidParameters(f"original method needs r_min or r_max in (0, 1], got {r}")
        q = 2 if convention == "paper" else 1
        copies = 1.0 / (r**q * eps**3)
        return CostReport("original", copies, copies * log_n, params, convention)
    if method == "new":
        _positive(params, "gamma")
        gamma = params["gamma"]
        single = log_e**2 / (gamma**2 * eps**2)
        copies = single**R
        depth = R * log_n * log_e**3 / (gamma**3 * eps**2)
        alt = R * log_n * log_e**2 / (gamma**3 * eps**3)
        return CostReport("new", copies, depth, params, convention, {"depth_alt": alt, "single_copies": single})
    raise InvalidParameters(f"unknown method {method!r}")


def crossover(params: dict, convention: str) -> str:
    """Which method needs fewer copies at this grid point."""
    orig = cost_model("original", params, convention).copies
    new = cost_model("new", params, convention).copies
    return "original" if orig < new else "new"
