"""The acceptance suite: ten oracle-checked criteria with runtime budgets.

Each criterion returns a :class:`CriterionResult`; :func:`run` executes a
filtered subset and is shared by ``qpca validate`` and the pytest suite.
"""
from __future__ import annotations

import json
import math
import os
import tempfile
import time
from dataclasses import dataclass, field

import numpy as np

from . import baseline, blockenc, covariance, dme, linalg, power, qsvt, synthetic

DEFAULT_SEED = 20240


@dataclass
class CriterionResult:
    number: int
    name: str
    tag: str
    passed: bool
    seconds: float
    budget: float
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d} {self.name} ({self.seconds:.2f}s / {self.budget:.0f}s budget)"


def _slope(x, y) -> float:
    return float(np.polyfit(np.asarray(x, float), np.asarray(y, float), 1)[0])


def dme_convergence(rng):
    rho = synthetic.random_density(4, rng)
    steps = [8, 16, 32, 64, 128, 256, 512]
    errors = [dme.exponentiate_density(rho, 0.5, n_steps=n).empirical_error for n in steps]
    slope = _slope(np.log(steps), np.log(errors))
    return -1.25 <= slope <= -0.75, {"slope": slope, "errors": errors}


def _random_encoding(rng, n, eps):
    """Encoding of a random operator with norm <= alpha and a target off by ``eps``."""
    kind = rng.integers(3)
    if kind == 0:
        be = blockenc.encode_self(synthetic.random_unitary(n, rng))
    elif kind == 1:
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        a = a / (1.2 * linalg.spectral_norm(a))
        be = blockenc._from_block(a, alpha=1.0, eps=0.0, ledger=blockenc.ResourceLedger(ancilla_qubits=1))
    else:
        prep = synthetic.random_unitary(n * n, rng)
        be = blockenc.purify_density(prep, n, n)
    alpha = float(rng.uniform(1.0, 3.0))
    be = blockenc.rescale_target(be, alpha)
    target = be.represented
    if eps > 0:
        e = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        target = target + eps * e / linalg.spectral_norm(e)
    return blockenc.replace(be, eps=eps, target=target)


def _combinator_case(rng):
    op = ["product", "lcu", "tensor", "scale_down", "power", "purify"][rng.integers(6)]
    exact = bool(rng.integers(2))
    eps = 0.0 if exact else float(10 ** rng.uniform(-4, -1))
    if op == "tensor":
        dims = [2, 2] if rng.integers(2) else [2, 4]
        bes = [_random_encoding(rng, d, eps) for d in dims]
        out = blockenc.tensor(bes)
    elif op == "purify":
        da, db = int(2 ** rng.integers(0, 3)), int(2 ** rng.integers(1, 4))
        prep = synthetic.random_unitary(da * db, rng)
        out = blockenc.purify_density(prep, da, db)
        eps = 0.0
    else:
        n = int(2 ** rng.integers(1, 5))
        if op == "product":
            out = blockenc.product(_random_encoding(rng, n, eps), _random_encoding(rng, n, eps))
        elif op == "power":
            out = blockenc.power(_random_encoding(rng, n, eps), int(rng.integers(1, 5)))
        elif op == "scale_down":
            out = blockenc.scale_down(_random_encoding(rng, n, eps), float(rng.uniform(1.1, 5)))
        else:
            m = int(rng.integers(1, 5))
            bes = [_random_encoding(rng, n, eps) for _ in range(m)]
            out = blockenc.lcu(rng.uniform(0.1, 2, m), bes, rng.choice([1, -1], m))
    err = out.target_error()
    defect = linalg.unitary_defect(out.unitary)
    bound = 1e-10 if eps == 0 else out.eps + 1e-9
    return op, eps == 0, err, out.eps, err <= bound and defect <= 1e-9 * math.sqrt(out.dim)


def block_algebra(rng):
    cases = [_combinator_case(rng) for _ in range(200)]
    failures = [c[:4] for c in cases if not c[4]]
    worst_exact = max((c[2] for c in cases if c[1]), default=0.0)
    return not failures, {"cases": len(cases), "failures": failures[:5], "worst_exact_error": worst_exact}


def log_unitary_recovery(rng):
    eps_grid = [1e-2, 1e-3, 1e-4]
    modes = [("oracle", "oracle"), ("oracle", "polynomial"), ("sample", "polynomial")]
    worst = 0.0
    ok = True
    for _ in range(20):
        n = int(2 ** rng.integers(1, 5))
        rho = synthetic.random_density(n, rng)
        for eps in eps_grid:
            for mode, log_mode in modes:
                be = qsvt.block_encode_density(rho, eps, mode=mode, log_mode=log_mode)
                err = linalg.spectral_norm(blockenc.extract_block(be) - math.pi * rho / 4)
                worst = max(worst, err / eps)
                ok &= err <= eps
    grid = [10.0**-k for k in range(2, 9)]
    degrees = [qsvt.arcsin_poly(e).degree for e in grid]
    logs = np.log(1 / np.array(grid))
    slope = _slope(logs, degrees)
    linear = all(d <= 2 * lg + 3 for d, lg in zip(degrees, logs))
    return ok and linear, {"worst_error_over_eps": worst, "degrees": degrees, "degree_slope": slope}


def top_eigenpair(rng):
    eps = 1e-2
    runs = failures = 0
    worst = 0.0
    for n in (4, 8, 16):
        for gap in (0.1, 0.2, 0.4):
            for s in range(20):
                rho = synthetic.density_from_spectrum(synthetic.planted_spectrum(n, gap, rng), rng)
                spec = linalg.eigh(rho)
                est = power.qpca_top(power.DensitySource(rho), eps, seed=int(rng.integers(2**62)))
                err = max(abs(est.value - spec.eigenvalues[0]), linalg.phase_distance(est.vector, spec.vector(0)))
                worst = max(worst, err)
                runs += 1
                failures += int(err > eps)
    return failures == 0, {"runs": runs, "failures": failures, "worst_error": worst}


def components(rng):
    eps = 1e-2
    values = [0.5, 0.3, 0.15, 0.05]
    rho = synthetic.density_from_spectrum(values, rng)
    spec = linalg.eigh(rho)
    found = power.qpca_components(power.DensitySource(rho), 3, eps)
    errs = [
        max(abs(c.value - spec.eigenvalues[i]), linalg.phase_distance(c.vector, spec.vector(i)))
        for i, c in enumerate(found.components)
    ]
    v = found.vectors
    ortho = float(np.max(np.abs(np.conj(v).T @ v - np.eye(3))))
    return max(errs) <= eps and ortho <= 2 * eps, {
        "values": found.values.tolist(),
        "errors": errs,
        "orthogonality": ortho,
        "rho_copies": found.total_ledger.rho_copies,
    }


def ledger_scaling(rng):
    basis = synthetic.random_unitary(4, rng)
    rho = synthetic.density_from_spectrum([0.5, 0.25, 0.15, 0.1], basis=basis)
    eps_grid = [1e-3, 1e-4, 1e-5, 1e-6]
    copies = [power.qpca_top(power.DensitySource(rho, log_mode="oracle"), e).ledger.rho_copies for e in eps_grid]
    eps_slope = _slope(np.log(1 / np.array(eps_grid)), np.log(copies))
    gaps = [0.05, 0.1, 0.2, 0.4]
    gap_copies = []
    for g in gaps:
        r = synthetic.density_from_spectrum(synthetic.planted_spectrum(4, g, rng), basis=basis)
        gap_copies.append(power.qpca_top(power.DensitySource(r, log_mode="oracle"), 1e-3).ledger.rho_copies)
    gap_slope = _slope(np.log(1 / np.array(gaps)), np.log(gap_copies))
    ok = abs(eps_slope - 2) <= 0.3 and abs(gap_slope - 2) <= 0.4
    return ok, {"eps_slope": eps_slope, "gap_slope": gap_slope, "copies_vs_eps": copies, "copies_vs_gap": gap_copies}


def _random_dataset(rng):
    n = int(rng.integers(2, 17))
    count = int(rng.integers(1, 13))
    rows = rng.standard_normal((count, n)) + 1j * rng.integers(2) * rng.standard_normal((count, n))
    return covariance.dataset_from_rows(rows, rng.uniform(0.1, 1.0, count))


def covariance_routes(rng):
    worst_b = 0.0
    for _ in range(50):
        ds = _random_dataset(rng)
        bundle = covariance.covariance_encoding(ds, "B")
        want = math.pi / 8 * covariance.covariance_classical(ds, centered=True)
        worst_b = max(worst_b, linalg.spectral_norm(bundle.encoding.block - want))
    ds = covariance.dataset_from_rows(rng.standard_normal((6, 8)))
    route_b = covariance.covariance_encoding(ds, "B").encoding.block
    gaps = {}
    for eps in (1e-1, 1e-2, 1e-3):
        gaps[eps] = linalg.spectral_norm(covariance.covariance_encoding(ds, "A", eps).encoding.block - route_b)
    ok = worst_b <= 1e-9 and all(d <= e for e, d in gaps.items())
    return ok, {"route_b_worst": worst_b, "route_a_distance": {str(k): v for k, v in gaps.items()}}


def end_to_end_pca(rng):
    from . import cli

    points = synthetic.clustered_dataset(8, 12, 3, rng)
    ds = covariance.dataset_from_rows(points)
    spec = linalg.eigh(covariance.covariance_classical(ds, centered=True))
    with tempfile.TemporaryDirectory() as tmp:
        data = os.path.join(tmp, "clusters.csv")
        out = os.path.join(tmp, "report.json")
        np.savetxt(data, points, delimiter=",")
        code = cli.main(["analyze", "--data", data, "--route", "B", "--R", "2", "--eps", "1e-2", "--out", out])
        if code != 0:
            return False, {"exit_code": code}
        with open(out) as fh:
            report = json.load(fh)
    overlaps = []
    for i, comp in enumerate(report["components"]):
        v = np.array([complex(re, im) for re, im in comp["vector"]])
        overlaps.append(float(abs(np.vdot(spec.vector(i), v))))
    return len(overlaps) == 2 and min(overlaps) >= 0.99, {"overlaps": overlaps, "oracle": spec.eigenvalues[:2].tolist()}


def sampler_fidelity(rng):
    draws = 100_000
    worst = 0.0
    for _ in range(3):
        rho = synthetic.random_density(8, rng)
        model = baseline.pe_distribution(rho, 12)
        freq = np.bincount(model.sample(draws, rng), minlength=8) / draws
        r = model.probabilities
        sigma = np.sqrt(r * (1 - r) / draws)
        z = np.abs(freq - r) / np.where(sigma > 0, sigma, 1.0)
        worst = max(worst, float(np.max(z)))
    return worst <= 3.0, {"worst_z": worst}


def regime_crossover(rng):
    rows = []
    ok = True
    for conv in baseline.CONVENTIONS:
        for R in (2, 3, 4, 6, 8):
            for eps in (0.1, 0.05, 0.02, 0.01, 0.005):
                p = {"R": R, "eps": eps, "gamma": eps, "r_min": 1.0 / R, "n": 64}
                win = baseline.crossover(p, conv)
                rows.append(("uniform", conv, R, eps, win))
                ok &= win == "original"
        for gamma in (0.5, 0.6, 0.7, 0.8, 0.9):
            for r_min in (1e-4, 1e-5, 1e-6, 1e-7, 1e-8):
                p = {"R": 2, "eps": 0.1, "gamma": gamma, "r_min": r_min, "n": 64}
                win = baseline.crossover(p, conv)
                rows.append(("gapped", conv, gamma, r_min, win))
                ok &= win == "new"
    return ok, {"grid_points": len(rows), "losers": [r for r in rows if r[-1] != ("original" if r[0] == "uniform" else "new")]}


CRITERIA = [
    (1, "DME convergence law", "dme", 10, dme_convergence),
    (2, "block-encoding algebra", "blockenc", 30, block_algebra),
    (3, "log-unitary recovery of pi rho/4", "qsvt", 60, log_unitary_recovery),
    (4, "top eigenpair", "power", 60, top_eigenpair),
    (5, "R components via deflation", "power", 60, components),
    (6, "ledger scaling", "power", 120, ledger_scaling),
    (7, "covariance routes", "covariance", 60, covariance_routes),
    (8, "end-to-end PCA with centering", "cli", 60, end_to_end_pca),
    (9, "baseline sampler fidelity", "baseline", 10, sampler_fidelity),
    (10, "regime crossover", "baseline", 5, regime_crossover),
]


def select(only=None):
    if not only:
        return list(CRITERIA)
    wanted = {str(o) for o in only}
    return [c for c in CRITERIA if str(c[0]) in wanted or c[2] in wanted]


def run_one(entry, seed: int = DEFAULT_SEED) -> CriterionResult:
    number, name, tag, budget, fn = entry
    rng = np.random.default_rng([seed, number])
    start = time.perf_counter()
    passed, detail = fn(rng)
    seconds = time.perf_counter() - start
    passed = bool(passed) and seconds < budget
    return CriterionResult(number, name, tag, passed, seconds, budget, detail)


def run(only=None, seed: int = DEFAULT_SEED, echo=None) -> list[CriterionResult]:
    results = []
    for entry in select(only):
        res = run_one(entry, seed)
        if echo:
            echo(res.line())
        results.append(res)
    return results
