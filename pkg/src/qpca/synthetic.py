"""Random test inputs with known spectra."""
from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    if n == 1:
        return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1))
    return unitary_group.rvs(n, random_state=rng)


def density_from_spectrum(values, rng: np.random.Generator | None = None, basis=None) -> np.ndarray:
    """``V diag(values) V^dag`` with ``V`` Haar random (or ``basis``, or the identity if no rng)."""
    values = np.asarray(values, dtype=float)
    if basis is None:
        basis = np.eye(len(values)) if rng is None else random_unitary(len(values), rng)
    rho = (basis * values) @ np.conj(basis).T
    return 0.5 * (rho + np.conj(rho).T)


def random_density(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = n if rank is None else rank
    values = np.zeros(n)
    values[:rank] = rng.dirichlet(np.ones(rank))
    return density_from_spectrum(values, rng)


def planted_spectrum(n: int, gap: float, rng: np.random.Generator) -> np.ndarray:
    """Descending probability vector with ``r1 - r2 = gap`` and a random tail below ``r2``."""
    if n == 1:
        return np.ones(1)
    if not 0 < gap < 1:
        raise ValueError("gap must lie in (0, 1)")
    if n == 2:
        r2 = (1 - gap) / 2
        return np.array([r2 + gap, r2])
    r2 = (1 - gap) * (1 / n + 1 / 2) / 2
    tail_mass = 1 - 2 * r2 - gap
    tail = tail_mass * rng.dirichlet(np.ones(n - 2))
    if tail.max() > r2:
        tail = np.full(n - 2, tail_mass / (n - 2))
    return np.concatenate([[r2 + gap, r2], np.sort(tail)[::-1]])


def clustered_dataset(n: int, n_points: int, n_clusters: int, rng: np.random.Generator, spread: float = 0.15):
    """Real points scattered around ``n_clusters`` random centres."""
    centres = rng.standard_normal((n_clusters, n))
    labels = np.arange(n_points) % n_clusters
    return centres[labels] + spread * rng.standard_normal((n_points, n))
