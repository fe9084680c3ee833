import numpy as np
import pytest

from qpca import synthetic

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_hermitian(rng, n, norm=None):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = (a + a.conj().T) / 2
    if norm is not None:
        h = h * (norm / np.linalg.norm(h, 2))
    return h


def random_density(rng, n):
    return synthetic.random_density(n, rng)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
