import math

import numpy as np
import pytest

from qpca import covariance, linalg, power, synthetic
from qpca.blockenc import extract_block
from qpca.errors import EmptyDataset, NegativeWeight, NotUnitNorm, ParseError, WeightSumZero

E0, E1 = np.array([1.0, 0.0]), np.array([0.0, 1.0])


def write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


def random_dataset(rng, n, count):
    rows = rng.normal(size=(count, n)) + 1j * rng.normal(size=(count, n))
    return covariance.dataset_from_rows(rows, rng.uniform(0.1, 1.0, count))


def test_load_repeated_basis_vector(tmp_path):
    ds = covariance.load_dataset(write(tmp_path, "1,0\n2,0\n3,0\n0.5,0\n"))
    assert ds.N == 4 and np.allclose(ds.points, [[1, 0]] * 4)
    assert np.allclose(ds.raw_norms, [1, 2, 3, 0.5])


def test_load_orthogonal_pair(tmp_path):
    ds = covariance.load_dataset(write(tmp_path, "x,y\n1,0\n0,1\n"))
    assert np.allclose(ds.weights, [0.5, 0.5])
    assert np.allclose(covariance.centroid(ds), [0.5, 0.5])


def test_load_pads_to_power_of_two(tmp_path):
    ds = covariance.load_dataset(write(tmp_path, "1,2,2\n0,3,4\n"))
    assert ds.n == 4 and ds.raw_dim == 3
    assert np.allclose(ds.raw_norms, [3, 5]) and np.allclose(ds.points[:, 3], 0)


def test_load_complex_fields_and_weights(tmp_path):
    ds = covariance.load_dataset(write(tmp_path, "1:1,0,3\n0,0:2,1\n"), "column")
    assert np.allclose(ds.weights, [0.75, 0.25])
    assert np.allclose(ds.points[0], [(1 + 1j) / math.sqrt(2), 0])
    assert np.allclose(ds.points[1], [0, 1j])


@pytest.mark.parametrize(
    "text, mode, error",
    [
        ("", "uniform", EmptyDataset),
        ("a,b\n", "uniform", EmptyDataset),
        ("1,0\n0,0\n", "uniform", ParseError),
        ("1,0\n0,x\n", "uniform", ParseError),
        ("1,0\n0,1,2\n", "uniform", ParseError),
        ("1,0,1\n0,1,-1\n", "column", NegativeWeight),
        ("1,0,0\n0,1,0\n", "column", WeightSumZero),
    ],
)
def test_load_errors(tmp_path, text, mode, error):
    with pytest.raises(error):
        covariance.load_dataset(write(tmp_path, text), mode)


def test_parse_error_carries_position(tmp_path):
    with pytest.raises(ParseError) as info:
        covariance.load_dataset(write(tmp_path, "h1,h2\n1,0\n0,oops\n"))
    assert info.value.row == 3 and info.value.column == 2


def test_centroid_examples():
    x = np.array([0.6, 0.8j])
    assert np.allclose(covariance.centroid(covariance.dataset_from_rows([x])), x)
    pair = covariance.dataset_from_rows([E0, E1])
    assert np.linalg.norm(covariance.centroid(pair)) ** 2 == pytest.approx(0.5)
    degenerate = covariance.dataset_from_rows([E0, E1], weights=[1.0, 0.0])
    assert np.allclose(covariance.centroid(degenerate), E0)


def test_classical_covariance_examples():
    single = covariance.dataset_from_rows([[0.6, 0.8]])
    assert np.allclose(covariance.covariance_classical(single), 0)
    pair = covariance.dataset_from_rows([E0, E1])
    assert np.allclose(covariance.covariance_classical(pair, centered=False), np.eye(2) / 2)
    assert np.allclose(covariance.covariance_classical(pair), np.eye(2) / 2 - 0.25)


@pytest.mark.parametrize("seed", range(5))
def test_covariance_is_psd_with_known_trace(seed):
    rng = np.random.default_rng(seed)
    ds = random_dataset(rng, 8, 6)
    cov = covariance.covariance_classical(ds)
    mu = covariance.centroid(ds)
    assert linalg.eigh(cov).eigenvalues.min() >= -1e-9
    assert np.trace(cov).real == pytest.approx(1 - np.linalg.norm(mu) ** 2, abs=1e-9)
    assert np.trace(linalg.as_density(covariance.second_moment(ds))).real == pytest.approx(1.0)


def test_state_prep_examples(rng):
    assert np.allclose(covariance.state_prep_unitary(E0), np.eye(2))
    u = covariance.state_prep_unitary(E1)
    assert np.allclose(u[:, 0], E1) and linalg.unitary_defect(u) <= 1e-12
    x = rng.normal(size=8) + 1j * rng.normal(size=8)
    x /= np.linalg.norm(x)
    u = covariance.state_prep_unitary(x)
    assert np.linalg.norm(u[:, 0] - x) <= 1e-12
    assert np.linalg.norm(u.conj().T @ u - np.eye(8)) <= 1e-10
    with pytest.raises(NotUnitNorm):
        covariance.state_prep_unitary(np.array([1.0, 1.0]))


def test_mean_encoding_examples(rng):
    x = np.array([0.6, 0.8j])
    single = covariance.mean_encoding(covariance.dataset_from_rows([x]))
    assert np.allclose(single.represented, np.outer(x, x.conj()), atol=1e-12)
    pair = covariance.mean_encoding(covariance.dataset_from_rows([E0, E1]))
    assert np.allclose(extract_block(pair), 0.25, atol=1e-12)
    ds = random_dataset(rng, 4, 5)
    mu = covariance.centroid(ds)
    be = covariance.mean_encoding(ds)
    assert np.linalg.norm(be.represented - np.outer(mu, mu.conj())) <= 1e-10
    assert be.ledger.circuit_depth >= ds.N


def test_centroid_recovered_from_mean_block(rng):
    ds = random_dataset(rng, 8, 7)
    spec = linalg.eigh(covariance.mean_encoding(ds).represented)
    mu_hat = math.sqrt(spec.eigenvalues[0]) * spec.vector(0)
    mu = covariance.centroid(ds)
    assert linalg.phase_distance(mu_hat / np.linalg.norm(mu_hat), mu / np.linalg.norm(mu)) * np.linalg.norm(mu) <= 1e-8
    assert np.linalg.norm(mu_hat) == pytest.approx(np.linalg.norm(mu), abs=1e-8)


def test_route_b_pair():
    ds = covariance.dataset_from_rows([E0, E1])
    bundle = covariance.covariance_encoding(ds, "B")
    want = math.pi / 8 * (np.eye(2) / 2 - 0.25)
    assert np.linalg.norm(extract_block(bundle.encoding) - want) <= 1e-10
    assert bundle.encoding.alpha == 2.0 and bundle.route == "B"


def test_route_a_matches_route_b():
    ds = covariance.dataset_from_rows([E0, E1])
    a = covariance.covariance_encoding(ds, "A", 1e-2)
    b = covariance.covariance_encoding(ds, "B")
    assert np.linalg.norm(extract_block(a.encoding) - extract_block(b.encoding), 2) <= 1e-2


@pytest.mark.parametrize("route", ["A", "B"])
def test_concentrated_dataset_has_zero_covariance(route):
    x = np.array([0.6, 0.8])
    ds = covariance.dataset_from_rows([x, x, x])
    bundle = covariance.covariance_encoding(ds, route, 1e-2)
    assert np.linalg.norm(extract_block(bundle.encoding), 2) <= 1e-2


@pytest.mark.parametrize("seed", range(6))
def test_route_b_oracle_equivalence(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.choice([2, 4, 8, 16]))
    ds = random_dataset(rng, n, int(rng.integers(1, 13)))
    bundle = covariance.covariance_encoding(ds, "B")
    got = 8 / math.pi * extract_block(bundle.encoding)
    assert np.linalg.norm(got - covariance.covariance_classical(ds)) <= 1e-9


def test_route_a_converges(rng):
    ds = random_dataset(rng, 4, 5)
    b = extract_block(covariance.covariance_encoding(ds, "B").encoding)
    for eps in (1e-1, 1e-2, 1e-3):
        a = extract_block(covariance.covariance_encoding(ds, "A", eps).encoding)
        assert np.linalg.norm(a - b, 2) <= eps


def test_route_depths(rng):
    ds = random_dataset(rng, 4, 6)
    a = covariance.covariance_encoding(ds, "A", 1e-2).ledger.circuit_depth
    b = covariance.covariance_encoding(ds, "B").ledger.circuit_depth
    assert b >= ds.N and a > b


def test_route_a_needs_eps(rng):
    ds = random_dataset(rng, 2, 2)
    with pytest.raises(ValueError):
        covariance.covariance_encoding(ds, "A")
    with pytest.raises(ValueError):
        covariance.covariance_encoding(ds, "C")


def test_bundle_json_round_trip(rng):
    import json

    bundle = covariance.covariance_encoding(random_dataset(rng, 4, 3), "B")
    doc = json.loads(bundle.to_json())
    assert doc["route"] == "B" and len(doc["target_spectrum"]) == 4 and doc["alpha"] == 2.0


def test_pca_on_route_b(rng):
    points = synthetic.clustered_dataset(8, 10, 2, rng)
    ds = covariance.dataset_from_rows(points)
    bundle = covariance.covariance_encoding(ds, "B")
    truth = linalg.eigh(bundle.centered_target)
    found = power.qpca_components(power.FixedEncoding(bundle.encoding), 1, 1e-2)
    c = found.components[0]
    assert abs(c.value - truth.eigenvalues[0]) <= 1e-2
    assert abs(np.vdot(truth.vector(0), c.vector)) >= 0.99
