import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maternk.derivs import richardson_derivative
from maternk.errors import NotPositiveDefinite, ValidationError
from maternk.gp import Dataset, _factor, assemble_cov, assemble_cov_and_grads, nll, nll_grad
from maternk.matern import MaternParams, matern_cov


def rel(a, b):
    return abs(a - b) / abs(b)


def random_data(n, seed, d=2):
    rng = np.random.default_rng(seed)
    return Dataset(rng.uniform(0, 10, (n, d)), rng.normal(size=n))


class TestScalar:
    def test_unit_variance(self):
        data = Dataset(np.array([[0.0, 0.0]]), np.array([2.0]))
        assert nll(MaternParams(1.0, 1.0, 0.5), data).value == pytest.approx(4.0, rel=1e-15)

    def test_scaled_variance(self):
        data = Dataset(np.array([[0.0, 0.0]]), np.array([2.0]))
        assert nll(MaternParams(2.0, 1.0, 0.5), data).value == pytest.approx(math.log(4.0) + 1.0, rel=1e-15)

    def test_scalar_gradient(self):
        # value = 2 log s + y^2 / s^2
        data = Dataset(np.array([[1.0]]), np.array([3.0]))
        g = nll_grad(MaternParams(1.5, 1.0, 0.5), data).gradient
        assert g[0] == pytest.approx(2 / 1.5 - 2 * 9 / 1.5**3, rel=1e-14)
        assert g[1] == 0.0 and g[2] == 0.0


def test_two_point_by_hand():
    data = Dataset(np.array([[0.0], [1.0]]), np.array([1.0, 2.0]))
    c = math.exp(-1.0)
    det = 1 - c * c
    expected = math.log(det) + (1 + 4 - 2 * c * 2) / det
    assert rel(nll(MaternParams(1.0, 1.0, 0.5), data).value, expected) < 1e-14


def test_one_dimensional_locations_accepted():
    data = Dataset(np.array([0.0, 1.0, 2.5]), np.array([0.1, 0.2, 0.3]))
    assert data.locations.shape == (3, 1)
    assert data.n == 3


def test_covariance_matrix():
    data = random_data(12, 1)
    p = MaternParams(1.3, 2.0, 1.1)
    s = assemble_cov(p, data.locations)
    assert np.array_equal(s, s.T)
    assert np.all(np.diag(s) == 1.3**2)
    j, k = 3, 7
    r = float(np.linalg.norm(data.locations[j] - data.locations[k]))
    assert s[j, k] == pytest.approx(matern_cov(p, r), rel=1e-15)


def test_gradient_matrices_symmetric():
    data = random_data(10, 2)
    sigma, dmats = assemble_cov_and_grads(MaternParams(1.0, 1.5, 0.9), data.locations)
    assert len(dmats) == 3
    for d in dmats:
        assert np.array_equal(d, d.T)
    assert np.all(np.diag(dmats[0]) == 2.0)
    assert np.all(np.diag(dmats[1]) == 0.0)


def test_matches_dense_formulas():
    data = random_data(8, 3)
    p = MaternParams(1.2, 1.4, 1.3)
    sigma, dmats = assemble_cov_and_grads(p, data.locations)
    y = data.observations
    inv = np.linalg.inv(sigma)
    value = np.linalg.slogdet(sigma)[1] + y @ inv @ y
    grad = [np.trace(inv @ d) - y @ inv @ d @ inv @ y for d in dmats]
    res = nll_grad(p, data)
    assert rel(res.value, value) < 1e-10
    np.testing.assert_allclose(res.gradient, grad, rtol=1e-10)
    assert res.value == pytest.approx(nll(p, data).value, rel=1e-14)


@pytest.mark.parametrize("seed", [0, 1])
def test_gradient_against_fd(seed):
    data = random_data(25, seed)
    p = MaternParams(1.1, 1.3, 0.75)
    g = nll_grad(p, data).gradient
    th = list(p.as_tuple())
    for j in range(3):
        def f(v, j=j):
            q = list(th)
            q[j] = v
            return nll(MaternParams(*q), data).value

        fd, _ = richardson_derivative(f, th[j], 0.02 * th[j])
        assert rel(g[j], fd) < 1e-6


@settings(max_examples=15)
@given(st.integers(0, 10_000))
def test_permutation_invariance(seed):
    data = random_data(15, 7)
    perm = np.random.default_rng(seed).permutation(data.n)
    shuffled = Dataset(data.locations[perm], data.observations[perm])
    p = MaternParams(0.9, 1.7, 1.6)
    a = nll_grad(p, data)
    b = nll_grad(p, shuffled)
    assert abs(a.value - b.value) <= 1e-12 * abs(a.value)
    np.testing.assert_allclose(a.gradient, b.gradient, rtol=1e-12)


class TestJitter:
    def test_well_conditioned_needs_none(self):
        assert nll(MaternParams(1.0, 1.0, 0.5), random_data(10, 4)).chol_jitter_used == 0.0

    @pytest.mark.parametrize("seed", range(5))
    def test_separated_points_need_none(self, seed):
        assert nll(MaternParams(1.0, 3.0, 2.9), random_data(40, seed)).chol_jitter_used == 0.0

    def test_near_duplicate_points_get_jitter(self):
        loc = np.array([[0.0], [1e-9], [1.0]])
        data = Dataset(loc, np.array([0.3, 0.31, -0.2]))
        res = nll(MaternParams(1.0, 3.0, 3.5), data)
        assert 0.0 < res.chol_jitter_used <= 1e-6
        assert math.isfinite(res.value)

    def test_indefinite_matrix_raises(self):
        # a Matern matrix is always rescued by jitter; an indefinite one is not
        with pytest.raises(NotPositiveDefinite):
            _factor(np.array([[1.0, 2.0], [2.0, 1.0]]), 1.0)


class TestDataset:
    def test_length_mismatch(self):
        with pytest.raises(ValidationError):
            Dataset(np.zeros((3, 2)), np.zeros(2))

    def test_duplicate_locations(self):
        with pytest.raises(ValidationError):
            Dataset(np.array([[0.0, 1.0], [0.0, 1.0]]), np.zeros(2))

    def test_non_finite(self):
        with pytest.raises(ValidationError):
            Dataset(np.array([[0.0], [1.0]]), np.array([1.0, math.nan]))

    def test_csv_round_trip(self, tmp_path):
        data = random_data(8, 5)
        path = tmp_path / "d.csv"
        data.to_csv(path)
        back = Dataset.from_csv(path)
        assert np.array_equal(back.locations, data.locations)
        assert np.array_equal(back.observations, data.observations)

    @pytest.mark.parametrize(
        "text, needle",
        [
            ("x_1,x_2,y\n0,0,1\n1,abc,2\n", "row 3"),
            ("x_1,x_2,y\n0,0,1\n1,2\n", "row 3"),
            ("x_1,x_2,z\n0,0,1\n", "header"),
            ("", "empty"),
            ("x_1,y\n", "no data"),
        ],
    )
    def test_malformed_csv(self, tmp_path, text, needle):
        path = tmp_path / "bad.csv"
        path.write_text(text)
        with pytest.raises(ValidationError, match=needle):
            Dataset.from_csv(path)
