import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma

from tauward import theta as T
from tauward.errors import DegenerateImOmega, InvalidInput


def triple_product(z, tau, terms=60):
    # [DERIVED] Jacobi triple product for sum_n exp(pi i n^2 tau + 2 pi i n z)
    q = np.exp(1j * np.pi * tau)
    m = np.arange(1, terms + 1)
    return np.prod((1 - q ** (2 * m)) * (1 + 2 * q ** (2 * m - 1) * np.cos(2 * np.pi * z) + q ** (4 * m - 2)))


def test_theta_at_i():
    # [DERIVED] theta(0|i) = pi^{1/4} / Gamma(3/4)
    assert T.theta([0], [[1j]]) == pytest.approx(np.pi**0.25 / gamma(0.75), abs=1e-15)


@pytest.mark.parametrize("z,tau", [(0.3 + 0.2j, 1.3j + 0.2), (-0.1 + 0.4j, 0.8j - 0.4), (0.45, 2j)])
def test_genus_one_triple_product(z, tau):
    assert T.theta([z], [[tau]]) == pytest.approx(triple_product(z, tau), rel=1e-13)


def test_block_diagonal_factorises():
    Om = np.diag([1.1j + 0.1, 0.9j - 0.3])
    Z = [0.2 + 0.1j, -0.3 + 0.05j]
    assert T.theta(Z, Om) == pytest.approx(triple_product(Z[0], Om[0, 0]) * triple_product(Z[1], Om[1, 1]), rel=1e-13)


def test_period_matrix_validation():
    with pytest.raises(InvalidInput):
        T.PeriodMatrix([[1j, 0.1], [0.2, 1j]])
    with pytest.raises(InvalidInput):
        T.PeriodMatrix([[1j, 0], [0, -1j]])
    with pytest.raises(DegenerateImOmega):
        T.theta([0, 0], [[1j, 0], [0, 1e-10j]])


def test_load_theta_input():
    Om, Z, xi = T.load_theta_input(json.dumps({"Omega": [[[0, 1]]], "Z": [[0.1, 0.2]], "xi_a": [0.5], "xi_b": [0.5]}))
    assert Om.g == 1 and Z[0] == 0.1 + 0.2j and xi.xi_a[0] == 0.5
    with pytest.raises(InvalidInput):
        T.load_theta_input("{}")


def test_odd_characteristic_vanishes_at_zero():
    xi = T.Characteristics([0.5], [0.5])
    assert abs(T.theta_char(xi, [0], [[1.2j]])) < 1e-15


def test_derivatives_genus_one():
    z, tau, h = 0.3 + 0.2j, 1.3j + 0.2, 1e-4
    fd = (triple_product(z + h, tau) - triple_product(z - h, tau)) / (2 * h)
    assert T.theta_derivs([z], [[tau]], 1)[0] == pytest.approx(fd, rel=1e-7)
    # heat equation: d2 theta/dz2 = 4 pi i d theta/d tau
    d2 = T.theta_derivs([z], [[tau]], 2)[0, 0]
    dtau = (T.theta([z], [[tau + h]]) - T.theta([z], [[tau - h]])) / (2 * h)
    assert d2 == pytest.approx(4j * np.pi * dtau, rel=1e-7)


def test_truncation_radius_grows_with_tol():
    Om = T.as_period_matrix([[1j]])
    assert T.truncation_radius(Om, 1e-16) > T.truncation_radius(Om, 1e-8)


def test_modular_genus_two():
    Om = [[1j + 0.1, 0.2 + 0.1j], [0.2 + 0.1j, 1.5j]]
    assert T.modular_check([0.1 + 0.05j, -0.2 + 0.1j], Om) < 1e-8


def test_theta_checks_pass():
    assert all(c.passed for c in T.theta_checks([[1.3j + 0.2]], [0.3 + 0.2j]))
    Om = [[1j + 0.1, 0.2 + 0.1j], [0.2 + 0.1j, 1.5j]]
    assert all(c.passed for c in T.theta_checks(Om, [0.1 + 0.05j, -0.2 + 0.1j]))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 3))
def test_parity_periodicity(seed, g):
    rng = np.random.default_rng(seed)
    Om = T.random_period_matrix(g, rng)
    Z = rng.uniform(-0.5, 0.5, g) + 1j * rng.uniform(-0.3, 0.3, g)
    peak = np.exp(np.pi * Z.imag @ Om.Y @ Z.imag)
    assert T.parity_residual(Z, Om) <= 1e-12 * peak
    m = rng.integers(-3, 4, g)
    assert T.periodicity_residual(Z, Om, m) <= 1e-12 * peak


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 2))
def test_two_routes_agree(seed, g):
    rng = np.random.default_rng(seed)
    Om = T.random_period_matrix(g, rng)
    Z = rng.uniform(-0.5, 0.5, g) + 1j * rng.uniform(-0.3, 0.3, g)
    xi = T.Characteristics(rng.uniform(-1, 1, g), rng.uniform(-1, 1, g))
    a, b = T.theta_char(xi, Z, Om), T.theta_char_shifted(xi, Z, Om)
    scale = max(1.0, abs(b))
    assert abs(a - b) <= 1e-10 * scale
