import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tauward import partition as P
from tauward.errors import InvalidInput, LatticePoint, OnThetaDivisor, VerificationError, WindowTooSmall
from tauward.theta import Characteristics, PeriodMatrix, random_period_matrix

from test_theta import triple_product

OMEGA2 = [[1j + 0.1, 0.2 + 0.1j], [0.2 + 0.1j, 1.5j]]
INP2 = P.InstantonInput(PeriodMatrix(OMEGA2), Characteristics([0.2, -0.1], [0.3, 0.05]))


def test_genus_one_against_triple_product():
    # [DERIVED] 2^{1/2} (Im tau)^{1/2} |exp(pi i a^2 tau + 2 pi i a b) theta(a tau + b|tau)|^2
    tau, a, b = 1.2j + 0.3, 0.2, -0.35
    th = np.exp(1j * np.pi * a * a * tau + 2j * np.pi * a * b) * triple_product(a * tau + b, tau)
    expected = np.sqrt(2 * tau.imag) * abs(th) ** 2
    inp = P.InstantonInput(PeriodMatrix([[tau]]), Characteristics([a], [b]))
    assert P.zinst_primitive(inp) == pytest.approx(expected, rel=1e-12)


def test_displayed_inverse_matches_effective_q():
    Q, _ = P.qa_matrices(INP2)
    assert np.abs(np.linalg.inv(Q) - P.displayed_q_inverse(OMEGA2)).max() < 1e-12


def test_literal_q_is_rank_deficient():
    Q, _ = P.qa_matrices(INP2, literal=True)
    assert np.linalg.matrix_rank(Q, tol=1e-10) == INP2.g


def test_closed_form_readings():
    r = P.closed_form_readings(INP2)
    assert r["bilinear"] == pytest.approx(r["theta_char"], rel=1e-12)
    assert abs(r["hermitian"] - r["theta_char"]) > 1e-3


def test_triple_agreement_and_symmetry():
    checks = P.instanton_checks(INP2)
    assert all(c.passed for c in checks)


def test_from_Z_round_trip():
    inp = P.InstantonInput.from_Z(OMEGA2, INP2.Z)
    assert np.allclose(inp.xi.xi_a, INP2.xi.xi_a) and np.allclose(inp.xi.xi_b, INP2.xi.xi_b)


def test_theta_divisor():
    with pytest.raises(OnThetaDivisor):
        P.bold_tau(P.InstantonInput(PeriodMatrix([[1j]]), P.HALF))


def test_window_too_small():
    with pytest.raises(WindowTooSmall):
        P.zinst_primitive(INP2, window=1)


def test_characteristics_length():
    with pytest.raises(InvalidInput):
        P.InstantonInput(PeriodMatrix(OMEGA2), Characteristics([0.1], [0.2]))


def test_genus_ward_first():
    for i in range(2):
        fd, mid, ch = P.ward_genus_first(INP2, i)
        assert abs(fd - ch) < 1e-5 and abs(mid - ch) < 1e-10


def test_genus_ward_second_sign():
    r = P.ward_genus_second(INP2, 0, 1)
    assert r["holo_residual"] < 1e-5
    assert r["mixed_variance"] < 1e-6
    assert r["mixed_magnitude_residual"] < 1e-6
    # measured: d2 log bold tau / dz dzbar = -pi Y, the displayed sign
    assert r["mixed_sign"] == -1


def test_corr_tensor():
    T20 = P.corr_tensor([[1j]], 2, 0).tensor
    # [DERIVED] at Omega = i, Z = 0: d2 log theta/dz2 = -pi by FD of the lattice sum
    h = 1e-4
    from tauward.theta import theta
    f = lambda z: np.log(theta([z], [[1j]]))  # noqa: E731
    fd = (f(h) - 2 * f(0) + f(-h)) / h**2
    assert T20[0, 0] == pytest.approx(fd, abs=1e-5)
    assert np.abs(P.corr_tensor(OMEGA2, 2, 2).tensor).max() < 1e-8
    cs = P.corr_tensor(OMEGA2, 3, 0)
    assert cs.symmetry_residual() < 1e-10


def test_genus_ward_checks():
    assert all(c.passed for c in P.genus_ward_checks(INP2))


def test_torus():
    tau = 2j
    assert P.torus_laplacian(0.3 + 0.4j, tau) == pytest.approx(-1 / tau.imag, abs=1e-4)
    f = P.fay_torus_check(tau, 0.5 + 0.6j, 0.2 + 0.2j)
    assert f["residual"] < 1e-5 and f["a_period"] < 1e-8
    with pytest.raises(LatticePoint):
        P.torus_green(1 + 2j, tau)
    with pytest.raises(InvalidInput):
        P.torus_green(0.3, -1j)
    assert all(c.passed for c in P.torus_checks(0.3 + 1.1j, 0.1 + 0.3j, -0.2 + 0.1j))


def test_torus_green_mean_zero():
    tau = 1.5j + 0.2
    c = P.torus_constant(tau)
    n = 24
    a, b = np.meshgrid((np.arange(n) + 0.5) / n, (np.arange(n) + 0.5) / n)
    vals = [P.torus_green(x + y * tau, tau, c) for x, y in zip(a.ravel(), b.ravel())]
    # the log singularity limits the midpoint rule; the mean is O(h^2 log h)
    assert abs(np.mean(vals)) < 5e-3


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 2))
def test_triple_agreement_random(seed, g):
    rng = np.random.default_rng(seed)
    inp = P.InstantonInput(random_period_matrix(g, rng), Characteristics(rng.uniform(-1, 1, g), rng.uniform(-1, 1, g)))
    try:
        c = P.zinst_closed(inp)
    except VerificationError:
        pytest.fail("closed forms disagree")
    assert abs(P.zinst_primitive(inp) - c) <= 1e-6 * abs(c)
    assert abs(P.zinst_qa(inp) - c) <= 1e-6 * abs(c)


def test_series_agree_term_by_term():
    inp = P.InstantonInput(PeriodMatrix([[2j + 0.3]]), Characteristics([0.2], [-0.1]))
    n = np.array([(l, m) for l in range(-3, 4) for m in range(-3, 4)])
    assert np.allclose(P.primitive_terms(inp, n), P.qa_terms(inp, n), rtol=1e-12, atol=0)


def test_zero_characteristic_sum_is_real():
    inp = P.InstantonInput(PeriodMatrix(OMEGA2), Characteristics([0, 0], [0, 0]))
    z = P.zinst_primitive(inp)
    assert abs(z.imag) <= 1e-14 * abs(z) and z.real > 0
