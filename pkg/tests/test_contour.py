import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tauward import contour as C
from tauward.errors import InteriorPoint, InvalidInput


def test_map_rejects_nonpositive_r():
    with pytest.raises(InvalidInput, match="r > 0"):
        C.ExteriorMap(0.0)
    with pytest.raises(InvalidInput):
        C.ExteriorMap(-1.0, 0, (0.1,))


def test_json_round_trip(generic_map):
    back = C.ExteriorMap.from_json(generic_map.to_json())
    assert back == generic_map


@pytest.mark.parametrize("text", ["[1, 2]", "{\"b0\": [0, 0]}", "{\"r\": \"x\"}", "not json",
                                  "{\"r\": 1, \"coeffs\": [[1, 2, 3]]}"])
def test_json_malformed(text):
    with pytest.raises(InvalidInput):
        C.ExteriorMap.from_json(text)


def test_area_disk_and_ellipse(ellipse):
    # [TRIVIAL] pi R^2 and pi (r^2 - u^2)
    assert C.area(C.ExteriorMap(1.7)) == pytest.approx(np.pi * 1.7**2, rel=1e-15)
    assert C.area(ellipse) == pytest.approx(np.pi * 0.91, rel=1e-15)
    assert C.area_quadrature(C.sample(ellipse, 256)) == pytest.approx(np.pi * 0.91, rel=1e-13)


def test_univalence(ellipse):
    assert C.check_univalent(ellipse, 1024)
    rep = C.check_univalent(C.ExteriorMap(1.0, 0.0, (2.0,)), 1024)
    assert not rep and rep.failure
    # u = 1 degenerates to a slit
    assert not C.check_univalent(C.ExteriorMap(1.0, 0.0, (1.0,)), 1024)


def test_point_location(ellipse):
    c = C.sample(ellipse, 1024)
    assert C.point_location(c, 0.0) == C.Location.INTERIOR
    assert C.point_location(c, 3.0) == C.Location.EXTERIOR
    assert C.point_location(c, 1.3) == C.Location.NEAR_BOUNDARY


def test_inverse_map(generic_map):
    w = 1.7 * np.exp(1j * np.linspace(0, 6, 7))
    z = generic_map(w)
    assert np.abs(C.eval_G(generic_map, z) - w).max() < 1e-12


def test_eval_G_examples(ellipse):
    assert C.eval_G(C.ExteriorMap(1.0), 3.0) == pytest.approx(3.0)
    assert C.eval_G(ellipse, 2.15) == pytest.approx(2.0, abs=1e-13)
    w = C.eval_G(ellipse, 10.0)
    assert abs(ellipse(w) - 10.0) <= 1e-12 and abs(w) > 1
    with pytest.raises(InteriorPoint):
        C.eval_G(ellipse, 0.2)


def test_eval_g_examples():
    assert C.eval_g(C.ExteriorMap(2.0, 1.0, (0.5,)), 1j) == pytest.approx(1 + 1.5j)
    with pytest.raises(InvalidInput):
        C.eval_g(C.ExteriorMap(1.0), 0.5)


def test_sample_small():
    c = C.sample(C.ExteriorMap(2.0), 4)
    assert np.allclose(c.z, [2, 2j, -2, -2j])


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**31))
def test_eval_G_round_trip(seed):
    g = C.ExteriorMap(1.0, 0.1, (0.2 + 0.1j, 0.05))
    rng = np.random.default_rng(seed)
    w = rng.uniform(1.05, 5, 100) * np.exp(2j * np.pi * rng.uniform(size=100))
    z = g(w)
    assert np.abs(g(C.eval_G(g, z)) - z).max() <= 1e-11


def test_faber_examples():
    # [DERIVED] g^2 = r^2 w^2 + 2ru + u^2/w^2, so F_2 = r^2 w^2 + 2ru
    g = C.ExteriorMap(1.5, 0.0, (0.3,))
    assert np.allclose(C.faber(g, 2).coeffs, [0.9, 0, 2.25])
    assert np.allclose(C.faber(C.ExteriorMap(1.5, 0.2), 1).coeffs, [0.2, 1.5])
    assert np.allclose(C.faber(g, 0).coeffs, [1])


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_faber_defect_decays(generic_map, n):
    # |F_n(G(z)) - z^n| |z| stays bounded on a ray, up to cancellation in z^n
    F = C.faber(generic_map, n)
    z = np.linspace(5, 50, 10) * np.exp(0.4j)
    d = np.abs(F(C.eval_G(generic_map, z)) - z**n) * np.abs(z)
    roundoff = 1e-14 * np.abs(z) ** (n + 1)
    assert np.all(d <= 2 * d[0] + roundoff)


def test_duality(generic_map):
    D = C.duality_matrix(generic_map, 6, 4096)
    I = np.zeros_like(D)
    for m in range(1, 7):
        I[m - 1, m] = 1
    assert np.abs(D - I).max() < 1e-10


def test_schiffer_kernel_matches_definition(generic_map):
    z, w = 2.0 + 1.0j, -1.5 + 2.0j
    Gz, Gw = C.eval_G(generic_map, np.array([z, w]))
    direct = C.G_prime(generic_map, Gz) * C.G_prime(generic_map, Gw) / (Gz - Gw) ** 2
    assert C.schiffer_kernel_ext(generic_map, z, w) == pytest.approx(direct, rel=1e-12)


def test_kernel_symmetries(generic_map):
    z, w = 2.0 + 1.0j, -1.5 + 2.0j
    assert abs(C.schiffer_kernel_ext(generic_map, z, w) - C.schiffer_kernel_ext(generic_map, w, z)) <= 1e-12
    assert C.bergman_kernel_ext(generic_map, z, w) == pytest.approx(np.conj(C.bergman_kernel_ext(generic_map, w, z)))


def test_disk_kernels():
    g = C.ExteriorMap(1.0)
    assert C.schiffer_kernel_ext(g, 2, 3) == pytest.approx(1.0)
    assert C.bergman_kernel_ext(g, 2, 2) == pytest.approx(1 / (9 * np.pi))
    assert C.bergman_kernel_ext(g, 2, 3) == pytest.approx(1 / (25 * np.pi))


def test_schiffer_vs_green_fd(ellipse):
    # [DERIVED] S = -pi d_z d_w G_DBC by central differences
    z, w, h = 3.0, -3.0, 1e-3

    def dz(f, z0):
        return lambda *a: ((f(z0 + h, *a) - f(z0 - h, *a)) - 1j * (f(z0 + 1j * h, *a) - f(z0 - 1j * h, *a))) / (4 * h)

    def G(zz, ww):
        return C.green_dbc(ellipse, zz, ww)

    def dzG(ww):
        return ((G(z + h, ww) - G(z - h, ww)) - 1j * (G(z + 1j * h, ww) - G(z - 1j * h, ww))) / (4 * h)

    dzdw = ((dzG(w + h) - dzG(w - h)) - 1j * (dzG(w + 1j * h) - dzG(w - 1j * h))) / (4 * h)
    assert -np.pi * dzdw == pytest.approx(C.schiffer_kernel_ext(ellipse, z, w), rel=1e-5)


def test_bergman_series(generic_map):
    z, w = 2.0 + 1.0j, -1.5 + 2.0j
    assert C.bergman_series(generic_map, z, w, 80) == pytest.approx(
        C.bergman_kernel_ext(generic_map, z, w), rel=1e-10)


def test_green_symmetric(generic_map):
    z, w = 2.0 + 1.0j, -1.5 + 2.0j
    assert C.green_dbc(generic_map, z, w) == pytest.approx(C.green_dbc(generic_map, w, z), rel=1e-12)


def test_contour_checks(generic_map):
    assert all(c.passed for c in C.contour_checks(generic_map, 1024))


@settings(max_examples=25, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(0.0, 0.8), st.floats(-1, 1), st.floats(0, 2 * np.pi))
def test_area_formula_property(r, u, b0, phase):
    g = C.ExteriorMap(r, b0, (u * r * np.exp(1j * phase),))
    assert C.area(g) == pytest.approx(C.area_quadrature(C.sample(g, 256)), rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.5, 2.0), st.floats(0.1, 0.5), st.floats(0, 2 * np.pi))
def test_rotation_scaling(r, u, alpha):
    # rotating the contour by alpha keeps r real after w -> e^{-i alpha} w
    g = C.ExteriorMap(r, 0.1, (u * r, 0.1 * u * r))
    rot = C.ExteriorMap(r, 0.1 * np.exp(1j * alpha), [c * np.exp(1j * alpha * (k + 2)) for k, c in enumerate(g.coeffs)])
    assert C.area(rot) == pytest.approx(C.area(g), rel=1e-13)
    w = 1.3 * np.exp(1j * np.linspace(0, 6, 9))
    assert np.allclose(rot(w), np.exp(1j * alpha) * g(np.exp(-1j * alpha) * w), atol=1e-13)
