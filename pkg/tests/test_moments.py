import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tauward.contour import ExteriorMap, Location
from tauward.errors import InvalidInput, OriginOutside
from tauward import moments as Mo

# [DERIVED] adaptive scipy.integrate.quad of the defining contour integrals
GENERIC_T = [0.0605, 0.095 - 0.05j, 1 / 60, 0.0]
GENERIC_V = [0.083 + 0.003j, 0.19515 + 0.0946j, 0.098925 + 0.02719j, 0.0831985 + 0.080512j]


def test_generic_moments(generic_map):
    t = Mo.exterior_moments(generic_map, 4)
    v = Mo.interior_moments(generic_map, 4)
    assert t.t0 == pytest.approx(1 - 0.05 - 2 * 0.0025, rel=1e-14)
    assert np.allclose(t.t, GENERIC_T, atol=1e-13)
    assert np.allclose(v.v, GENERIC_V, atol=1e-13)


def test_ellipse_moments(ellipse):
    # [DERIVED] residue calculus: t2 = u/2, v2 = u(1 - u^2); odd ones vanish
    t = Mo.exterior_moments(ellipse, 4)
    v = Mo.interior_moments(ellipse, 4)
    assert np.allclose(t.t, [0, 0.15, 0, 0], atol=1e-14)
    assert np.allclose(v.v[:3], [0, 0.273, 0], atol=1e-14)


def test_disk_v0():
    # [DERIVED] v0 = (2/pi) int log|z| = R^2 (2 log R - 1)
    R = 1.7
    assert Mo.interior_moments(ExteriorMap(R), 1).v0 == pytest.approx(R**2 * (2 * np.log(R) - 1), rel=1e-13)


def test_origin_outside():
    with pytest.raises(OriginOutside):
        Mo.interior_moments(ExteriorMap(1.0, 3.0), 2)


def test_momentset_json():
    m = Mo.MomentSet.from_json('{"t0": 1.0, "t": [[0.1, 0.2]]}')
    assert m.t == (0.1 + 0.2j,)
    with pytest.raises(InvalidInput):
        Mo.MomentSet.from_json('{"t0": -1}')
    with pytest.raises(InvalidInput):
        Mo.MomentSet.from_json('{"t": []}')


def test_cauchy_pair(generic_map):
    assert Mo.cauchy_pair(generic_map, 0.0, Location.INTERIOR) == pytest.approx(GENERIC_T[0], abs=1e-13)
    with pytest.raises(InvalidInput):
        Mo.cauchy_pair(generic_map, 0.0, Location.EXTERIOR)


def test_round_trip_from_zero_seed(generic_map):
    target = Mo.exterior_moments(generic_map, 3, 1024)
    seed = ExteriorMap(np.sqrt(target.t0), 0, (0, 0))
    back = Mo.map_from_moments(target, seed, M=1024)
    assert abs(back.r - 1) < 1e-10 and abs(back.b0 - 0.1) < 1e-10
    assert np.allclose(back.coeffs, generic_map.coeffs, atol=1e-10)


def test_too_many_moments():
    with pytest.raises(InvalidInput):
        Mo.map_from_moments(Mo.MomentSet(1.0, (0.1, 0.1, 0.1)), ExteriorMap(1.0), M=256)


def test_moment_checks(generic_map):
    assert all(c.passed for c in Mo.moment_checks(generic_map, 1024))


@settings(max_examples=20, deadline=None)
@given(st.floats(0.5, 2.0), st.floats(0.0, 0.6), st.floats(0, 2 * np.pi))
def test_t0_is_area_over_pi_and_v_scale(r, u, phase):
    g = ExteriorMap(r, 0.0, (u * r * np.exp(1j * phase),))
    t = Mo.exterior_moments(g, 2, 512)
    assert t.t0 == pytest.approx(r * r * (1 - u * u), rel=1e-12)
    # dilation z -> 2z multiplies t_n by 2^{2-n} and v_n by 2^{n+2}
    t2 = Mo.exterior_moments(g.scaled(2.0), 2, 512)
    assert np.allclose(np.array(t2.t), np.array(t.t) * 2.0 ** (2 - np.arange(1, 3)), atol=1e-12)
    v, v2 = Mo.interior_moments(g, 2, 512), Mo.interior_moments(g.scaled(2.0), 2, 512)
    assert np.allclose(np.array(v2.v), np.array(v.v) * 2.0 ** (np.arange(1, 3) + 2), atol=1e-11)
