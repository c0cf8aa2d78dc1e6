import numpy as np
import pytest
from hypothesis import given, strategies as st

from diracglue.glued_model import glue, round_cap
from diracglue.neck import build_neck
from diracglue.profiles import (CapProfile, ConstantProfile, EuclideanProfile, neck_shape,
                                neck_shape_derivative, smoothstep, smoothstep_derivative)


def test_smoothstep_ends_and_derivative():
    x = np.linspace(-0.5, 1.5, 401)
    y = smoothstep(x)
    assert y[0] == 0.0 and y[-1] == 1.0
    assert np.all(np.diff(y) >= 0)
    h = 1e-6
    xi = np.linspace(0.05, 0.95, 19)
    np.testing.assert_allclose(smoothstep_derivative(xi),
                               (smoothstep(xi + h) - smoothstep(xi - h)) / (2 * h), atol=1e-8)


def test_neck_shape_properties():
    x = np.linspace(-3, 3, 6001)
    y = neck_shape(x)
    far = np.abs(x) >= 1
    np.testing.assert_array_equal(y[far], np.abs(x[far]))
    assert neck_shape(0.0) == 0.5
    np.testing.assert_allclose(y, y[::-1])
    assert np.max(np.abs(neck_shape_derivative(x))) <= 1.0


def test_round_cap_small_t_behaviour():
    cap = CapProfile(1.0, 0.0)
    t = np.array([1e-3, 1e-4, 1e-5])
    np.testing.assert_allclose(cap.rho(t) / t, 1.0, atol=1e-6)
    s = np.linspace(0.0, np.pi, 101)
    np.testing.assert_allclose(cap.rho(s), np.sin(s), atol=1e-12)
    np.testing.assert_allclose(cap.length, np.pi)


def test_collar_is_flat():
    cap = round_cap(1.0, 0.2)
    r = np.linspace(0.0, 0.2, 51)
    np.testing.assert_array_equal(cap.rho(r), r)


def test_glued_length_and_junction_continuity():
    c1, c2 = round_cap(1.0, 0.2), round_cap(1.3, 0.2)
    model = glue(c1, c2, 0.05, allow_large=True)
    prof = model.profile
    np.testing.assert_allclose(prof.length, c1.length + c2.length, rtol=1e-14)
    t_m2 = 2.0 ** -9 * 0.05 ** 16
    for x in (-t_m2, t_m2):
        np.testing.assert_allclose(prof.rho(x), t_m2, rtol=1e-12)
        np.testing.assert_allclose(abs(prof.drho(x)), 1.0, atol=1e-12)


def test_glued_profile_converges_to_caps_away_from_site():
    c1, c2 = round_cap(1.0, 0.2), round_cap(1.0, 0.2)
    r = np.array([0.3, 1.0, 2.5])
    for t2 in (0.1, 0.05):
        prof = glue(c1, c2, t2, allow_large=True).profile
        np.testing.assert_allclose(prof.rho(r), c2.rho(r), rtol=1e-12)
        np.testing.assert_allclose(prof.rho(-r), c1.rho(r), rtol=1e-12)


def test_euclidean_and_constant():
    e = EuclideanProfile()
    t = np.array([1e-30, 1.0, 1e5])
    np.testing.assert_array_equal(e.rho(t), t)
    c = ConstantProfile(0.5)
    np.testing.assert_array_equal(c.rho(np.linspace(0, 1, 5)), 0.5)


@given(st.floats(0.3, 3.0), st.floats(0.0, 0.2), st.floats(0.0, 1.0))
def test_cap_rho_positive_and_lipschitz(radius, opening, frac):
    cap = CapProfile(radius, opening)
    r = frac * cap.length
    if 0.0 < r < cap.length:
        assert cap.rho(r) > 0
    assert abs(cap.drho(r)) <= 1.0 + 1e-12


def test_neck_rejects_large_t2():
    with pytest.raises(Exception):
        build_neck(0.1)
