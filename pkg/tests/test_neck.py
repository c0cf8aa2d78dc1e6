import numpy as np
import pytest
from hypothesis import given, strategies as st

from diracglue.errors import HypothesisViolation
from diracglue.neck import (build_cutoff, build_neck, delta_of, glue_schedule, prop33_cases,
                            prop33_check, prop33_hypothesis, verify_neck,
                            warped_radial_params, warped_system_matrix)
from diracglue.profiles import CapProfile, ConstantProfile, EuclideanProfile
from diracglue.radial_system import system_matrix


def test_delta_examples():
    np.testing.assert_allclose(delta_of(1.0, 0.5, 2), 2.0 ** -19 / 9, rtol=1e-14)
    np.testing.assert_allclose(delta_of(0.1, 1.0, 0), 2.0 ** -17, rtol=1e-14)


@given(st.floats(0.1, 100.0), st.floats(0.01, 1.0), st.integers(0, 20))
def test_delta_nonincreasing_in_lambda(Lambda, eps, k):
    assert delta_of(2 * Lambda, eps, k) <= delta_of(Lambda, eps, k)


def test_schedule_radii():
    s = glue_schedule(2.0 ** -8)
    np.testing.assert_allclose([s.t_1, s.t_m1, s.t_m2],
                               [0.5 * 2.0 ** -32, 0.25 * 2.0 ** -32,
                                0.5 * (0.25 * 2.0 ** -32) ** 4])
    with pytest.raises(HypothesisViolation):
        glue_schedule(0.1)
    assert not glue_schedule(0.1, allow_large=True).admissible


def test_neck_properties():
    t2 = 2.0 ** -6
    prof = build_neck(t2)
    t_m2 = prof.meta["t_m2"]
    np.testing.assert_allclose(prof.rho(t_m2), t_m2, rtol=1e-14)
    assert 0 < prof.rho(0.0) <= t_m2
    t = np.linspace(-t2, t2, 10_000)
    assert np.max(np.abs(prof.drho(t))) <= 1.0
    chk = verify_neck(prof)
    assert chk.passed


def test_cutoff_properties():
    t1 = 1e-3
    chi = build_cutoff(t1, t1 / 2)
    assert chi(t1 / 2) == 0.0 and chi(t1) == 1.0
    assert 0 < chi(0.75 * t1) < 1
    assert chi.sampled_sup_gradient() <= 4 / t1
    with pytest.raises(ValueError):
        build_cutoff(t1, t1 / 3)


def test_euclidean_matrix_agrees():
    params = warped_radial_params(EuclideanProfile(), 2.0, 0.3)
    t = np.array([0.5, 2.0])
    np.testing.assert_allclose(warped_system_matrix(params, t), system_matrix(2.0, 0.3, t))


def test_constant_profile_closed_form():
    # B = (e^(t/rho0), 0) for lam = 0, mu = 1
    rho0, a, b, c = 0.5, 0.4, 0.6, 0.2
    m = lambda x, y: rho0 / 2 * (np.exp(2 * y / rho0) - np.exp(2 * x / rho0))
    assert m(a, b) <= (b - a) / (2 * c) * (m(a - c, a) + m(b, b + c))
    rep = prop33_check(ConstantProfile(rho0), 0.0, a, b, c, [1.0])
    assert rep.passed


def test_neck_example_all_modes():
    prof = build_neck(0.05, allow_large=True)
    t_1 = 0.5 * 0.05 ** 4
    rep = prop33_check(prof, 0.5, -t_1, t_1, 0.05 - t_1, [1, 2, 3, 4, 5])
    np.testing.assert_allclose(rep.hypothesis_value, 0.525, atol=1e-3)
    assert rep.passed and len(rep.rows) == 5 * 16


def test_hypothesis_violation():
    with pytest.raises(HypothesisViolation):
        prop33_check(ConstantProfile(0.2), 10.0, 0.4, 0.6, 0.2, [1.0])
    np.testing.assert_allclose(prop33_hypothesis(ConstantProfile(0.2), 10.0, 0.4, 0.6, 0.2),
                               2.0)


def test_cases_inside_domain():
    for prof in (build_neck(0.05, allow_large=True), ConstantProfile(1.0)):
        lo, hi = prof.domain
        cases = prop33_cases(prof)
        assert len(cases) == 5
        for a, b, c in cases:
            assert lo <= a - c < a < b < b + c <= hi


@pytest.mark.parametrize("lam", [0.0, 0.5])
def test_cap_interior(lam):
    prof = CapProfile(1.0, 0.2)
    rep = prop33_check(prof, lam, 1.0, 1.2, 0.3, [1.0, 2.0], n_dirs=8)
    assert rep.passed
