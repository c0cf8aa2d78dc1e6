import numpy as np
import pytest
from hypothesis import given, strategies as st

from diracglue.annulus import (AnnulusSchedule, corollary1_check, corollary1_schedule,
                               corollary2_check, direct_log_ratios, dyadic_schedule,
                               max_ratio, measured_ratio, prop32_bound, ratio_curve)
from diracglue.errors import HypothesisViolation

T2 = 2.0 ** -5
SCHED = corollary1_schedule(T2)


def test_bound_formula_arithmetic():
    sched = AnnulusSchedule(1.0, 0.5, 0.25, 0.125)
    np.testing.assert_allclose(prop32_bound(1.0, sched, check=False), 64.0, rtol=1e-14)
    # t_1^6 = 1/64 <= t_-2 = 1/8 holds, so the checked bound agrees
    np.testing.assert_allclose(prop32_bound(1.0, sched), 64.0, rtol=1e-14)
    with pytest.raises(HypothesisViolation):
        prop32_bound(1.0, AnnulusSchedule(1.0, 0.5, 0.25, 0.2))


def test_bound_decreases_in_mu():
    sched = AnnulusSchedule(1.0, 0.5, 0.25, 0.125)
    b = [prop32_bound(mu, sched, check=False) for mu in (1, 2, 4, 8, 16)]
    assert all(x > y for x, y in zip(b, b[1:]))


def test_bound_on_corollary1_schedule():
    t_1, t_m1 = SCHED.t_1, SCHED.t_m1
    want = 2 ** 6 * max(3 * (t_1 / T2) ** 3, 2 * (0.5 * t_m1 ** 3))
    np.testing.assert_allclose(prop32_bound(1.0, SCHED), want, rtol=1e-12)
    np.testing.assert_allclose(t_1 / T2, 0.5 * T2 ** 3)


def test_pure_modes_closed_form():
    s = SCHED
    grow = measured_ratio(1.0, 0.0, s, 0.0)
    np.testing.assert_allclose(grow.measured, (s.t_1 ** 3 - s.t_m1 ** 3) / (s.t_2 ** 3 - s.t_m2 ** 3),
                               rtol=1e-8)
    decay = measured_ratio(1.0, 0.0, s, np.pi / 2)
    np.testing.assert_allclose(decay.measured,
                               (1 / s.t_m1 - 1 / s.t_1) / (1 / s.t_m2 - 1 / s.t_2), rtol=1e-8)


def test_ratio_matches_interaction_picture_oracle(oracles):
    for th, ref in oracles["interaction_ratio_mu2_lam0.05_t2_2^-5"].items():
        got = measured_ratio(2.0, 0.05, SCHED, float(th)).measured
        np.testing.assert_allclose(got, ref, rtol=1e-8)


def test_theta_sweep_below_bound():
    thetas = np.linspace(0, np.pi, 64, endpoint=False)
    logs = direct_log_ratios(2.0, 0.05, SCHED, thetas)
    assert np.all(logs <= np.log(prop32_bound(2.0, SCHED)))


def test_max_ratio_dominates_grid():
    rep = max_ratio(2.0, 0.05, SCHED, n_theta=32)
    thetas = np.linspace(0, np.pi, 32, endpoint=False)
    logs = direct_log_ratios(2.0, 0.05, SCHED, thetas)
    assert np.all(logs <= rep.log_measured + 1e-9)
    np.testing.assert_allclose(rep.measured, rep.eig_max, rtol=1e-6)
    assert rep.passed


def test_lambda0_maximum_at_pure_mode():
    thetas = np.linspace(0, np.pi, 64, endpoint=False)
    logs = direct_log_ratios(1.0, 0.0, SCHED, thetas)
    assert int(np.argmax(logs)) in (0, 32)


def test_log_measure_reflection_symmetry():
    sched = AnnulusSchedule(1.0, 0.25, 0.125, 1 / 32)
    curve = ratio_curve(1.0, 0.0, sched, measure="log")
    for th in (0.1, 0.4, 0.7):
        np.testing.assert_allclose(curve.log_ratio(th), curve.log_ratio(np.pi / 2 - th),
                                   rtol=1e-8)


@given(st.sampled_from([1.0, 2.0, 3.0]), st.floats(-0.1, 0.1),
       st.floats(0.0, np.pi))
def test_measured_never_exceeds_max(mu, lam, theta):
    rep = max_ratio(mu, lam, SCHED, n_theta=16)
    got = measured_ratio(mu, lam, SCHED, theta)
    assert got.log_measured <= rep.log_measured + 1e-8 * abs(rep.log_measured)


def test_corollary1_hypothesis_error():
    with pytest.raises(HypothesisViolation, match="1/10"):
        corollary1_check(3, T2, 1.0, 0.5, 3.0)


def test_corollary1_unchecked_large_t2():
    rep = corollary1_check(3, T2, 1.0, 0.5, 3.0, check=False)
    assert all(r.passed for r in rep.rows)
    np.testing.assert_allclose(rep.target, 2 ** 7 * 2.0 ** -42 * T2)


def test_corollary1_checked():
    rep = corollary1_check(3, 2.0 ** -8, 1.0, 0.05, 3.0, n_theta=16)
    assert rep.passed


def test_corollary2_closed_form_lambda0():
    t2 = 2.0 ** -6
    rep = corollary2_check(3, t2, 0.5, 0.0, 1.0)
    t1 = 0.5 * t2 ** 4
    np.testing.assert_allclose(rep.rows[0].ratio, (t1 / t2) ** 3, rtol=1e-8)
    assert rep.passed


def test_corollary2_bessel_oracle(oracles):
    rep = corollary2_check(3, 2.0 ** -8, 1.0, 0.05, 3.0)
    ref = oracles["bessel_corollary2_lam0.05_t2_2^-8"]
    for r in rep.rows:
        np.testing.assert_allclose(r.ratio, ref[str(r.mu)], rtol=1e-8)
    assert rep.passed
    np.testing.assert_allclose(rep.chain["geometric_limit"], 4 / 3)


def test_dyadic_tiling():
    s = dyadic_schedule(2.0 ** -6, 5)
    for a, b in zip(s, s[1:]):
        np.testing.assert_allclose(a.t_m1, b.t_1, rtol=1e-15)
    assert all(not x.violations(0.0) for x in s)
