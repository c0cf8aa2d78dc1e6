import numpy as np
import pytest
from hypothesis import given, strategies as st

from diracglue.gronwall import (comparison_instance, gronwall_bound, gronwall_curve,
                                prop32_defect_dominator, prop32_hand_bound,
                                verify_comparison)
from diracglue.profiles import EuclideanProfile
from diracglue.radial_system import RadialParams, almost_solution, exact_lambda0, integrate


def test_zero_defect_gives_zero_bound():
    np.testing.assert_array_equal(gronwall_curve(2.0, lambda s: 0.0, 0.0, [-1, 0, 1, 3]), 0.0)


@given(st.floats(0.1, 3.0), st.floats(0.01, 2.0), st.floats(0.01, 2.0))
def test_constant_defect_closed_form(a, d0, dt):
    got = gronwall_bound(a, lambda s: d0, 0.0, dt)
    np.testing.assert_allclose(got, d0 * np.expm1(a * dt) / a, rtol=1e-10)
    # symmetric in direction
    np.testing.assert_allclose(gronwall_bound(a, lambda s: d0, 0.0, -dt), got, rtol=1e-10)


def test_negative_a_sup_rejected():
    with pytest.raises(ValueError):
        gronwall_bound(-1.0, lambda s: 1.0, 0.0, 1.0)


def test_exact_solution_zero_deviation():
    sol = exact_lambda0(2.0, 1.0, -0.5, 1.0)
    f = lambda tau: sol(np.exp(tau))
    rep = verify_comparison(f, f, 2.0, lambda s: 0.0, 0.0, grid=np.linspace(-1, 1, 33))
    assert rep.passed
    assert np.all(rep.deviation == 0) and np.all(rep.bound == 0)
    # the integrated solution reproduces it to integrator accuracy
    u = integrate(RadialParams(2.0, 0.0, EuclideanProfile()), (-1.0, 1.0), [1.0, -0.5],
                  anchor=0.0)
    x = np.linspace(-1, 1, 33)
    np.testing.assert_allclose(u(x), f(x), rtol=1e-9, atol=1e-9)


def test_scalar_problem_with_crafted_perturbation():
    a, eps = 0.7, 1e-2
    u = lambda t: np.exp(a * t)[:, None]
    v = lambda t: (np.exp(a * t) * (1 + eps * np.sin(t)))[:, None]
    delta = lambda s: abs(eps * np.exp(a * s) * np.cos(s))
    rep = verify_comparison(u, v, a, delta, 0.0, grid=np.linspace(-2, 3, 101))
    assert rep.passed
    assert np.max(rep.deviation) > 0


def test_perturbed_euclidean_instance():
    rep = comparison_instance(1.0, 0.05, 0.0, -2.0, 1.0, [1.0, 1.0])
    assert rep.passed
    i0 = int(np.searchsorted(rep.grid, 0.0))
    assert rep.deviation[i0] == 0.0 and rep.bound[i0] == 0.0


def test_wrong_defect_flags_hypothesis():
    w = [1.0, 1.0]
    u = integrate(RadialParams(1.0, 0.2, EuclideanProfile()), (-1.0, 1.0), w, anchor=0.0)
    v = almost_solution(w, 1.0, 1.0)
    rep = verify_comparison(u, v.at_tau, 1.0 + 0.2 * np.e, lambda s: 0.0, 0.0,
                            defect=lambda tau: v.defect(0.2, np.exp(tau)))
    assert not rep.hypothesis_ok and rep.status == "hypothesis-violation"


@given(st.floats(1.0, 5.0), st.floats(-0.3, 0.3), st.floats(-4.0, 0.0),
       st.floats(0.1, 3.0), st.floats(0.0, 1.0), st.floats(-np.pi, np.pi))
def test_comparison_property(mu, lam, lo, length, frac, phi):
    tau0 = lo + frac * length
    rep = comparison_instance(mu, lam, tau0, lo, lo + length, [np.cos(phi), 1j * np.sin(phi)],
                              samples=65)
    assert rep.passed, rep.max_excess


@pytest.mark.parametrize("mu", [1.0, 2.0, 5.0])
@pytest.mark.parametrize("lam", [0.05, -0.1])
def test_hand_bound_dominates(mu, lam):
    tau0 = np.log(0.1 / abs(lam)) - 1.0
    delta = prop32_defect_dominator(mu, lam, 1.0, tau0)
    taus = tau0 - np.linspace(0.0, 8.0, 17)
    a_sup = mu + abs(lam) * np.exp(tau0)
    got = gronwall_curve(a_sup, delta, tau0, taus)
    hand = prop32_hand_bound(mu, lam, 1.0, tau0, taus)
    assert np.all(got <= hand * (1 + 1e-10))
