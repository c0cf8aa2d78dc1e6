"""Regenerate ``frozen.json``: reference values from independent methods.

None of these values comes from the shooting / log-polar machinery that
the package uses for its own results:

* ``fd_*``: finite-difference discretisation of the radial problem
  (staggered tridiagonal matrix, Richardson-extrapolated);
* ``cartesian_*``: plain Cartesian integration of the radial system with
  ``solve_ivp``;
* ``interaction_*``: Cartesian integration in the interaction picture
  (growth factors ``(t/t0)^(+-mu)`` divided out), masses carried as extra
  ODE components;
* ``bessel_*``: the Euclidean regular solution
  ``B(t) = sqrt(t) (J_(mu-1/2)(lam t), J_(mu+1/2)(lam t))`` and adaptive
  quadrature.

Run from the repository root: ``python3 tests/oracles/generate_oracles.py``.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.special import jv

from diracglue.fd_oracle import radial_fd_eigenvalues, sphere_dirac_fd
from diracglue.profiles import CapProfile

OUT = Path(__file__).with_name("frozen.json")


def fd_round(mu):
    return radial_fd_eigenvalues(np.sin, np.pi, mu, (-6.5, 6.5), M=4096).tolist()


def fd_cap(radius, opening, potential, mu, window):
    cap = CapProfile(radius, opening, potential)
    return radial_fd_eigenvalues(cap.rho, cap.length, mu, window, M=4096,
                                 potential=cap.potential).tolist()


def cartesian_endpoint(mu, lam, t_a, t_b, w):
    """``B(t_b)`` from ``B(t_a) = w`` in the ``t`` coordinate."""
    def f(t, y):
        return [mu / t * y[0] - lam * y[1], lam * y[0] - mu / t * y[1]]
    sol = solve_ivp(f, (t_a, t_b), w, method="DOP853", rtol=1e-13, atol=1e-15)
    return sol.y[:, -1].tolist()


def interaction_ratio(mu, lam, t_2, theta):
    """Annulus mass ratio on the ``t_1 = t_2^4 / 2`` schedule, ``B(t_0) = (cos theta, sin theta)``.

    Integrated in the interaction picture ``b1 = p (t/t0)^mu``,
    ``b2 = q (t/t0)^-mu`` so that the small coupling-generated component
    keeps full relative accuracy; masses are extra ODE components.
    """
    t_1 = 0.5 * t_2 ** 4
    t_m1 = 0.5 * t_1
    t_m2 = 0.5 * t_m1 ** 4
    tm2, tm1, tp1, tp2 = np.log([t_m2, t_m1, t_1, t_2])
    tau0 = 0.5 * (tm1 + tp1)

    def f(s, y, inner):
        e, x = np.exp(s), s - tau0
        p, q = y[0], y[1]
        m = (p * p * np.exp(2 * mu * x) + q * q * np.exp(-2 * mu * x)) * e
        return [-lam * e * q * np.exp(-2 * mu * x), lam * e * p * np.exp(2 * mu * x),
                m if inner else 0.0, m]

    tot = inn = 0.0
    for stops in ([tp1, tp2], [tm1, tm2]):
        y, a = [np.cos(theta), np.sin(theta), 0.0, 0.0], tau0
        for k, b in enumerate(stops):
            sol = solve_ivp(f, (a, b), y, method="DOP853", rtol=1e-13, atol=1e-300,
                            args=(k == 0,), first_step=1e-3)
            y, a = sol.y[:, -1], b
        tot += abs(y[3])
        inn += abs(y[2])
    return inn / tot


def bessel_mass(mu, lam, a, b):
    def g(t):
        return t * (jv(mu - 0.5, lam * t) ** 2 + jv(mu + 0.5, lam * t) ** 2)
    val, _ = quad(g, a, b, epsabs=0.0, epsrel=1e-13, limit=200)
    return val


def bessel_corollary2(mu, lam, t_2):
    t_1 = 0.5 * t_2 ** 4
    # integrands behave like t^(2 mu); split at t_1 to resolve both scales
    inner = bessel_mass(mu, lam, 0.0, t_1)
    return inner / (inner + bessel_mass(mu, lam, t_1, t_2))


def main():
    data = {
        "fd_round_s3": {str(mu): fd_round(mu) for mu in (1.0, 2.0, 1.5, 2.5)},
        "fd_sphere_s3_bound5": [list(p) for p in sphere_dirac_fd(3, 5.0)],
        "fd_cap_R1_open0.2_mu1": fd_cap(1.0, 0.2, 0.0, 1.0, (-3.0, 3.0)),
        "fd_cap_R1.3_open0.2_mu1": fd_cap(1.3, 0.2, 0.0, 1.0, (-3.0, 3.0)),
        "fd_cap_R0.26_open0.05_V6_mu1": fd_cap(0.26, 0.05, 6.0, 1.0, (-1.0, 1.0)),
        "cartesian_endpoint_mu1_lam0.1": {
            "t_a": 0.01, "t_b": 0.1, "w": [1.0, 1.0],
            "B_tb": cartesian_endpoint(1.0, 0.1, 0.01, 0.1, [1.0, 1.0])},
        "interaction_ratio_mu2_lam0.05_t2_2^-5": {
            str(th): interaction_ratio(2.0, 0.05, 2.0 ** -5, th)
            for th in (0.0, 0.5, 1.0, np.pi / 2, 2.5)},
        "bessel_corollary2_lam0.05_t2_2^-8": {
            str(mu): bessel_corollary2(mu, 0.05, 2.0 ** -8) for mu in (1.0, 2.0, 3.0)},
        "almost_solution_defect_w11_mu2_t0.5_lam0.05_t0.25":
            0.05 * 0.25 * np.sqrt(0.5 ** 4 + 0.5 ** -4),
    }
    OUT.write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
