"""Gronwall-type comparison between a solution and an almost-solution.

If ``u' = A u``, ``v(t0) = u(t0)`` and ``|v' - A v| <= delta``, then

    |u(t) - v(t)| <= | int_{t0}^{t} delta(s) exp(||A||_inf |t - s|) ds |.

This module evaluates the right-hand side by adaptive quadrature and checks
the inequality along sampled trajectories.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .profiles import EuclideanProfile
from .radial_system import (AlmostSolution, RadialParams, RadialTrajectory,
                            almost_solution, integrate, operator_norm)

__all__ = ["gronwall_bound", "gronwall_curve", "ComparisonReport",
           "verify_comparison", "prop32_defect_dominator", "prop32_hand_bound",
           "almost_solution_defect", "comparison_instance"]

SLACK_REL = 1e-8
SLACK_ABS = 1e-12


def gronwall_bound(a_sup: float, delta: Callable[[float], float], t0: float, t: float,
                   quadrature_tol: float = 1e-12) -> float:
    """``|int_{t0}^{t} delta(s) exp(a_sup |t - s|) ds|``.

    Args:
        a_sup: supremum of the operator norm of ``A`` (``>= 0``).
        delta: nonnegative defect bound, a scalar callable.
        quadrature_tol: absolute and relative tolerance passed to ``quad``.
    """
    if a_sup < 0:
        raise ValueError("a_sup must be nonnegative")
    if t == t0:
        return 0.0
    lo, hi = (t0, t) if t > t0 else (t, t0)
    # exp(a |t - s|) = exp(a (hi - lo)) * exp(-a |s - t0|): keep the integrand O(1)
    val, _ = quad(lambda s: delta(s) * np.exp(-a_sup * abs(s - t0)),
                  lo, hi, epsabs=quadrature_tol, epsrel=quadrature_tol, limit=200)
    return float(abs(val) * np.exp(a_sup * (hi - lo)))


def gronwall_curve(a_sup: float, delta, t0: float, grid, quadrature_tol: float = 1e-12):
    """:func:`gronwall_bound` at every point of ``grid``."""
    return np.array([gronwall_bound(a_sup, delta, t0, float(t), quadrature_tol)
                     for t in np.asarray(grid, dtype=float)])


@dataclass
class ComparisonReport:
    """Pointwise deviation ``|u - v|`` against the comparison bound.

    ``hypothesis_ok`` refers to the anchor match and the sampled defect
    domination; ``conclusion_ok`` to ``deviation <= bound + slack``.  A
    conclusion failure under valid hypotheses indicates an implementation
    error, not a property of the inputs.
    """

    grid: np.ndarray
    deviation: np.ndarray
    bound: np.ndarray
    a_sup: float
    t0: float
    anchor_mismatch: float
    defect_excess: float
    hypothesis_ok: bool
    conclusion_ok: bool
    max_excess: float

    @property
    def passed(self) -> bool:
        return self.hypothesis_ok and self.conclusion_ok

    @property
    def status(self) -> str:
        if not self.hypothesis_ok:
            return "hypothesis-violation"
        return "ok" if self.conclusion_ok else "conclusion-violation"

    def to_columns(self) -> np.ndarray:
        return np.column_stack([self.grid, self.deviation, self.bound])


def _as_vectors(x):
    x = np.asarray(x)
    return x.reshape(x.shape[0], -1) if x.ndim > 1 else x.reshape(-1, 1)


def verify_comparison(u, v, a_sup: float, delta, t0: float, grid=None,
                      defect: Callable | None = None, samples: int = 257,
                      anchor_tol: float = 1e-9, slack_rel: float = SLACK_REL,
                      slack_abs: float = SLACK_ABS, quadrature_tol: float = 1e-12,
                      defect_rtol: float = 1e-6, defect_atol=1e-14,
                      slack_sol: float = 0.0) -> ComparisonReport:
    """Check the comparison estimate for ``u`` against ``v`` on a grid.

    Args:
        u: true solution; a :class:`RadialTrajectory` or a callable
            returning values of shape ``(N, k)``.
        v: almost-solution, same calling convention.
        a_sup: ``||A||_inf`` on the interval.
        delta: scalar callable dominating the defect of ``v``.
        t0: anchor where ``u(t0) = v(t0)``.
        grid: evaluation points (default: ``samples`` points spanning the
            coverage of ``u``, with ``t0`` inserted).
        defect: callable returning ``|v' - A v|`` on an array; if given,
            domination by ``delta`` is spot-checked on the grid, up to a
            relative ``defect_rtol`` (numerical derivatives are allowed).
        defect_atol: absolute slack of that spot check; a float or a
            callable of the grid (e.g. a finite-difference error estimate).
        slack_sol: extra slack ``slack_sol |v|`` for the accuracy of a
            numerically integrated ``u`` (matters where the bound is ~0).
    """
    if grid is None:
        if not isinstance(u, RadialTrajectory):
            raise ValueError("grid is required unless u is a trajectory")
        lo, hi = u.coverage
        grid = np.linspace(lo, hi, samples)
    grid = np.union1d(np.asarray(grid, dtype=float), [t0])
    uu, vv = _as_vectors(u(grid)), _as_vectors(v(grid))
    dev = np.linalg.norm(uu - vv, axis=1)
    i0 = int(np.searchsorted(grid, t0))
    anchor = float(dev[i0])
    dev[i0] = 0.0 if anchor <= anchor_tol * max(1.0, np.linalg.norm(vv[i0])) else anchor
    bound = gronwall_curve(a_sup, delta, t0, grid, quadrature_tol)
    bound[i0] = 0.0
    excess = 0.0
    if defect is not None:
        d = np.asarray(defect(grid), dtype=float)
        dom = np.array([delta(float(t)) for t in grid])
        atol = defect_atol(grid) if callable(defect_atol) else defect_atol
        excess = float(np.max(d - dom * (1 + defect_rtol) - atol))
    hyp = anchor <= anchor_tol * max(1.0, np.linalg.norm(vv[i0])) and excess <= 0
    over = dev - bound * (1 + slack_rel) - slack_abs - slack_sol * np.linalg.norm(vv, axis=1)
    return ComparisonReport(grid=grid, deviation=dev, bound=bound, a_sup=float(a_sup),
                            t0=float(t0), anchor_mismatch=anchor, defect_excess=excess,
                            hypothesis_ok=bool(hyp), conclusion_ok=bool(np.all(over <= 0)),
                            max_excess=float(np.max(over)))


def prop32_defect_dominator(mu: float, lam: float, b0_norm: float, tau0: float):
    """Defect bound used below the anchor: ``|lam| e^tau |B(t0)| e^(-mu (tau - tau0))``."""
    def delta(tau):
        return abs(lam) * np.exp(tau) * b0_norm * np.exp(-mu * (tau - tau0))
    return delta


def prop32_hand_bound(mu: float, lam: float, b0_norm: float, tau0: float, tau):
    """Closed-form majorant of the comparison integral for ``tau <= tau0``:
    ``|lam| |B(t0)| e^(-mu (tau - tau0)) e^tau0 e^((tau0 - tau) / 10)``."""
    tau = np.asarray(tau, dtype=float)
    return (abs(lam) * b0_norm * np.exp(-mu * (tau - tau0)) * np.exp(tau0)
            * np.exp((tau0 - tau) / 10))


def almost_solution_defect(v: AlmostSolution, lam: float):
    """Exact defect of ``v`` in the ``tau`` coordinate, as a callable of ``tau``."""
    return lambda tau: v.defect(lam, np.exp(np.asarray(tau, dtype=float)))


def comparison_instance(mu: float, lam: float, tau0: float, tau_lo: float, tau_hi: float,
                        w, samples: int = 257, rtol: float = 1e-11) -> ComparisonReport:
    """Compare the Euclidean solution with ``B(e^tau0) = w`` against the
    ``lam = 0`` solution through the same data, on ``[tau_lo, tau_hi]``.

    The defect of the comparison function is known in closed form, so it
    serves as ``delta`` itself; the numerical defect is spot-checked with
    slack ``1e-8 |v|`` for the central-difference error (``h = 1e-5``).
    The deviation gets the integrator slack ``10 rtol |v|``.
    """
    if not tau_lo <= tau0 <= tau_hi:
        raise ValueError("need tau_lo <= tau0 <= tau_hi")
    w = np.asarray(w, dtype=complex).reshape(2)
    u = integrate(RadialParams(mu, lam, EuclideanProfile()), (tau_lo, tau_hi), w,
                  anchor=tau0, rtol=rtol, atol=1e-13)
    v = almost_solution(w, mu, float(np.exp(tau0)))
    delta = almost_solution_defect(v, lam)
    grid = np.linspace(tau_lo, tau_hi, samples)
    return verify_comparison(u, v.at_tau, operator_norm(mu, lam, tau_lo, tau_hi),
                             lambda tau: float(delta(tau)), tau0, grid=grid,
                             defect=lambda tau: v.defect_numeric(lam, np.exp(tau)),
                             defect_atol=lambda tau: 1e-8 * np.linalg.norm(v.at_tau(tau), axis=-1),
                             slack_sol=10 * rtol)
