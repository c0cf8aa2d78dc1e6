"""L^2-mass distribution of radial solutions on Euclidean annuli.

For ``0 < t_-2 < t_-1 < t_1 < t_2 <= 1`` the inner annulus ``[t_-1, t_1]``
carries a tiny fraction of the mass of any solution on ``[t_-2, t_2]``:

    int_{t_-1}^{t_1} |B|^2 / int_{t_-2}^{t_2} |B|^2
        <= 2^6 max{3 (t_1/t_2)^(2 mu + 1), (t_1/t_-1) (t_-2/t_-1)^(2 mu - 1)},

provided ``|lam| t_2^(1/2) <= 1/10``, ``t_2 >= 2 t_1``, ``t_-1 >= 2 t_-2`` and
``t_1^6 <= t_-2``.  All ratios and bounds are handled in log space: the
schedules used here span more than a hundred binary orders of magnitude.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh
from scipy.optimize import minimize_scalar
from scipy.special import logsumexp

from .errors import HypothesisViolation
from .profiles import EuclideanProfile
from .radial_system import (_GL_W, _GL_X, RadialParams, RadialTrajectory,
                            batch_log_masses, integrate, log_l2_norm_sq,
                            subdivide_panels)
from .shooting import regular_solution
from .sphere_modes import mode_spectrum

__all__ = [
    "AnnulusSchedule", "RatioReport", "corollary1_schedule", "prop32_bound",
    "log_prop32_bound", "measured_ratio", "max_ratio", "ratio_curve",
    "direct_log_ratios",
    "corollary1_check", "corollary2_check", "dyadic_schedule", "ModeRow",
    "CorollaryReport",
]

LN2 = np.log(2.0)


@dataclass(frozen=True)
class AnnulusSchedule:
    """Radii ``t_-2 < t_-1 < t_1 < t_2`` and the eigenvalue cap ``Lambda``."""

    t_2: float
    t_1: float
    t_m1: float
    t_m2: float
    lambda_cap: float = 0.0

    @property
    def t_0(self) -> float:
        """Anchor radius ``sqrt(t_1 t_-1)``."""
        return float(np.exp(0.5 * (np.log(self.t_1) + np.log(self.t_m1))))

    def taus(self) -> dict:
        return {k: float(np.log(getattr(self, k))) for k in ("t_m2", "t_m1", "t_1", "t_2")} | {
            "t_0": 0.5 * (np.log(self.t_1) + np.log(self.t_m1))}

    def violations(self, lam: float | None = None) -> list[str]:
        """Failed hypotheses of the annulus estimate (empty if all hold)."""
        out = []
        if not 0 < self.t_m2 < self.t_m1 < self.t_1 < self.t_2 <= 1:
            out.append("need 0 < t_-2 < t_-1 < t_1 < t_2 <= 1")
        if self.t_2 < 2 * self.t_1:
            out.append("need t_2 >= 2 t_1")
        if self.t_m1 < 2 * self.t_m2:
            out.append("need t_-1 >= 2 t_-2")
        if self.t_1 > 0 and self.t_m2 > 0 and 6 * np.log(self.t_1) > np.log(self.t_m2):
            out.append("need t_1^6 <= t_-2")
        lam_eff = abs(self.lambda_cap if lam is None else lam)
        if lam_eff * np.sqrt(self.t_2) > 0.1:
            out.append(f"need |lambda| t_2^(1/2) <= 1/10, got {lam_eff * np.sqrt(self.t_2):.6g}")
        return out


def corollary1_schedule(t_2: float, Lambda: float = 0.0) -> AnnulusSchedule:
    """``t_1 = t_2^4 / 2``, ``t_-1 = t_1 / 2``, ``t_-2 = t_-1^4 / 2``."""
    t_1 = 0.5 * t_2 ** 4
    t_m1 = 0.5 * t_1
    t_m2 = 0.5 * t_m1 ** 4
    return AnnulusSchedule(t_2, t_1, t_m1, t_m2, Lambda)


def log_prop32_bound(mu: float, sched: AnnulusSchedule, check: bool = True) -> float:
    """Natural log of the annulus bound."""
    if check:
        bad = sched.violations()
        if mu < 1:
            bad.append("need mu >= 1")
        if bad:
            raise HypothesisViolation(bad)
    l1, l2, lm1, lm2 = (np.log(x) for x in (sched.t_1, sched.t_2, sched.t_m1, sched.t_m2))
    first = np.log(3.0) + (2 * mu + 1) * (l1 - l2)
    second = (l1 - lm1) + (2 * mu - 1) * (lm2 - lm1)
    return float(6 * LN2 + max(first, second))


def prop32_bound(mu: float, sched: AnnulusSchedule, check: bool = True) -> float:
    """``2^6 max{3 (t_1/t_2)^(2mu+1), (t_1/t_-1)(t_-2/t_-1)^(2mu-1)}``.

    Raises:
        HypothesisViolation: schedule outside the hypotheses (only when
            ``check``; disabling is meant for formula unit tests).
    """
    return float(np.exp(log_prop32_bound(mu, sched, check)))


@dataclass
class RatioReport:
    """Inner-to-outer mass ratio for one solution, against the bound."""

    measured: float
    bound: float
    mu: float
    lam: float
    theta: float
    log_measured: float
    log_bound: float
    checked: bool = True
    eig_max: float = float("nan")
    grid_values: np.ndarray | None = None

    @property
    def passed(self) -> bool:
        return self.log_measured <= self.log_bound

    @property
    def margin(self) -> float:
        """``log(bound / measured)``; positive when the bound holds."""
        return self.log_bound - self.log_measured


def _integrate_annulus(mu, lam, sched, anchor, rtol):
    tk = sched.taus()
    return integrate(RadialParams(mu, lam, EuclideanProfile()), (tk["t_m2"], tk["t_2"]),
                     anchor, anchor=tk["t_0"], rtol=rtol)


def _log_ratio(traj: RadialTrajectory, sched: AnnulusSchedule, measure="t") -> float:
    tk = sched.taus()
    inner = log_l2_norm_sq(traj, tk["t_m1"], tk["t_1"], measure)
    outer = log_l2_norm_sq(traj, tk["t_m2"], tk["t_2"], measure)
    return inner - outer


def measured_ratio(mu: float, lam: float, sched: AnnulusSchedule, theta: float,
                   scale: complex = 1.0, anchor=None, check: bool = True,
                   measure: str = "t", rtol: float = 1e-10) -> RatioReport:
    """Mass ratio for the solution with ``B(t_0) = scale (cos theta, sin theta)``.

    Args:
        anchor: explicit complex ``B(t_0)``, overriding ``theta``/``scale``.
        measure: ``"t"`` (the estimate's measure) or ``"log"`` (``d tau``).
    """
    if check:
        bad = sched.violations(lam)
        if bad:
            raise HypothesisViolation(bad)
    w = scale * np.array([np.cos(theta), np.sin(theta)]) if anchor is None else anchor
    traj = _integrate_annulus(mu, lam, sched, w, rtol)
    lr = _log_ratio(traj, sched, measure)
    lb = log_prop32_bound(mu, sched, check=False)
    return RatioReport(float(np.exp(lr)), float(np.exp(lb)), mu, lam, float(theta), lr, lb, check)


def _polar_at(traj: RadialTrajectory, x):
    """Vectorised ``(theta, ell)`` of the first part on the ``tau`` axis."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    th = np.full(x.size, np.nan)
    el = np.full(x.size, np.nan)
    for seg in traj.segments:
        m = (x >= seg.v_lo - 1e-13) & (x <= seg.v_hi + 1e-13) & np.isnan(th)
        if m.any():
            a, b = seg.state(np.clip(x[m], seg.v_lo, seg.v_hi))
            th[m], el[m] = a[0], b[0]
    if np.isnan(th).any():
        raise ValueError("evaluation point outside trajectory coverage")
    return th, el


def _panel_nodes(trajs, a: float, b: float, measure: str):
    """Gauss-Legendre nodes on the union of solver grids, with log weights."""
    g = np.unique(np.concatenate([np.clip(tr.grid, a, b) for tr in trajs] + [[a, b]]))

    def logf(x):
        rows = []
        for tr in trajs:
            th, el = _polar_at(tr, x)
            rows += [2 * el + (x if measure == "t" else 0.0), 2 * th]
        return np.vstack(rows)

    g = subdivide_panels(g, logf)
    lo, hi = g[:-1], g[1:]
    half = 0.5 * (hi - lo)
    x = (0.5 * (hi + lo))[:, None] + half[:, None] * _GL_X[None, :]
    log_w = np.log(half)[:, None] + np.log(_GL_W)[None, :]
    if measure == "t":
        log_w = log_w + x
    return x.ravel(), log_w.ravel()


def _log_gram(p1, p2, log_w):
    """Log-diagonal and normalised correlation of two real solutions."""
    (t1, e1), (t2, e2) = p1, p2
    g11 = float(logsumexp(2 * e1 + log_w))
    g22 = float(logsumexp(2 * e2 + log_w))
    cross = e1 + e2 + log_w - 0.5 * (g11 + g22)
    corr = float(np.sum(np.exp(cross) * np.cos(t1 - t2)))
    return g11, g22, corr


class _RatioForm:
    """Mass ratio of all real solutions as a quotient of 2x2 quadratic forms.

    The basis is ``V1`` (``e1`` at ``t_-2``, integrated outwards) and ``V2``
    (``e2`` at ``t_2``, integrated inwards).  Each is dominated at its far
    end, so their outer Gram matrix is well conditioned; the basis through
    ``e1``, ``e2`` at ``t_0`` is not.  In coordinates ``(x, y)`` of the
    outer-normalised basis, ``ratio = (x I x) / (x O x)``; ``log_scale``
    carries the common magnitude of ``I``.
    """

    def __init__(self, inner, outer, u, log_c):
        i11, i22, ic = inner
        o11, o22, oc = outer
        self.O = np.array([[1.0, oc], [oc, 1.0]])
        d1, d2 = i11 - o11, i22 - o22
        self.log_scale = max(d1, d2)
        off = ic * np.exp(0.5 * (d1 + d2) - self.log_scale)
        self.I = np.array([[np.exp(d1 - self.log_scale), off],
                           [off, np.exp(d2 - self.log_scale)]])
        self.u = u                      # columns: unit V1(t_0), V2(t_0)
        # alpha u1 + beta u2 = anchor  =>  (x, y) = (alpha, beta e^H) up to scale
        self.H = (0.5 * o22 - log_c[1]) - (0.5 * o11 - log_c[0])

    def xy(self, theta):
        """Normalised basis coordinates of the solution through angle ``theta``."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        ab = np.linalg.solve(self.u, np.stack([np.cos(theta), np.sin(theta)]))
        fx, fy = (np.exp(-self.H), 1.0) if self.H > 0 else (1.0, np.exp(self.H))
        xy = np.stack([ab[0] * fx, ab[1] * fy])
        return xy / np.hypot(xy[0], xy[1])

    def theta_of(self, phi: float) -> float:
        """Anchor angle in ``(-pi/2, pi/2]`` at ``t_0`` of the basis direction ``phi``."""
        fa, fb = (1.0, np.exp(-self.H)) if self.H > 0 else (np.exp(self.H), 1.0)
        w = self.u @ np.array([np.cos(phi) * fa, np.sin(phi) * fb])
        th = float(np.arctan2(w[1], w[0]))
        # keep tiny angles near 0 exact: no reduction mod pi across the origin
        if th > np.pi / 2:
            th -= np.pi
        elif th <= -np.pi / 2:
            th += np.pi
        return th

    def log_form(self, xy):
        num = np.einsum("i...,ij,j...->...", xy, self.I, xy)
        den = np.einsum("i...,ij,j...->...", xy, self.O, xy)
        with np.errstate(divide="ignore"):
            return self.log_scale + np.log(np.maximum(num, 0.0)) - np.log(den)

    def log_ratio(self, theta):
        return self.log_form(self.xy(theta))

    def log_ratio_phi(self, phi):
        phi = np.asarray(phi, dtype=float)
        return self.log_form(np.stack([np.cos(phi), np.sin(phi)]))

    def __call__(self, theta):
        return np.exp(self.log_ratio(theta))

    def log_max_eig(self) -> float:
        """Log of the largest generalised eigenvalue (NaN if ill-posed)."""
        try:
            top = eigh(self.I, self.O, eigvals_only=True)[-1]
        except (np.linalg.LinAlgError, ValueError):
            return float("nan")
        return float(self.log_scale + np.log(top)) if top > 0 else float("nan")


def ratio_curve(mu: float, lam: float, sched: AnnulusSchedule, measure: str = "t",
                rtol: float = 1e-10) -> _RatioForm:
    """Callable ``theta -> ratio`` built from two end-anchored integrations."""
    tk = sched.taus()
    params = RadialParams(mu, lam, EuclideanProfile())
    span = (tk["t_m2"], tk["t_2"])
    v1 = integrate(params, span, [1.0, 0.0], anchor=span[0], rtol=rtol)
    v2 = integrate(params, span, [0.0, 1.0], anchor=span[1], rtol=rtol)

    def gram(a, b):
        x, log_w = _panel_nodes([v1, v2], a, b, measure)
        return _log_gram(_polar_at(v1, x), _polar_at(v2, x), log_w)

    inner = gram(tk["t_m1"], tk["t_1"])
    outer = gram(*span)
    (th1, l1), (th2, l2) = (_polar_at(v, tk["t_0"]) for v in (v1, v2))
    u = np.array([[np.cos(th1[0]), np.cos(th2[0])], [np.sin(th1[0]), np.sin(th2[0])]])
    return _RatioForm(inner, outer, u, (float(l1[0]), float(l2[0])))


def direct_log_ratios(mu: float, lam: float, sched: AnnulusSchedule, thetas,
                      measure: str = "t", rtol: float = 1e-10):
    """Log mass ratios for anchors ``(cos th, sin th)`` at ``t_0``, one batch.

    Each solution is integrated directly from ``t_0``, which is the accurate
    route for a prescribed anchor angle.
    """
    tk = sched.taus()
    logs = batch_log_masses(EuclideanProfile(), mu, lam, tk["t_0"], thetas,
                            [(tk["t_m1"], tk["t_1"]), (tk["t_m2"], tk["t_2"])],
                            measure=measure, rtol=rtol, atol=rtol * 1e-2)
    return logs[0] - logs[1]


def max_ratio(mu: float, lam: float, sched: AnnulusSchedule, n_theta: int = 64,
              check: bool = True, rtol: float = 1e-10) -> RatioReport:
    """Worst-case ratio over all real solutions.

    A grid of ``n_theta`` anchor angles in ``[0, pi)`` is integrated
    directly and the maximum is refined by golden-section search.  The
    refinement runs in the outer-normalised basis angle, where the ratio is
    smooth; in the anchor angle the maximiser can be narrower than double
    precision resolves (``lam != 0``, ``mu >= 2``), so ``report.theta`` is
    then only the nearest representable angle.  The
    largest generalised eigenvalue of the Gram pair is an independent
    estimate of the same maximum, exposed as ``report.eig_max``.
    """
    if check:
        bad = sched.violations(lam)
        if bad:
            raise HypothesisViolation(bad)
    form = ratio_curve(mu, lam, sched, rtol=rtol)
    th = np.arange(n_theta) * np.pi / n_theta
    log_vals = direct_log_ratios(mu, lam, sched, th, rtol=rtol)
    i = int(np.argmax(log_vals))
    ph = np.arange(n_theta) * np.pi / n_theta
    j = int(np.argmax(form.log_ratio_phi(ph)))
    h = np.pi / n_theta
    res = minimize_scalar(lambda p: -form.log_ratio_phi(p),
                          bracket=(ph[j] - h, ph[j], ph[j] + h), method="golden", tol=1e-12)
    if -res.fun >= log_vals[i]:
        best_t, log_best = form.theta_of(float(res.x)), float(-res.fun)
    else:
        best_t, log_best = float(th[i]), float(log_vals[i])
    lb = log_prop32_bound(mu, sched, check=False)
    return RatioReport(float(np.exp(log_best)), float(np.exp(lb)), mu, lam, best_t, log_best,
                       lb, check, eig_max=float(np.exp(form.log_max_eig())),
                       grid_values=np.exp(log_vals))


@dataclass
class ModeRow:
    mu: float
    multiplicity: int
    ratio: float
    mode_bound: float
    target: float

    @property
    def passed(self) -> bool:
        return self.ratio <= self.target and self.ratio <= self.mode_bound


@dataclass
class CorollaryReport:
    """Per-mode ratios against the corollary's bound ``target``."""

    name: str
    params: dict
    target: float
    rows: list
    chain: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (not self.violations and all(r.passed for r in self.rows)
                and all(bool(v) for k, v in self.chain.items() if k.startswith("ok_")))

    @property
    def worst(self) -> float:
        return max((r.ratio / r.target for r in self.rows), default=0.0)


def _corollary_violations(n, t_2, Lambda, lam):
    bad = []
    if int(n) != n or n < 3:
        bad.append("need n >= 3")
    if not 0 < t_2 < 2 ** -4:
        bad.append("need 0 < t_2 < 2^-4")
    if abs(lam) > Lambda:
        bad.append("need |lambda| <= Lambda")
    if Lambda * np.sqrt(t_2) > 0.1:
        bad.append(f"need Lambda t_2^(1/2) <= 1/10, got {Lambda * np.sqrt(t_2):.6g}")
    return bad


def corollary1_check(n: int, t_2: float, Lambda: float, lam: float, mu_max: float,
                     check: bool = True, n_theta: int = 64) -> CorollaryReport:
    """Every mode's worst-case ratio against ``2^7 t_1^2 t_2``.

    Also evaluates the aggregation chain: the ``mu = 1`` bound equals
    ``2^6 max{3 2^-3 t_2^9, t_-1^3}``, which is at most ``2^7 t_1^2 t_2``.

    Raises:
        HypothesisViolation: if ``check`` and a hypothesis fails.
    """
    bad = _corollary_violations(n, t_2, Lambda, lam)
    if bad and check:
        raise HypothesisViolation(bad)
    sched = corollary1_schedule(t_2, Lambda)
    target = 2 ** 7 * sched.t_1 ** 2 * t_2
    rows = []
    for mu, mult in mode_spectrum(n, mu_max).positive():
        rep = max_ratio(mu, lam, sched, n_theta=n_theta, check=False)
        rows.append(ModeRow(mu, mult, max(rep.measured, rep.eig_max), rep.bound, target))
    chain_max = 2 ** 6 * max(3 * 2 ** -3 * t_2 ** 9, sched.t_m1 ** 3)
    mode1 = prop32_bound(1.0, sched, check=False)
    chain = {
        "mode_bound_mu1": mode1,
        "chain_max": chain_max,
        "target": target,
        "ok_mode_bounds_below_chain": all(r.mode_bound <= chain_max * (1 + 1e-12) for r in rows),
        "ok_chain_below_target": chain_max <= target,
        "aggregate_ratio": max((r.ratio for r in rows), default=0.0),
    }
    return CorollaryReport("corollary1", {"n": n, "t_2": t_2, "Lambda": Lambda, "lambda": lam,
                                          "mu_max": mu_max}, target, rows, chain, bad)


def dyadic_schedule(t_2: float, k_max: int, Lambda: float = 0.0) -> list[AnnulusSchedule]:
    """Schedules ``t_2,k = 2^(-k/4) t_2``, ``t_1,k = 2^-k t_1``, ``t_-1,k = t_1,k / 2``,
    ``t_-2,k = t_-1,k^4 / 2`` for ``k = 0..k_max``."""
    t_1 = 0.5 * t_2 ** 4
    out = []
    for k in range(k_max + 1):
        t2k = 2 ** (-k / 4) * t_2
        t1k = 2.0 ** -k * t_1
        tm1k = 0.5 * t1k
        out.append(AnnulusSchedule(t2k, t1k, tm1k, 0.5 * tm1k ** 4, Lambda))
    return out


def corollary2_check(n: int, t_2: float, Lambda: float, lam: float, mu_max: float,
                     check: bool = True, k_max: int = 12) -> CorollaryReport:
    """Regular-at-origin solutions: ``int_0^t_1 / int_0^t_2 <= 2^9 t_1^2 t_2``.

    The dyadic decomposition is reproduced as well: the annuli
    ``[t_-1,k, t_1,k]`` tile ``(0, t_1]``, each ``(t_1,k, t_2,k)`` pair is a
    valid schedule, the annulus-corollary bounds ``2^7 t_1,k^2 t_2,k`` are at most
    ``2^7 2^-2k t_1^2 t_2``, and ``sum_k 2^-2k`` tends to ``4/3``.
    """
    bad = _corollary_violations(n, t_2, Lambda, lam)
    if bad and check:
        raise HypothesisViolation(bad)
    t_1 = 0.5 * t_2 ** 4
    target = 2 ** 9 * t_1 ** 2 * t_2
    tau1, tau2 = np.log(t_1), np.log(t_2)
    prof = EuclideanProfile()
    rows = []
    for mu, mult in mode_spectrum(n, mu_max).positive():
        traj = regular_solution(prof, mu, lam, tau2, eta=1e-6 * t_1)
        lr = log_l2_norm_sq(traj, -np.inf, tau1) - log_l2_norm_sq(traj, -np.inf, tau2)
        rows.append(ModeRow(mu, mult, float(np.exp(lr)), target, target))
    scheds = dyadic_schedule(t_2, k_max, Lambda)
    per_k = [2 ** 7 * s.t_1 ** 2 * s.t_2 for s in scheds]
    scaled = [2 ** 7 * 2.0 ** (-2 * k) * t_1 ** 2 * t_2 for k in range(k_max + 1)]
    partial = float(np.sum(2.0 ** (-2 * np.arange(k_max + 1))))
    chain = {
        "target": target,
        "ok_tiling": all(np.isclose(a.t_m1, b.t_1, rtol=1e-15) for a, b in zip(scheds, scheds[1:])),
        "ok_schedules_valid": all(not s.violations(0.0) for s in scheds),
        "ok_per_k_scaled": all(p <= q * (1 + 1e-12) for p, q in zip(per_k, scaled)),
        "geometric_partial_sum": partial,
        "geometric_limit": 4.0 / 3.0,
        "ok_sum_below_limit": partial <= 4.0 / 3.0,
        "ok_combined_below_target": 2 ** 7 * (4.0 / 3.0) * t_1 ** 2 * t_2 <= target,
    }
    return CorollaryReport("corollary2", {"n": n, "t_2": t_2, "Lambda": Lambda, "lambda": lam,
                                          "mu_max": mu_max}, target, rows, chain, bad)
