"""Radial 2x2 systems of a Dirac eigenproblem on a warped product.

For a sphere mode ``mu`` and a candidate eigenvalue ``lam`` the mode
coefficients ``B = (beta_minus, beta_plus)`` satisfy

    B' = [[mu / rho, -(lam - V)], [lam - V, -mu / rho]] B,

with ``rho = t`` on a Euclidean annulus and ``V`` an optional zeroth-order
potential carried by the profile.  On the annulus, ``t = exp(tau)`` turns
this into ``B_tau = A(tau) B`` with ``A = [[mu, -lam e^tau], [lam e^tau, -mu]]``.

Real solutions are integrated in log-polar form ``B = e^ell (cos th, sin th)``:

    th' = jac * (lam - V) - mu * q * sin(2 th),
    ell' = mu * q * cos(2 th),

where ``jac = ds/dv`` and ``q = jac / rho`` come from the chart of each
profile piece.  The modulus never appears, so solutions spanning hundreds
of orders of magnitude stay representable, and ``th`` is the continuous
Pruefer angle used for eigenvalue counting.  Complex data are carried as a
real and an imaginary part, each propagated separately.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import logsumexp

from .profiles import Chart, EuclideanProfile, WarpProfile

__all__ = [
    "RadialParams", "RadialTrajectory", "Segment", "IntegrationError",
    "integrate", "propagate", "exact_lambda0", "almost_solution",
    "ExactSolution", "AlmostSolution", "l2_norm_sq", "log_l2_norm_sq",
    "system_matrix", "log_system_matrix", "operator_norm", "gauss_nodes",
    "subdivide_panels", "batch_log_masses",
]

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12
# absolute tolerance on the angle relative to ``atol``: angles near 0 carry
# tiny seeds (``tan theta``) that later growth amplifies, so they are
# tracked to relative accuracy
ANGLE_ATOL_FACTOR = 1e-10
_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


class IntegrationError(RuntimeError):
    """Raised when the ODE solver fails (step-size underflow, bad profile)."""


@dataclass(frozen=True)
class RadialParams:
    """Mode ``mu``, eigenvalue candidate ``lam`` and the warp profile."""

    mu: float
    lam: float
    profile: WarpProfile = field(default_factory=EuclideanProfile)

    def __post_init__(self):
        if not np.isfinite(self.mu) or not np.isfinite(self.lam):
            raise ValueError("mu and lam must be finite")


def system_matrix(mu: float, lam: float, t, rho=None):
    """Coefficient matrix in the ``t`` coordinate, shape ``(..., 2, 2)``."""
    t = np.asarray(t, dtype=float)
    r = t if rho is None else np.asarray(rho(t), dtype=float)
    a = mu / r
    out = np.empty(t.shape + (2, 2))
    out[..., 0, 0] = a
    out[..., 0, 1] = -lam
    out[..., 1, 0] = lam
    out[..., 1, 1] = -a
    return out


def log_system_matrix(mu: float, lam: float, tau):
    """``A(tau)`` of the Euclidean system in ``tau = log t``."""
    tau = np.asarray(tau, dtype=float)
    x = lam * np.exp(tau)
    out = np.empty(tau.shape + (2, 2))
    out[..., 0, 0] = mu
    out[..., 0, 1] = -x
    out[..., 1, 0] = x
    out[..., 1, 1] = -mu
    return out


def operator_norm(mu: float, lam: float, tau_lo: float, tau_hi: float) -> float:
    """``sup ||A(tau)||`` over ``[tau_lo, tau_hi]``; equals ``mu + |lam| e^tau_hi``.

    ``A^T A`` has eigenvalues ``(mu +- |lam| e^tau)^2``.
    """
    return abs(mu) + abs(lam) * np.exp(max(tau_lo, tau_hi))


# ---------------------------------------------------------------------------
# propagation engine

@dataclass
class Segment:
    """Dense solution on one chart, ``v`` running from ``v0`` to ``v1``.

    The true state is ``theta = sol.theta + theta_shift`` and
    ``ell = sol.ell + ell_shift`` (shifts per batch entry).
    """

    chart: Chart
    v0: float
    v1: float
    sol: object
    ts: np.ndarray
    ell_shift: np.ndarray
    theta_shift: np.ndarray

    def state(self, v):
        y = self.sol(np.asarray(v, dtype=float))
        K = self.ell_shift.size
        th = y[:K] + self.theta_shift[:, None] if y.ndim == 2 else y[:K] + self.theta_shift
        el = y[K:] + self.ell_shift[:, None] if y.ndim == 2 else y[K:] + self.ell_shift
        return th, el

    @property
    def v_lo(self):
        return min(self.v0, self.v1)

    @property
    def v_hi(self):
        return max(self.v0, self.v1)


def _rhs(chart: Chart, mu: float, lams: np.ndarray):
    K = lams.size

    def f(v, y):
        th = y[:K]
        jac, q, pot = chart.terms(float(v))
        w = lams - pot
        mq = mu * q
        return np.concatenate([jac * w - mq * np.sin(2 * th), mq * np.cos(2 * th)])

    return f


def propagate(segments: Sequence[tuple[Chart, float, float]], mu: float, lams,
              theta0, ell0, rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL,
              dense: bool = False):
    """Propagate a batch of log-polar states across consecutive chart segments.

    Args:
        segments: ``(chart, v_start, v_end)`` triples, e.g. from
            :meth:`WarpProfile.segments`.
        mu: sphere mode.
        lams: eigenvalue candidates, one per batch entry.
        theta0, ell0: initial angle and log-modulus per batch entry.
        dense: also return a list of :class:`Segment` with dense output.

    Returns:
        ``(theta, ell)`` at the end (and the segment list if ``dense``).
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    K = lams.size
    th = np.broadcast_to(np.asarray(theta0, dtype=float), (K,)).copy()
    el = np.broadcast_to(np.asarray(ell0, dtype=float), (K,)).copy()
    out = []
    atols = np.concatenate([np.full(K, atol * ANGLE_ATOL_FACTOR), np.full(K, atol)])
    for chart, va, vb in segments:
        y0 = np.concatenate([th, el])
        try:
            sol = solve_ivp(_rhs(chart, mu, lams), (va, vb), y0, method="DOP853",
                            rtol=rtol, atol=atols, dense_output=dense)
        except (ValueError, FloatingPointError, ZeroDivisionError) as exc:
            raise IntegrationError(f"profile evaluation failed: {exc}") from exc
        if sol.status != 0:
            raise IntegrationError(sol.message)
        yend = sol.y[:, -1]
        if not np.all(np.isfinite(yend)):
            raise IntegrationError("non-finite state; profile evaluation failure")
        if dense:
            out.append(Segment(chart, va, vb, sol.sol, sol.t,
                               np.zeros(K), np.zeros(K)))
        th, el = yend[:K], yend[K:]
    if dense:
        return th, el, out
    return th, el


def subdivide_panels(edges, logf, max_change: float = 1.5):
    """Split quadrature panels so ``logf`` changes by at most ``max_change``.

    ``logf`` maps an array of points to rows (log-integrand, angle, ...);
    the 8-point rule is then accurate to rounding for integrands like
    ``exp(2 ell)``, however long the solver steps were.
    """
    edges = np.asarray(edges, dtype=float)
    f = np.atleast_2d(logf(edges))
    f = np.where(np.isfinite(f), f, 0.0)
    change = np.max(np.abs(np.diff(f, axis=1)), axis=0)
    n = np.maximum(1, np.ceil(change / max_change)).astype(int)
    if np.all(n == 1):
        return edges
    parts = [np.linspace(a, b, k + 1)[:-1] for a, b, k in zip(edges[:-1], edges[1:], n)]
    return np.concatenate(parts + [edges[-1:]])


def gauss_nodes(seg: Segment, va: float, vb: float):
    """Gauss-Legendre nodes over ``[va, vb]`` following the solver steps.

    Returns ``(v, log_w)`` where ``log_w`` includes ``|ds/dv|``.
    """
    lo, hi = min(va, vb), max(va, vb)
    ts = np.sort(seg.ts)
    edges = np.unique(np.concatenate([[lo, hi], ts[(ts > lo) & (ts < hi)]]))
    # unbounded pieces (poles) never reach here: callers clip with finite v

    def logf(v):
        th, el = seg.state(v)
        return np.vstack([2 * el + np.log(np.abs(seg.chart.jac(v))), 2 * th])

    edges = subdivide_panels(edges, logf)
    a, b = edges[:-1], edges[1:]
    half = 0.5 * (b - a)
    v = (0.5 * (a + b))[:, None] + half[:, None] * _GL_X[None, :]
    w = half[:, None] * _GL_W[None, :]
    v = v.ravel()
    log_w = np.log(w.ravel()) + np.log(np.abs(seg.chart.jac(v)))
    return v, log_w


# ---------------------------------------------------------------------------
# trajectories

@dataclass
class RadialTrajectory:
    """Integrated solution of the radial system.

    Attributes:
        params: the system that was solved.
        coordinate: ``"tau"`` or ``"t"``; the unit of ``grid`` and of
            interval arguments.
        grid: increasing solver nodes in ``coordinate``.
        segments: dense pieces, each with ``P`` real parts (``P = 2`` for a
            complex solution: real and imaginary part).
        coverage: ``(lo, hi)`` in ``coordinate``.
        pole_tails: ``{"lo"|"hi": (pole position, log mass)}`` for the L^2
            mass between a pole and the first integration node.
    """

    params: RadialParams
    coordinate: str
    segments: list
    coverage: tuple[float, float]
    parts: int = 1
    imag_zero: bool = True
    pole_tails: dict = field(default_factory=dict)
    grid: np.ndarray = field(init=False)

    def __post_init__(self):
        pts = [self._coord(seg, seg.ts) for seg in self.segments]
        g = np.unique(np.concatenate(pts)) if pts else np.array(self.coverage)
        lo, hi = self.coverage
        self.grid = g[(g >= lo) & (g <= hi)]
        if self.grid.size < 2:
            self.grid = np.array([lo, hi], dtype=float)

    def _coord(self, seg, v):
        if self.coordinate == "tau":
            return np.asarray(v, dtype=float)
        return self.params.profile.from_s(seg.chart.s(v))

    def _v_of(self, seg, x: float) -> float:
        """Chart coordinate of ``x``, exact at the segment ends."""
        if self.coordinate == "tau":
            return float(x)
        s = float(self.params.profile.to_s(x))
        for v in (seg.v0, seg.v1):
            if np.isfinite(v) and float(seg.chart.s(v)) == s:
                return float(v)
        return float(seg.chart.v_of(s))

    def _s_range(self, seg):
        a, b = self._coord(seg, seg.v0), self._coord(seg, seg.v1)
        return float(min(a, b)), float(max(a, b))

    # -- evaluation -------------------------------------------------------
    def _locate(self, x: float):
        """Segment and chart coordinate for a point in ``coordinate``."""
        for seg in self.segments:
            lo, hi = self._s_range(seg)
            pad = 1e-13 * max(1.0, abs(lo), abs(hi))
            if lo - pad <= x <= hi + pad:
                v = self._v_of(seg, float(np.clip(x, lo, hi)))
                return seg, float(np.clip(v, seg.v_lo, seg.v_hi))
        raise ValueError(f"point {x!r} outside trajectory coverage {self.coverage}")

    def polar(self, x):
        """``(theta, ell)`` arrays of shape ``(parts, len(x))``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        th = np.empty((self.parts, x.size))
        el = np.empty((self.parts, x.size))
        for i, xi in enumerate(x):
            seg, v = self._locate(xi)
            a, b = seg.state(v)
            th[:, i], el[:, i] = a, b
        if not self.imag_zero:
            return th, el
        el[1:] = -np.inf
        return th, el

    def __call__(self, x):
        """Complex values ``B(x)``, shape ``(len(x), 2)``."""
        th, el = self.polar(x)
        r = np.exp(el)
        comp = np.stack([r * np.cos(th), r * np.sin(th)], axis=-1)
        out = comp[0].astype(complex)
        if self.parts > 1:
            out = out + 1j * comp[1]
        return out

    @property
    def values(self) -> np.ndarray:
        return self(self.grid)

    def log_abs(self, x):
        """``log |B(x)|``."""
        _, el = self.polar(x)
        return 0.5 * logsumexp(2 * el, axis=0)

    def to_columns(self) -> np.ndarray:
        """Rows ``(x, Re b-, Im b-, Re b+, Im b+)``."""
        v = self.values
        return np.column_stack([self.grid, v[:, 0].real, v[:, 0].imag,
                                v[:, 1].real, v[:, 1].imag])

    def write_columns(self, path) -> None:
        np.savetxt(path, self.to_columns(), fmt="%.17e", delimiter=",",
                   header=f"{self.coordinate},re_beta_minus,im_beta_minus,"
                          "re_beta_plus,im_beta_plus", comments="")

    # -- quadrature -------------------------------------------------------
    def quad_nodes(self, a: float, b: float, with_s: bool = False):
        """Quadrature nodes for ``int_a^b (.) ds`` in every segment.

        Yields ``(log_w, theta, ell)`` with ``theta``/``ell`` shaped
        ``(parts, N)``; ``with_s`` appends the node positions ``s``.
        """
        lo, hi = self.coverage
        tol = 1e-12 * max(1.0, abs(lo), abs(hi))
        if a > b:
            a, b = b, a
        lo_ok = self.pole_tails["lo"][0] if "lo" in self.pole_tails else lo
        hi_ok = self.pole_tails["hi"][0] if "hi" in self.pole_tails else hi
        if a < lo_ok - tol or b > hi_ok + tol:
            raise ValueError(f"interval [{a}, {b}] outside coverage {self.coverage}")
        a, b = max(a, lo), min(b, hi)
        for seg in self.segments:
            s_lo, s_hi = self._s_range(seg)
            xa, xb = max(a, s_lo), min(b, s_hi)
            if not xa < xb:
                continue
            va, vb = self._v_of(seg, xa), self._v_of(seg, xb)
            va, vb = np.clip([va, vb], seg.v_lo, seg.v_hi)
            if va == vb:
                continue
            v, log_w = gauss_nodes(seg, va, vb)
            th, el = seg.state(v)
            if with_s:
                yield log_w, th, el, seg.chart.s(v)
            else:
                yield log_w, th, el


def log_l2_norm_sq(traj: RadialTrajectory, a: float, b: float, measure: str = "t") -> float:
    """``log int_a^b |B|^2 dt`` (``a``, ``b`` in the trajectory coordinate).

    ``measure="log"`` integrates against ``dt / t`` instead (``d tau`` on
    the Euclidean annulus, where it is invariant under ``t -> t0^2 / t``).
    """
    if measure not in ("t", "log"):
        raise ValueError("measure must be 't' or 'log'")
    terms = []
    for log_w, th, el, s in traj.quad_nodes(a, b, with_s=True):
        if measure == "log":
            log_w = log_w - np.log(np.abs(s))
        e = 2 * el if not traj.imag_zero else 2 * el[:1]
        terms.append((log_w[None, :] + e).ravel())
    for x_pole, log_mass in traj.pole_tails.values():
        if measure == "t" and min(a, b) <= x_pole <= max(a, b):
            terms.append(np.atleast_1d(log_mass))
    if not terms:
        return -np.inf
    return float(logsumexp(np.concatenate(terms)))


def l2_norm_sq(traj: RadialTrajectory, a: float, b: float, measure: str = "t") -> float:
    """``int_a^b |B(t)|^2 dt``; the ``t`` measure is used whatever the coordinate."""
    return float(np.exp(log_l2_norm_sq(traj, a, b, measure)))


# ---------------------------------------------------------------------------
# integration front end

def _anchor_polar(initial):
    w = np.asarray(initial, dtype=complex).reshape(2)
    if not np.all(np.isfinite(w)):
        raise ValueError("initial data must be finite")
    re, im = w.real, w.imag
    if not np.any(re) and not np.any(im):
        raise ValueError("initial data must be nonzero")
    imag_zero = not np.any(im)
    parts = [re, im]
    th = np.array([np.arctan2(p[1], p[0]) for p in parts])
    with np.errstate(divide="ignore"):
        el = np.array([np.log(np.hypot(p[0], p[1])) for p in parts])
    # a vanishing part is propagated with a dummy unit modulus and masked later
    zero = ~np.isfinite(el)
    el[zero] = 0.0
    return th, el, zero, imag_zero


def integrate(params: RadialParams, interval: tuple[float, float], initial,
              anchor: float | None = None, rtol: float = DEFAULT_RTOL,
              atol: float = DEFAULT_ATOL) -> RadialTrajectory:
    """Integrate the radial system on ``interval`` from data at ``anchor``.

    Args:
        params: mode, eigenvalue candidate and profile.
        interval: ``(lo, hi)`` in the profile coordinate (``tau = log t``
            for the Euclidean profile, ``t`` otherwise).
        initial: complex 2-vector ``B(anchor)``.
        anchor: point of ``interval`` carrying the initial data; defaults
            to ``interval[0]``.
        rtol, atol: integrator tolerances (applied to angle and log-modulus).

    Returns:
        A :class:`RadialTrajectory` covering ``interval``.

    Raises:
        ValueError: interval outside the profile domain, bad tolerance.
        IntegrationError: solver failure.
    """
    if rtol <= 0 or atol <= 0:
        raise ValueError("tolerances must be positive")
    lo, hi = map(float, interval)
    if not lo < hi:
        raise ValueError("interval must satisfy lo < hi")
    x0 = lo if anchor is None else float(anchor)
    if not lo <= x0 <= hi:
        raise ValueError("anchor must lie in the interval")
    prof = params.profile
    A, B = prof.domain
    s_lo, s_hi = prof.to_s(lo), prof.to_s(hi)
    if s_lo < A or s_hi > B or (s_lo <= 0 and prof.coordinate == "tau"):
        raise ValueError(f"interval {interval} outside profile domain {prof.domain}")
    if prof.poles[0] and s_lo <= A or prof.poles[1] and s_hi >= B:
        raise ValueError("interval touches a pole; use the pole shooting routines")

    th0, el0, zero, imag_zero = _anchor_polar(initial)
    lams = np.full(2, params.lam)
    s0 = float(prof.to_s(x0))
    tau = prof.coordinate == "tau"
    segs = []
    for end in (lo, hi):
        if end == x0:
            continue
        s_end = float(prof.to_s(end))
        route = prof.segments(s0, s_end, v_a=x0 if tau else None,
                              v_b=end if tau else None)
        _, _, dense = propagate(route, params.mu, lams, th0, el0, rtol, atol, dense=True)
        segs.extend(dense)
    for seg in segs:
        seg.ell_shift = np.where(zero, -np.inf, 0.0) if np.any(zero) else seg.ell_shift
    traj = RadialTrajectory(params=params, coordinate=prof.coordinate, segments=segs,
                            coverage=(lo, hi), parts=2, imag_zero=imag_zero)
    return traj


# ---------------------------------------------------------------------------
# closed forms

@dataclass(frozen=True)
class ExactSolution:
    """``t -> (c1 (t/t0)^mu, c2 (t/t0)^-mu)``: the ``lam = 0`` solutions."""

    mu: float
    c1: complex
    c2: complex
    t0: float

    def __call__(self, t):
        r = np.asarray(t, dtype=float) / self.t0
        return np.stack([self.c1 * r ** self.mu, self.c2 * r ** (-self.mu)], axis=-1)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        r = t / self.t0
        return np.stack([self.c1 * self.mu * r ** self.mu / t,
                         -self.c2 * self.mu * r ** (-self.mu) / t], axis=-1)

    def residual(self, t):
        """``|B' - M B|`` with the ``lam = 0`` matrix; zero up to rounding."""
        t = np.asarray(t, dtype=float)
        M = system_matrix(self.mu, 0.0, t)
        res = self.derivative(t) - np.einsum("...ij,...j->...i", M, self(t))
        return np.linalg.norm(res, axis=-1)


def exact_lambda0(mu: float, c1: complex, c2: complex, t0: float) -> ExactSolution:
    """Closed-form solution of the ``lam = 0`` system with ``B(t0) = (c1, c2)``."""
    if t0 <= 0:
        raise ValueError("t0 must be positive")
    return ExactSolution(float(mu), complex(c1), complex(c2), float(t0))


@dataclass(frozen=True)
class AlmostSolution:
    """``v(t) = (w1 (t/t0)^mu, w2 (t/t0)^-mu)`` compared against ``lam != 0``.

    ``v`` solves the ``lam = 0`` system, so its defect in the ``tau``
    coordinate is ``|lam| e^tau |v|``.
    """

    w: tuple[complex, complex]
    mu: float
    t0: float

    def __call__(self, t):
        return exact_lambda0(self.mu, self.w[0], self.w[1], self.t0)(t)

    def at_tau(self, tau):
        return self(np.exp(np.asarray(tau, dtype=float)))

    def defect(self, lam: float, t):
        """``|lam| t (|w1|^2 (t/t0)^(2mu) + |w2|^2 (t/t0)^(-2mu))^(1/2)``."""
        t = np.asarray(t, dtype=float)
        r = t / self.t0
        w1, w2 = abs(self.w[0]), abs(self.w[1])
        return abs(lam) * t * np.sqrt(w1 ** 2 * r ** (2 * self.mu) + w2 ** 2 * r ** (-2 * self.mu))

    def defect_numeric(self, lam: float, t, h: float = 1e-5):
        """Defect ``|v_tau - A(tau) v|`` by central differences in ``tau``."""
        tau = np.log(np.asarray(t, dtype=float))
        dv = (self.at_tau(tau + h) - self.at_tau(tau - h)) / (2 * h)
        Av = np.einsum("...ij,...j->...i", log_system_matrix(self.mu, lam, tau), self.at_tau(tau))
        return np.linalg.norm(dv - Av, axis=-1)


def almost_solution(w, mu: float, t0: float) -> AlmostSolution:
    """The comparison function with ``v(t0) = w``."""
    if t0 <= 0:
        raise ValueError("t0 must be positive")
    w = np.asarray(w, dtype=complex).reshape(2)
    return AlmostSolution((complex(w[0]), complex(w[1])), float(mu), float(t0))


def batch_log_masses(profile: WarpProfile, mu: float, lam: float, anchor: float, thetas,
                     intervals, measure: str = "t", rtol: float = DEFAULT_RTOL,
                     atol: float = DEFAULT_ATOL) -> np.ndarray:
    """``log int |B|^2`` over several intervals for a batch of real anchors.

    Solution ``k`` has ``B(anchor) = (cos thetas[k], sin thetas[k])``; all of
    them are propagated in one integrator call per direction.

    Args:
        anchor, intervals: points in the profile coordinate; the intervals
            must avoid poles.
        measure: ``"t"`` or ``"log"`` (``dt / t``), as in :func:`log_l2_norm_sq`.

    Returns:
        Array of shape ``(len(intervals), len(thetas))``.
    """
    if measure not in ("t", "log"):
        raise ValueError("measure must be 't' or 'log'")
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    K = thetas.size
    intervals = [tuple(sorted(map(float, iv))) for iv in intervals]
    tau = profile.coordinate == "tau"
    x_lo = min(iv[0] for iv in intervals)
    x_hi = max(iv[1] for iv in intervals)
    if not x_lo <= anchor <= x_hi:
        raise ValueError("anchor must lie inside the union of the intervals")
    s0 = float(profile.to_s(anchor))
    acc = [[[] for _ in range(K)] for _ in intervals]
    for end in (x_lo, x_hi):
        if end == anchor:
            continue
        route = profile.segments(s0, float(profile.to_s(end)), v_a=anchor if tau else None,
                                 v_b=end if tau else None)
        _, _, segs = propagate(route, mu, np.full(K, float(lam)), thetas, np.zeros(K),
                               rtol, atol, dense=True)
        for seg in segs:
            if tau:
                x0, x1 = seg.v_lo, seg.v_hi
            else:
                x0, x1 = sorted(float(profile.from_s(seg.chart.s(v))) for v in (seg.v0, seg.v1))
            for i, (a, b) in enumerate(intervals):
                xa, xb = max(a, x0), min(b, x1)
                if not xa < xb:
                    continue
                if tau:
                    va, vb = xa, xb
                else:
                    va, vb = (float(seg.chart.v_of(profile.to_s(x))) for x in (xa, xb))
                va, vb = np.clip([va, vb], seg.v_lo, seg.v_hi)
                if va == vb:
                    continue
                v, log_w = gauss_nodes(seg, va, vb)
                if measure == "log":
                    log_w = log_w - np.log(np.abs(seg.chart.s(v)))
                _, el = seg.state(v)
                for k in range(K):
                    acc[i][k].append(2 * el[k] + log_w)
    out = np.full((len(intervals), K), -np.inf)
    for i in range(len(intervals)):
        for k in range(K):
            if acc[i][k]:
                out[i, k] = logsumexp(np.concatenate(acc[i][k]))
    return out
