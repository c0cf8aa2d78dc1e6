"""Pole-regular shooting and eigenvalue location for closed radial problems.

At a pole the warp function behaves like the distance ``d`` to the pole,
and with ``m = |mu|``, ``x = lam d / (2 m + 1)`` the solution regular there
starts as

    B ~ d^m (1, x)  (mu > 0),   B ~ d^m (-x, 1)  (mu < 0)   (left pole),
    B ~ d^m (x, 1)  (mu > 0),   B ~ d^m (1, -x)  (mu < 0)   (right pole).

Shots from both poles meet at a matching point ``m``.  With Pruefer angles
``th_L``, ``th_R`` at ``m`` the two solutions are parallel iff
``dth = th_L - th_R`` is a multiple of pi; ``dth`` is strictly increasing in
``lam``, so the number of eigenvalues in ``(a, b)`` is the number of
multiples of pi between ``dth(a)`` and ``dth(b)``.
"""
from __future__ import annotations

import numpy as np

from .profiles import WarpProfile
from .radial_system import (DEFAULT_ATOL, DEFAULT_RTOL, RadialParams,
                            RadialTrajectory, propagate)

__all__ = ["WindowCollisionError", "default_eta", "match_point", "pole_start",
           "shoot", "angle_mismatch", "matching_determinant",
           "radial_eigenvalues", "regular_solution", "eigenfunction"]


class WindowCollisionError(ValueError):
    """An eigenvalue sits (within tolerance) on a window endpoint."""


def default_eta(profile: WarpProfile) -> float:
    """Starting distance from a pole: ``1e-6`` times a length scale."""
    L = profile.length
    if not np.isfinite(L):
        L = float(profile.meta.get("scale", 1.0))
    return 1e-6 * L


def match_point(profile: WarpProfile) -> float:
    a, b = profile.domain
    return float(profile.meta.get("match", 0.5 * (a + b)))


def pole_start(profile: WarpProfile, mu: float, lams, side: str, eta: float):
    """Initial ``(s0, v0, theta0, ell0, log_tail)`` for a regular shot.

    ``log_tail`` is the log of the L^2 mass between the pole and ``s0``.
    """
    if mu == 0:
        raise ValueError("mode mu must be nonzero")
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    a, b = profile.domain
    pole = a if side == "left" else b
    m = abs(mu)
    lam_eff = lams - float(profile.potential(pole))
    x = lam_eff * eta / (2 * m + 1)
    # leading component d^m, companion term -+ x d^m (sign from the mode and side)
    if side == "left":
        th0 = np.arctan(x) if mu > 0 else np.arctan2(1.0, -x)
        s0 = a + eta
    else:
        th0 = np.arctan2(1.0, x) if mu > 0 else np.arctan(-x)
        s0 = b - eta
    ell0 = m * np.log(eta) + 0.5 * np.log1p(x * x)
    log_tail = 2 * ell0 + np.log(eta / (2 * m + 1))
    return s0, np.log(eta), th0, ell0, log_tail


def shoot(profile: WarpProfile, mu: float, lams, side: str, target: float | None = None,
          eta: float | None = None, rtol: float = DEFAULT_RTOL,
          atol: float = DEFAULT_ATOL, dense: bool = False):
    """Regular solution from the ``side`` pole to ``target`` (default: match point).

    Returns ``(theta, ell)`` at ``target`` for every ``lam`` in ``lams``
    (plus dense segments and the pole-tail log-mass if ``dense``).
    """
    if not profile.poles[0 if side == "left" else 1]:
        raise ValueError(f"profile has no pole on the {side}")
    eta = default_eta(profile) if eta is None else eta
    target = match_point(profile) if target is None else target
    s0, v0, th0, ell0, tail = pole_start(profile, mu, lams, side, eta)
    route = profile.segments(s0, target, v_a=v0)
    res = propagate(route, mu, lams, th0, ell0, rtol, atol, dense=dense)
    if dense:
        return res[0], res[1], res[2], tail
    return res


def angle_mismatch(profile: WarpProfile, mu: float, lams, eta: float | None = None,
                   rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL):
    """``th_L(m) - th_R(m)`` for each ``lam``; eigenvalues where it is ``k pi``."""
    thl, _ = shoot(profile, mu, lams, "left", eta=eta, rtol=rtol, atol=atol)
    thr, _ = shoot(profile, mu, lams, "right", eta=eta, rtol=rtol, atol=atol)
    return thl - thr


def matching_determinant(profile: WarpProfile, mu: float, lams, **kw):
    """Determinant of the two unit-normalised shots at the match point."""
    return np.sin(angle_mismatch(profile, mu, lams, **kw))


def _refine(fn, lo, hi, glo, ghi, tol, max_iter=200):
    """Batched Illinois (modified regula falsi) on brackets ``glo < 0 < ghi``."""
    lo, hi, glo, ghi = (np.array(x, dtype=float) for x in (lo, hi, glo, ghi))
    x = 0.5 * (lo + hi)
    done = np.zeros(lo.size, dtype=bool)
    side = np.zeros(lo.size, dtype=int)
    for _ in range(max_iter):
        act = ~done
        if not act.any():
            break
        xs = (lo * ghi - hi * glo) / (ghi - glo)
        bad = ~((xs > lo) & (xs < hi))
        xs = np.where(bad, 0.5 * (lo + hi), xs)
        g = np.full(lo.size, np.nan)
        g[act] = fn(xs[act], act)
        slope = (ghi - glo) / (hi - lo)
        err = np.abs(g) / slope
        new_done = act & ((err < 0.1 * tol) | (hi - lo < tol) | (g == 0))
        x = np.where(act, xs, x)
        neg = act & (g < 0)
        pos = act & (g > 0)
        # Illinois: halve the stale end value when the same side moves twice
        stale_hi = neg & (side == -1)
        stale_lo = pos & (side == 1)
        lo = np.where(neg, xs, lo)
        glo = np.where(neg, g, glo)
        hi = np.where(pos, xs, hi)
        ghi = np.where(pos, g, ghi)
        ghi = np.where(stale_hi, 0.5 * ghi, ghi)
        glo = np.where(stale_lo, 0.5 * glo, glo)
        side = np.where(neg, -1, np.where(pos, 1, side))
        done |= new_done
    return x


def radial_eigenvalues(profile: WarpProfile, mu: float, lo: float, hi: float,
                       step: float = 0.01, tol: float = 1e-10,
                       eta: float | None = None, rtol: float = DEFAULT_RTOL,
                       atol: float = DEFAULT_ATOL, collision_tol: float = 1e-8,
                       on_edge: str = "raise", return_edges: bool = False):
    """All eigenvalues of the pole-regular radial problem in ``(lo, hi)``.

    A ``lam`` grid of spacing ``step`` is shot in one batch; roots of
    ``dth - k pi`` are bracketed by counting multiples of pi between grid
    points (which also separates near-degenerate roots within one cell) and
    refined by batched Illinois iteration to ``tol``.

    Args:
        on_edge: ``"raise"`` or ``"exclude"`` for eigenvalues within
            ``collision_tol`` of ``lo`` or ``hi``.
        return_edges: also return the list of excluded edge eigenvalues.

    Raises:
        WindowCollisionError: an eigenvalue on a window edge and
            ``on_edge == "raise"``.
    """
    if on_edge not in ("raise", "exclude"):
        raise ValueError("on_edge must be 'raise' or 'exclude'")
    if not lo < hi:
        raise ValueError("need lo < hi")
    n = max(2, int(np.ceil((hi - lo) / step)) + 1)
    grid = np.linspace(lo, hi, n)
    dth = angle_mismatch(profile, mu, grid, eta=eta, rtol=rtol, atol=atol)
    dth = np.maximum.accumulate(dth)
    k_lo = int(np.floor(dth[0] / np.pi)) + 1
    k_hi = int(np.ceil(dth[-1] / np.pi)) - 1
    ks = np.arange(k_lo, k_hi + 1)
    if ks.size == 0:
        roots = np.empty(0)
    else:
        idx = np.searchsorted(dth, ks * np.pi)
        idx = np.clip(idx, 1, n - 1)
        a, b = grid[idx - 1], grid[idx]
        ga, gb = dth[idx - 1] - ks * np.pi, dth[idx] - ks * np.pi
        exact_a = ga == 0
        exact_b = gb == 0

        def fn(x, act):
            return angle_mismatch(profile, mu, x, eta=eta, rtol=rtol, atol=atol) - ks[act] * np.pi

        ga = np.where(exact_a, -1e-300, ga)
        gb = np.where(exact_b, 1e-300, gb)
        roots = np.sort(_refine(fn, a, b, ga, gb, tol))
    edges = []
    keep = np.ones(roots.size, dtype=bool)
    for i, r in enumerate(roots):
        if min(r - lo, hi - r) < collision_tol:
            edges.append(float(r))
            keep[i] = False
    # an eigenvalue exactly on the edge shows up as dth(edge) = k pi
    for g, e in ((dth[0], lo), (dth[-1], hi)):
        k = np.round(g / np.pi)
        if abs(g - k * np.pi) < 4 * collision_tol and not any(abs(x - e) < collision_tol for x in edges):
            edges.append(float(e))
    if edges and on_edge == "raise":
        raise WindowCollisionError(f"eigenvalue(s) {edges} on window edge ({lo}, {hi})")
    roots = roots[keep]
    if return_edges:
        return roots, sorted(edges)
    return roots


def regular_solution(profile: WarpProfile, mu: float, lam: float, end: float,
                     eta: float | None = None, rtol: float = DEFAULT_RTOL,
                     atol: float = DEFAULT_ATOL) -> RadialTrajectory:
    """Solution regular at the left pole, integrated out to ``end``.

    ``end`` is in the profile coordinate; the trajectory reaches back to
    the pole through its L^2 tail.
    """
    eta = default_eta(profile) if eta is None else eta
    s_end = float(profile.to_s(end))
    _, _, segs, tail = shoot(profile, mu, [lam], "left", target=s_end, eta=eta,
                             rtol=rtol, atol=atol, dense=True)
    a = profile.domain[0]
    x_pole = float(profile.from_s(a)) if profile.coordinate == "t" else -np.inf
    x0 = float(profile.from_s(a + eta)) if profile.coordinate == "t" else float(np.log(eta))
    return RadialTrajectory(params=RadialParams(mu, lam, profile),
                            coordinate=profile.coordinate, segments=segs,
                            coverage=(x0, end), parts=1,
                            pole_tails={"lo": (x_pole, float(tail[0]))})


def eigenfunction(profile: WarpProfile, mu: float, lam: float,
                  eta: float | None = None, rtol: float = DEFAULT_RTOL,
                  atol: float = DEFAULT_ATOL) -> RadialTrajectory:
    """Glue the two pole shots at the match point into one trajectory.

    At an eigenvalue the shots are parallel at the match point; the right
    shot is rescaled (and its angle shifted) to continue the left one.
    Away from an eigenvalue the result has a kink at the match point.
    """
    eta = default_eta(profile) if eta is None else eta
    m = match_point(profile)
    thl, ell, segl, tl = shoot(profile, mu, [lam], "left", target=m, eta=eta,
                               rtol=rtol, atol=atol, dense=True)
    thr, elr, segr, tr = shoot(profile, mu, [lam], "right", target=m, eta=eta,
                               rtol=rtol, atol=atol, dense=True)
    dl = ell - elr
    dt = thl - thr
    for seg in segr:
        seg.ell_shift = seg.ell_shift + dl
        seg.theta_shift = seg.theta_shift + dt
    # normalise to unit total mass in log space
    a, b = profile.domain
    traj = RadialTrajectory(params=RadialParams(mu, lam, profile), coordinate="t",
                            segments=segl + segr, coverage=(a + eta, b - eta), parts=1,
                            pole_tails={"lo": (a, float(tl[0])),
                                        "hi": (b, float(tr[0] + 2 * dl[0]))})
    return traj
