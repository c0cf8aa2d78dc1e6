"""Warp profiles ``rho`` and the coordinate charts used to integrate over them.

A profile describes the metric ``dt^2 + rho(t)^2 dsigma^2``.  Near points
where ``rho`` vanishes or becomes tiny (poles, gluing necks) the radial
system has coefficients of size ``mu / rho`` which cannot be integrated
in the ``t`` coordinate.  Each profile is therefore split into *pieces*,
each carrying a :class:`Chart`:

* :class:`LogChart` -- ``s = c + sign * exp(v)`` for a region where
  ``rho`` is comparable to the distance ``exp(v)`` from an anchor ``c``;
* :class:`LinearChart` -- ``s = c + scale * v`` elsewhere.

Everything the integrator needs is expressed through the chart as
``ds/dv`` and ``(ds/dv) / rho``, both of which stay of order one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "Chart", "LogChart", "LinearChart", "Piece", "WarpProfile",
    "EuclideanProfile", "ConstantProfile", "NeckProfile", "CapProfile",
    "GluedProfile", "smoothstep", "smoothstep_derivative", "neck_shape",
    "neck_shape_derivative",
]

ArrayFn = Callable[[np.ndarray], np.ndarray]


def _zero(x):
    if isinstance(x, float):
        return 0.0
    return np.zeros_like(np.asarray(x, dtype=float))


def smoothstep(x):
    """Quintic smoothstep: 0 for x <= 0, 1 for x >= 1, C^2 in between."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    return x * x * x * (10.0 + x * (-15.0 + 6.0 * x))


def smoothstep_derivative(x):
    x = np.asarray(x, dtype=float)
    inside = (x > 0) & (x < 1)
    xc = np.clip(x, 0.0, 1.0)
    return np.where(inside, 30.0 * xc * xc * (1.0 - xc) ** 2, 0.0)


# Even polynomial s(x) = 1/2 + a x^2 + b x^4 + c x^6 + d x^8 with
# s(1) = 1, s'(1) = 1, s''(1) = s'''(1) = 0, so that s(x) = |x| joins C^3.
_NECK_COEFFS = (0.5, 3.0 / 16.0, 13.0 / 16.0, -11.0 / 16.0, 3.0 / 16.0)


def neck_shape(x):
    """Normalised neck function: even, ``|x|`` for ``|x| >= 1``, 1/2 at 0."""
    if isinstance(x, float):
        ax = abs(x)
        if ax >= 1.0:
            return ax
        x2 = ax * ax
        c0, c1, c2, c3, c4 = _NECK_COEFFS
        return c0 + x2 * (c1 + x2 * (c2 + x2 * (c3 + x2 * c4)))
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    x2 = np.minimum(ax, 1.0) ** 2
    c0, c1, c2, c3, c4 = _NECK_COEFFS
    inner = c0 + x2 * (c1 + x2 * (c2 + x2 * (c3 + x2 * c4)))
    return np.where(ax >= 1.0, ax, inner)


def neck_shape_derivative(x):
    x = np.asarray(x, dtype=float)
    ax = np.minimum(np.abs(x), 1.0)
    _, c1, c2, c3, c4 = _NECK_COEFFS
    x2 = ax * ax
    inner = ax * (2 * c1 + x2 * (4 * c2 + x2 * (6 * c3 + x2 * 8 * c4)))
    return np.where(np.abs(x) >= 1.0, np.sign(x), np.sign(x) * inner)


class Chart:
    """Coordinate patch ``s = s(v)``; subclasses supply the maps."""

    def s(self, v):
        raise NotImplementedError

    def v_of(self, s):
        raise NotImplementedError

    def jac(self, v):
        """``ds/dv`` (signed)."""
        raise NotImplementedError

    def q(self, v):
        """``(ds/dv) / rho(s(v))``."""
        raise NotImplementedError

    def pot(self, v):
        """Zeroth-order potential at ``s(v)``."""
        raise NotImplementedError

    def rho(self, v):
        return self.jac(v) / self.q(v)

    def terms(self, v):
        """``(jac, q, pot)`` at a scalar ``v``; used in the integrator's RHS."""
        return self.jac(v), self.q(v), self.pot(v)


@dataclass(frozen=True)
class LogChart(Chart):
    """``s = anchor + sign * d`` with ``d = exp(v)``; ``rho`` given in ``d``."""

    anchor: float
    sign: float
    rho_of_d: ArrayFn
    pot_of_d: ArrayFn = _zero

    def s(self, v):
        return self.anchor + self.sign * np.exp(v)

    def v_of(self, s):
        d = self.sign * (np.asarray(s, dtype=float) - self.anchor)
        return np.log(d)

    def jac(self, v):
        return self.sign * np.exp(v)

    def q(self, v):
        d = np.exp(v)
        return self.sign * d / self.rho_of_d(d)

    def pot(self, v):
        return self.pot_of_d(np.exp(v))

    def terms(self, v):
        d = math.exp(v)
        return self.sign * d, self.sign * d / self.rho_of_d(d), self.pot_of_d(d)


@dataclass(frozen=True)
class LinearChart(Chart):
    """``s = origin + scale * v``; ``rho`` and potential given in ``v``."""

    origin: float
    scale: float
    rho_of_v: ArrayFn
    pot_of_v: ArrayFn = _zero

    def s(self, v):
        return self.origin + self.scale * np.asarray(v, dtype=float)

    def v_of(self, s):
        return (np.asarray(s, dtype=float) - self.origin) / self.scale

    def jac(self, v):
        return self.scale + 0.0 * np.asarray(v, dtype=float)

    def q(self, v):
        return self.scale / self.rho_of_v(v)

    def pot(self, v):
        return self.pot_of_v(v)

    def terms(self, v):
        return self.scale, self.scale / self.rho_of_v(v), self.pot_of_v(v)


@dataclass(frozen=True)
class Piece:
    """A chart restricted to ``[s_lo, s_hi]``; ``v_lo``/``v_hi`` are the
    chart coordinates of the two ends (stored to avoid cancellation)."""

    s_lo: float
    s_hi: float
    chart: Chart
    v_lo: float
    v_hi: float

    def contains(self, s) -> bool:
        return self.s_lo <= s <= self.s_hi


def _log_piece(anchor, sign, d_a, d_b, rho_of_d, pot_of_d=_zero) -> Piece:
    """Piece of a log chart covering distances ``d_a..d_b`` from ``anchor``."""
    chart = LogChart(anchor, sign, rho_of_d, pot_of_d)
    sa, sb = anchor + sign * d_a, anchor + sign * d_b
    va, vb = np.log(d_a), np.log(d_b)
    if sa <= sb:
        return Piece(sa, sb, chart, va, vb)
    return Piece(sb, sa, chart, vb, va)


@dataclass(frozen=True)
class WarpProfile:
    """Warp function ``rho`` on ``domain`` with chart decomposition.

    Attributes:
        domain: closed interval ``(A, B)`` in the profile coordinate ``t``.
        kind: ``euclidean``, ``constant``, ``neck``, ``cap`` or ``composite``.
        pieces: ordered, contiguous chart pieces covering ``domain``.
        coordinate: ``"tau"`` if trajectories are reported in ``log t``,
            ``"t"`` otherwise.
        poles: which ends of the domain are poles (``rho -> 0``).
    """

    domain: tuple[float, float]
    kind: str
    pieces: tuple[Piece, ...]
    rho_fn: ArrayFn
    drho_fn: ArrayFn
    potential_fn: ArrayFn = _zero
    coordinate: str = "t"
    poles: tuple[bool, bool] = (False, False)
    meta: dict = field(default_factory=dict)

    def rho(self, t):
        return self.rho_fn(np.asarray(t, dtype=float))

    def drho(self, t):
        return self.drho_fn(np.asarray(t, dtype=float))

    def potential(self, t):
        return self.potential_fn(np.asarray(t, dtype=float))

    @property
    def length(self) -> float:
        return self.domain[1] - self.domain[0]

    # coordinate conversions between the reported coordinate and s = t
    def to_s(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(x) if self.coordinate == "tau" else x

    def from_s(self, s):
        s = np.asarray(s, dtype=float)
        return np.log(s) if self.coordinate == "tau" else s

    def piece_index(self, s: float) -> int:
        for i, p in enumerate(self.pieces):
            if p.s_lo <= s <= p.s_hi:
                return i
        raise ValueError(f"point {s!r} outside profile domain {self.domain}")

    def segments(self, s_a: float, s_b: float, v_a: float | None = None,
                 v_b: float | None = None) -> list[tuple[Chart, float, float]]:
        """Ordered ``(chart, v_start, v_end)`` list integrating ``s_a -> s_b``.

        ``v_a``/``v_b`` override the chart coordinate of the end points when
        the caller knows them more accurately than ``chart.v_of`` would.
        """
        if s_a == s_b:
            return []
        ia, ib = self.piece_index(s_a), self.piece_index(s_b)
        forward = s_b > s_a
        # a point on a shared boundary belongs to the piece in the travel direction
        if forward and ia + 1 < len(self.pieces) and s_a == self.pieces[ia].s_hi:
            ia += 1
        if not forward and ia > 0 and s_a == self.pieces[ia].s_lo:
            ia -= 1
        if forward and ib > 0 and s_b == self.pieces[ib].s_lo:
            ib -= 1
        if not forward and ib + 1 < len(self.pieces) and s_b == self.pieces[ib].s_hi:
            ib += 1
        order = range(ia, ib + 1) if forward else range(ia, ib - 1, -1)
        out = []
        for k, i in enumerate(order):
            p = self.pieces[i]
            if k == 0:
                va = v_a if v_a is not None else float(p.chart.v_of(s_a))
            else:
                va = p.v_lo if forward else p.v_hi
            if i == ib:
                vb = v_b if v_b is not None else float(p.chart.v_of(s_b))
            else:
                vb = p.v_hi if forward else p.v_lo
            if va != vb:
                out.append((p.chart, va, vb))
        return out


def EuclideanProfile(a: float = 0.0, b: float = np.inf) -> WarpProfile:
    """``rho(t) = t`` on ``[a, b]`` (a Euclidean annulus); integrated in log t."""
    lo = a if a > 0 else np.nextafter(0.0, 1.0)
    piece = _log_piece(0.0, 1.0, lo, b, lambda d: d)
    return WarpProfile(
        domain=(a, b), kind="euclidean", pieces=(piece,),
        rho_fn=lambda t: t, drho_fn=lambda t: np.ones_like(t),
        coordinate="tau", poles=(a == 0.0, False))


def ConstantProfile(rho0: float, a: float = 0.0, b: float = 1.0) -> WarpProfile:
    """Flat cylinder ``rho = rho0`` on ``[a, b]``."""
    if rho0 <= 0:
        raise ValueError("rho0 must be positive")
    chart = LinearChart(0.0, 1.0, lambda v: rho0 + 0.0 * np.asarray(v))
    piece = Piece(a, b, chart, a, b)
    return WarpProfile(
        domain=(a, b), kind="constant", pieces=(piece,),
        rho_fn=lambda t: rho0 + 0.0 * t, drho_fn=lambda t: 0.0 * t,
        meta={"rho0": rho0})


def NeckProfile(t_2: float, t_m2: float, extent: float | None = None) -> WarpProfile:
    """``rho(t) = t_m2 * neck_shape(t / t_m2)`` on ``[-extent, extent]``."""
    extent = t_2 if extent is None else extent
    if not 0 < t_m2 < extent:
        raise ValueError("need 0 < t_m2 < extent")
    left = _log_piece(0.0, -1.0, extent, t_m2, lambda d: d)
    mid = Piece(-t_m2, t_m2,
                LinearChart(0.0, t_m2, lambda y: t_m2 * neck_shape(y)), -1.0, 1.0)
    right = _log_piece(0.0, 1.0, t_m2, extent, lambda d: d)

    def rho(t):
        return t_m2 * neck_shape(t / t_m2)

    def drho(t):
        return neck_shape_derivative(t / t_m2)

    return WarpProfile(
        domain=(-extent, extent), kind="neck", pieces=(left, mid, right),
        rho_fn=rho, drho_fn=drho, meta={"t_2": t_2, "t_m2": t_m2})


@dataclass(frozen=True)
class _CapShape:
    radius: float
    opening: float
    potential: float = 0.0

    @property
    def length(self) -> float:
        return np.pi * self.radius

    def blend(self, r):
        if self.opening == 0:
            return np.ones_like(np.asarray(r, dtype=float))
        # a tiny opening overflows to +-inf, which the smoothstep clamps
        with np.errstate(over="ignore"):
            return smoothstep((np.asarray(r, dtype=float) - self.opening) / self.opening)

    def dblend(self, r):
        if self.opening == 0:
            return np.zeros_like(np.asarray(r, dtype=float))
        with np.errstate(over="ignore"):
            return smoothstep_derivative(
                (np.asarray(r, dtype=float) - self.opening) / self.opening) / self.opening

    def rho(self, r):
        if isinstance(r, float):
            return self._rho_scalar(r)
        r = np.asarray(r, dtype=float)
        R = self.radius
        h = self.blend(r)
        return (1.0 - h) * r + h * R * np.sin(r / R)

    def _blend_scalar(self, r: float) -> float:
        op = self.opening
        if op == 0 or r >= 2 * op:
            return 1.0
        if r <= op:
            return 0.0
        x = (r - op) / op
        return x * x * x * (10.0 + x * (-15.0 + 6.0 * x))

    def _rho_scalar(self, r: float) -> float:
        h = self._blend_scalar(r)
        if h == 0.0:
            return r
        R = self.radius
        return (1.0 - h) * r + h * R * math.sin(r / R)

    def drho(self, r):
        r = np.asarray(r, dtype=float)
        R = self.radius
        h, dh = self.blend(r), self.dblend(r)
        return (1.0 - h) + h * np.cos(r / R) + dh * (R * np.sin(r / R) - r)

    def rho_far(self, x):
        """``rho`` as a function of the distance ``x`` from the far pole."""
        if isinstance(x, float):
            if self.length - x >= 2 * self.opening:
                return self.radius * math.sin(x / self.radius)
            return self._rho_scalar(self.length - x)
        x = np.asarray(x, dtype=float)
        R = self.radius
        pure = R * np.sin(x / R)
        if self.opening == 0:
            return pure
        near = self.rho(self.length - x)
        return np.where(self.length - x >= 2 * self.opening, pure, near)

    def pot(self, r):
        if isinstance(r, float):
            return self.potential * self._blend_scalar(r)
        return self.potential * self.blend(r)

    def pot_far(self, x):
        if isinstance(x, float):
            if self.opening == 0 or self.length - x >= 2 * self.opening:
                return self.potential
            return self.pot(self.length - x)
        x = np.asarray(x, dtype=float)
        if self.opening == 0:
            return self.potential + 0.0 * x
        return np.where(self.length - x >= 2 * self.opening,
                        self.potential, self.pot(self.length - x))


def CapProfile(radius: float, opening: float, potential: float = 0.0) -> WarpProfile:
    """Round sphere of radius ``radius`` flattened to ``rho(r) = r`` for
    ``r <= opening`` around the gluing site ``r = 0``.

    ``r`` is the distance from the gluing site, ``r in [0, pi * radius]``.
    The flat collar blends into ``radius * sin(r / radius)`` over
    ``[opening, 2 * opening]``.  ``potential`` adds a constant zeroth-order
    term, switched on by the same blend so the operator stays of Dirac type
    on the collar.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    if opening < 0 or 4 * opening > np.pi * radius:
        raise ValueError("opening must lie in [0, pi * radius / 4]")
    shape = _CapShape(float(radius), float(opening), float(potential))
    L = shape.length
    near = _log_piece(0.0, 1.0, np.nextafter(0.0, 1.0), L / 2, shape.rho, shape.pot)
    far = _log_piece(L, -1.0, L / 2, np.nextafter(0.0, 1.0), shape.rho_far, shape.pot_far)
    near = Piece(0.0, L / 2, near.chart, -np.inf, near.v_hi)
    far = Piece(L / 2, L, far.chart, far.v_lo, -np.inf)
    return WarpProfile(
        domain=(0.0, L), kind="cap", pieces=(near, far),
        rho_fn=shape.rho, drho_fn=shape.drho, potential_fn=shape.pot,
        poles=(True, True),
        meta={"radius": radius, "opening": opening, "potential": potential,
              "shape": shape})


def GluedProfile(cap1: WarpProfile, cap2: WarpProfile, t_m2: float) -> WarpProfile:
    """Connected sum of two caps through a neck of half-length ``t_m2``.

    Coordinate ``s`` is centred on the neck: ``s in [-L1, L2]``; the cap-1
    region ``s <= -t_m2`` is ``cap1`` at ``r = -s``, the cap-2 region
    ``s >= t_m2`` is ``cap2`` at ``r = s``.
    """
    sh1, sh2 = cap1.meta["shape"], cap2.meta["shape"]
    L1, L2 = sh1.length, sh2.length
    if not 0 < t_m2 <= min(sh1.opening, sh2.opening):
        raise ValueError("the neck must fit inside both flat collars: need 0 < t_m2 <= opening")
    p1 = Piece(-L1, -L1 / 2, LogChart(-L1, 1.0, sh1.rho_far, sh1.pot_far),
               -np.inf, np.log(L1 / 2))
    p2 = _log_piece(0.0, -1.0, L1 / 2, t_m2, sh1.rho, sh1.pot)
    p3 = Piece(-t_m2, t_m2,
               LinearChart(0.0, t_m2, lambda y: t_m2 * neck_shape(y)), -1.0, 1.0)
    p4 = _log_piece(0.0, 1.0, t_m2, L2 / 2, sh2.rho, sh2.pot)
    p5 = Piece(L2 / 2, L2, LogChart(L2, -1.0, sh2.rho_far, sh2.pot_far),
               np.log(L2 / 2), -np.inf)

    def rho(s):
        s = np.asarray(s, dtype=float)
        out = np.where(s < 0, sh1.rho(np.abs(s)), sh2.rho(np.abs(s)))
        inner = np.abs(s) < t_m2
        return np.where(inner, t_m2 * neck_shape(s / t_m2), out)

    def drho(s):
        s = np.asarray(s, dtype=float)
        out = np.where(s < 0, -sh1.drho(np.abs(s)), sh2.drho(np.abs(s)))
        inner = np.abs(s) < t_m2
        return np.where(inner, neck_shape_derivative(s / t_m2), out)

    def pot(s):
        s = np.asarray(s, dtype=float)
        return np.where(s < 0, sh1.pot(np.abs(s)), sh2.pot(np.abs(s)))

    return WarpProfile(
        domain=(-L1, L2), kind="composite", pieces=(p1, p2, p3, p4, p5),
        rho_fn=rho, drho_fn=drho, potential_fn=pot, poles=(True, True),
        meta={"t_m2": t_m2, "cap1": cap1, "cap2": cap2, "match": 0.0})


def sample(profile: WarpProfile, points: int = 10_000,
           breakpoints: Sequence[float] = ()) -> np.ndarray:
    """Sample ``(t, rho, drho)`` on a uniform grid plus ``breakpoints``."""
    a, b = profile.domain
    t = np.union1d(np.linspace(a, b, points), np.asarray(breakpoints, dtype=float))
    return np.column_stack([t, profile.rho(t), profile.drho(t)])
