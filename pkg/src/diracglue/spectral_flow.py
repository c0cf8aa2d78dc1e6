"""Zero crossings of an eigenvalue branch along a one-parameter family.

If an eigenvalue branch of multiplicity ``m`` moves from ``-1`` to ``+1``
as ``T`` runs over ``[a, b]``, and ``m`` exceeds the number of all other
eigenvalues in ``[-1, 1]``, then the sign balance (negatives minus
positives in ``[-1, 1]``) is positive at ``a`` and negative at ``b``, so
``0`` is an eigenvalue for some ``T0`` in between.  :func:`find_crossing`
locates a change point of the sign balance by bisection, with a regula
falsi step on the eigenvalue nearest to zero to speed up the smooth case.
It only needs the balance to differ between the ends; whether the stronger
counting argument applies is reported separately.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .glued_model import (POINT_TOL, Spectrum, _merge, assemble_spectrum, glue,
                          round_cap)

__all__ = ["BranchFamily", "CrossingReport", "NoCrossingError", "count_signed",
           "find_crossing", "linear_family", "cap_scaling_family", "branch_rows"]


class NoCrossingError(ValueError):
    """The sign balance does not change over the family; no crossing is forced."""


def count_signed(spec: Spectrum, interval: tuple[float, float] = (-1.0, 1.0),
                 tol: float = POINT_TOL) -> tuple[int, int, int]:
    """Multiplicity-weighted ``(negatives, positives, zeros)`` in ``interval``.

    Eigenvalues within ``tol`` of zero count as zeros.
    """
    lo, hi = interval
    if spec.window[0] > lo or spec.window[1] < hi:
        raise ValueError("spectrum window must contain the counting interval")
    neg = pos = zero = 0
    for v, m in spec.entries:
        if not lo <= v <= hi:
            continue
        if abs(v) <= tol:
            zero += m
        elif v < 0:
            neg += m
        else:
            pos += m
    return neg, pos, zero


@dataclass
class BranchFamily:
    """Operator family ``T -> D_T`` through its spectra near ``[-1, 1]``.

    Attributes:
        interval: parameter range ``(a, b)``.
        generator: ``T -> Spectrum`` with window containing ``[-1, 1]``.
        multiplicity: expected multiplicity of the moving branch.
        margin: the generator window is ``(-1 - margin, 1 + margin)``.
    """

    interval: tuple[float, float]
    generator: Callable[[float], Spectrum]
    multiplicity: int = 1
    margin: float = 0.25
    name: str = ""
    cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        a, b = self.interval
        if not a < b:
            raise ValueError("need a < b")
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be positive")

    def spectrum(self, T: float) -> Spectrum:
        T = float(T)
        if T not in self.cache:
            spec = self.generator(T)
            if spec.window[0] > -1.0 or spec.window[1] < 1.0:
                raise ValueError("generator window must contain [-1, 1]")
            self.cache[T] = spec
        return self.cache[T]

    def balance(self, T: float) -> int:
        neg, pos, _ = count_signed(self.spectrum(T))
        return neg - pos


@dataclass
class CrossingReport:
    """Located crossing ``T0`` and the counts witnessing it."""

    T0: float
    residual: float
    counts_a: tuple[int, int, int]
    counts_b: tuple[int, int, int]
    bracket: tuple[float, float]
    evaluations: int
    tol: float

    @property
    def balances(self) -> tuple[int, int]:
        return (self.counts_a[0] - self.counts_a[1], self.counts_b[0] - self.counts_b[1])

    @property
    def forced(self) -> bool:
        """Balance positive at ``a`` and negative at ``b`` (the counting argument)."""
        bal_a, bal_b = self.balances
        return bal_a > 0 > bal_b

    @property
    def passed(self) -> bool:
        bal_a, bal_b = self.balances
        return bal_a != bal_b and self.residual <= self.tol


def _nearest_zero(spec: Spectrum) -> float:
    vals = [v for v, _ in spec.entries if -1.0 <= v <= 1.0]
    if not vals:
        return np.nan
    return float(min(vals, key=abs))


def find_crossing(family: BranchFamily, tol: float = 1e-8, grid: int = 2,
                  max_iter: int = 200) -> CrossingReport:
    """Parameter ``T0`` at which ``0`` is an eigenvalue.

    The bracket starts from a ``grid``-point scan of ``[a, b]``: the first
    adjacent pair over which the sign balance changes.  Each step evaluates
    the spectrum at a candidate inside the bracket (Illinois regula falsi on
    the eigenvalue nearest zero, falling back to the midpoint) and keeps the
    half where the balance still changes.
    Iteration stops when the spectrum at the candidate has an eigenvalue
    within ``tol`` of zero, or the bracket is narrower than ``tol``.

    Raises:
        NoCrossingError: equal sign balance at ``a`` and ``b``.
    """
    a, b = family.interval
    Ts = np.linspace(a, b, max(grid, 2))
    bal = [family.balance(T) for T in Ts]
    counts_a = count_signed(family.spectrum(a))
    counts_b = count_signed(family.spectrum(b))
    if bal[0] == bal[-1]:
        raise NoCrossingError(
            f"no sign-balance change: balance {bal[0]} at T={a:g} and T={b:g}")
    j = next(i for i in range(len(Ts) - 1) if bal[i] != bal[i + 1])
    lo, hi = float(Ts[j]), float(Ts[j + 1])
    bal_lo = bal[j]
    f_lo, f_hi = _nearest_zero(family.spectrum(lo)), _nearest_zero(family.spectrum(hi))
    T0, resid = 0.5 * (lo + hi), np.inf
    # a scan point may already sit on the crossing
    for T, f in ((lo, f_lo), (hi, f_hi)):
        if abs(f) <= tol:
            return CrossingReport(T, float(abs(f)), counts_a, counts_b, (lo, hi),
                                  len(family.cache), tol)
    side = 0
    for _ in range(max_iter):
        cand = np.nan
        if f_lo * f_hi < 0:
            cand = lo - f_lo * (hi - lo) / (f_hi - f_lo)
        if not lo < cand < hi:
            cand = 0.5 * (lo + hi)
        T0 = float(cand)
        spec = family.spectrum(T0)
        f0 = _nearest_zero(spec)
        resid = abs(f0) if np.isfinite(f0) else np.inf
        if resid <= tol:
            break
        if family.balance(T0) == bal_lo:
            lo, f_lo = T0, f0
            if side == -1:
                f_hi *= 0.5
            side = -1
        else:
            hi, f_hi = T0, f0
            if side == 1:
                f_lo *= 0.5
            side = 1
        if hi - lo < tol:
            break
    return CrossingReport(T0, float(resid), counts_a, counts_b, (lo, hi),
                          len(family.cache), tol)


def linear_family(m: int = 1, background=(), margin: float = 0.25) -> BranchFamily:
    """Synthetic family ``{2T - 1 (x m)}`` plus a fixed background on ``[0, 1]``.

    ``background`` is a list of ``(value, multiplicity)``.
    """
    bg = [(float(v), int(k)) for v, k in background]
    if any(abs(v) <= POINT_TOL for v, _ in bg):
        raise ValueError("background must not contain 0")
    window = (-1.0 - margin, 1.0 + margin)

    def gen(T: float) -> Spectrum:
        pairs = [(2.0 * T - 1.0, int(m))] + [p for p in bg if window[0] < p[0] < window[1]]
        modes = [(v, k, np.nan) for v, k in sorted(pairs)]
        return Spectrum(window, _merge(pairs), f"linear-m{m}", modes)

    return BranchFamily((0.0, 1.0), gen, int(m), margin, f"linear-m{m}")


def cap_scaling_family(radius0: float = 0.22, radius1: float = 0.29,
                       potential: float = 6.0, t_2: float = 0.05, n: int = 3,
                       margin: float = 0.25) -> BranchFamily:
    """Glued family whose second cap has radius ``radius0 + (radius1 - radius0) T``.

    Cap 1 is the round unit cap (eigenvalues near ``+-3/2``, outside
    ``[-1, 1]``).  Cap 2 carries the constant ``potential``, which shifts its
    spectrum to about ``potential +- (k + 3/2) / R``; as ``R`` grows, the
    branch ``potential - 3 / (2 R)`` (multiplicity 2) moves up through 0.
    """
    cap1 = round_cap(1.0, 2 * t_2)
    Lambda = 1.0 + margin

    def gen(T: float) -> Spectrum:
        R = radius0 + (radius1 - radius0) * T
        model = glue(cap1, round_cap(R, t_2, potential), t_2, n=n, allow_large=True)
        return assemble_spectrum(model, Lambda)

    return BranchFamily((0.0, 1.0), gen, 2, margin, "cap-scaling")


def branch_rows(family: BranchFamily, Ts) -> list[tuple[float, float, int]]:
    """CSV rows ``(T, eigenvalue, multiplicity)`` inside ``[-1, 1]``."""
    rows = []
    for T in Ts:
        for v, m in family.spectrum(float(T)).entries:
            if -1.0 <= v <= 1.0:
                rows.append((float(T), float(v), int(m)))
    return rows
