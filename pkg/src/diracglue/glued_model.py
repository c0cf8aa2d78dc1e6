"""Closed rotationally symmetric models: caps, gluing, spectra and closeness.

A model is a warped product ``dt^2 + rho(t)^2 dsigma^2`` over an interval
whose ends are smooth poles.  Each positive sphere mode ``mu`` gives one
2x2 radial system, coupling the coefficients of the ``-mu`` and ``+mu``
eigenspinors; the Dirac spectrum is the union of the radial eigenvalues,
each counted with the multiplicity of ``mu``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import HypothesisViolation
from .neck import GlueSchedule, build_cutoff, glue_schedule
from .profiles import CapProfile, GluedProfile, WarpProfile
from .radial_system import DEFAULT_RTOL, log_l2_norm_sq
from .shooting import (WindowCollisionError, eigenfunction, radial_eigenvalues)
from .sphere_modes import mode_multiplicity

__all__ = [
    "ClosedModel", "Spectrum", "EigCount", "CloseReport", "ClaimReport",
    "RayleighRow", "RayleighReport", "PolicyError", "round_cap", "round_model",
    "glue", "mode_eigenvalues", "assemble_spectrum", "disjoint_union",
    "spectral_close", "eig_count", "claim_counts", "rayleigh_row",
    "rayleigh_check", "POINT_TOL", "MU_HARD_CAP",
]

POINT_TOL = 1e-8
MU_HARD_CAP = 50.0


class PolicyError(RuntimeError):
    """The mode cutoff policy did not terminate below the hard cap."""


@dataclass(frozen=True)
class ClosedModel:
    """Closed warped product: ``profile`` with poles at both ends, dimension ``n``."""

    profile: WarpProfile
    n: int
    tag: str = ""

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise ValueError("n must be an integer >= 3")
        if not all(self.profile.poles):
            raise ValueError("a closed model needs poles at both ends")

    @property
    def length(self) -> float:
        return self.profile.length


@dataclass
class Spectrum:
    """Eigenvalues in ``window`` with multiplicities.

    ``modes`` keeps ``(eigenvalue, multiplicity, mu)`` per mode contribution;
    ``edge_hits`` lists eigenvalues found within tolerance of a window edge.
    """

    window: tuple[float, float]
    entries: list
    provenance: str = ""
    modes: list = field(default_factory=list)
    edge_hits: list = field(default_factory=list)

    def values(self) -> np.ndarray:
        """Eigenvalues repeated according to multiplicity."""
        return np.array([v for v, m in self.entries for _ in range(m)], dtype=float)

    def count(self, a: float, b: float, tol: float = 0.0) -> int:
        return int(sum(m for v, m in self.entries if a - tol <= v <= b + tol))

    def to_rows(self) -> list[tuple[float, int, float, str]]:
        """CSV rows ``(eigenvalue, multiplicity, mode_mu, model_tag)``."""
        return [(float(v), int(m), float(mu), self.provenance) for v, m, mu in self.modes]


@dataclass(frozen=True)
class EigCount:
    interval: tuple[float, float]
    count: int


def _merge(pairs, tol: float = POINT_TOL) -> list[tuple[float, int]]:
    """Sorted ``(value, multiplicity)`` with values within ``tol`` merged."""
    out: list[list] = []
    for v, m in sorted(pairs):
        if out and v - out[-1][0] <= tol:
            w = out[-1][1]
            out[-1][0] = (out[-1][0] * w + v * m) / (w + m)
            out[-1][1] = w + m
        else:
            out.append([float(v), int(m)])
    return [(v, m) for v, m in out]


# ---------------------------------------------------------------------------
# models

def round_cap(radius: float, opening: float, potential: float = 0.0) -> WarpProfile:
    """Round sphere of radius ``radius`` with a flat collar ``rho = r`` on ``r <= opening``.

    ``opening = 0`` gives the exact round sphere ``rho = R sin(r / R)``.
    ``potential`` adds a constant zeroth-order term away from the collar.
    """
    return CapProfile(radius, opening, potential)


def round_model(n: int, radius: float = 1.0) -> ClosedModel:
    """Round ``S^n`` of radius ``radius``: ``rho = R sin(t / R)`` on ``[0, pi R]``."""
    return ClosedModel(CapProfile(radius, 0.0), n, f"round-S{n}-R{radius:g}")


def glue(cap1: WarpProfile, cap2: WarpProfile, t_2: float, n: int = 3,
         allow_large: bool = False) -> ClosedModel:
    """Connected sum of two caps through the neck of size ``t_2``.

    The balls of radius ``t_-2 = 2^-9 t_2^16`` around the gluing sites are
    replaced by the cylinder ``[-t_-2, t_-2]``, so the total length is
    ``L1 + L2``.

    Raises:
        ValueError: a collar is narrower than ``t_2`` or ``t_2 >= radius``.
        HypothesisViolation: ``t_2 >= 2^-4`` without ``allow_large``.
    """
    sched = glue_schedule(t_2, allow_large=allow_large)
    for cap in (cap1, cap2):
        if cap.kind != "cap":
            raise ValueError("glue expects cap profiles")
        if cap.meta["opening"] < t_2:
            raise ValueError(f"collar too small: opening {cap.meta['opening']} < t_2 = {t_2}")
        if not t_2 < cap.meta["radius"]:
            raise ValueError("need t_2 < cap radius")
    prof = GluedProfile(cap1, cap2, sched.t_m2)
    prof.meta["t_2"] = float(t_2)
    return ClosedModel(prof, n, f"glued-t2={t_2:g}")


# ---------------------------------------------------------------------------
# spectra

def mode_eigenvalues(model: ClosedModel | WarpProfile, mu: float, window: tuple[float, float],
                     step: float = 0.01, tol: float = 1e-10, on_edge: str = "raise",
                     return_edges: bool = False, rtol: float = DEFAULT_RTOL):
    """Radial eigenvalues of mode ``mu`` inside the open ``window``.

    Raises:
        WindowCollisionError: an eigenvalue on a window endpoint (unless
            ``on_edge="exclude"``).
    """
    prof = model.profile if isinstance(model, ClosedModel) else model
    lo, hi = window
    return radial_eigenvalues(prof, abs(mu), lo, hi, step=step, tol=tol, rtol=rtol,
                              on_edge=on_edge, return_edges=return_edges)


def assemble_spectrum(model: ClosedModel, Lambda: float, step: float = 0.01,
                      tol: float = 1e-10, mu_cap: float = MU_HARD_CAP,
                      collision_tol: float = POINT_TOL, rtol: float = DEFAULT_RTOL) -> Spectrum:
    """Dirac spectrum of ``model`` in ``(-Lambda, Lambda)``.

    Modes are processed in increasing ``|mu|``; the policy stops at the first
    ``|mu|`` with no radial eigenvalue in ``(-Lambda - 1, Lambda + 1)``.  The
    smallest radial ``|eigenvalue|`` is recorded per mode and must not
    decrease along the processed modes.

    Raises:
        PolicyError: no stop below ``mu_cap`` or non-monotone growth.
    """
    if Lambda <= 0:
        raise ValueError("Lambda must be positive")
    n = model.n
    pad = (-Lambda - 1.0, Lambda + 1.0)
    first = (n - 1) / 2.0
    pairs, modes, edges, lowest = [], [], [], []
    mu = first
    while True:
        if mu > mu_cap:
            raise PolicyError(f"mode cutoff did not terminate below mu = {mu_cap}")
        mult = mode_multiplicity(n, int(round(mu - first)))
        vals = mode_eigenvalues(model, mu, pad, step=step, tol=tol, on_edge="exclude", rtol=rtol)
        if vals.size == 0:
            break
        lowest.append(float(np.min(np.abs(vals))))
        if len(lowest) > 1 and lowest[-1] < lowest[-2] - 1e-9:
            raise PolicyError(f"lowest radial |eigenvalue| decreased at mu = {mu}")
        for v in vals:
            if abs(abs(v) - Lambda) < collision_tol:
                edges.append(float(v))
            elif -Lambda < v < Lambda:
                pairs.append((float(v), mult))
                modes.append((float(v), mult, mu))
        mu += 1.0
    modes.sort(key=lambda r: (r[0], r[2]))
    return Spectrum((-Lambda, Lambda), _merge(pairs), model.tag, modes, edges)


def disjoint_union(*spectra: Spectrum) -> Spectrum:
    """Spectrum of a disjoint union: entries merged, multiplicities added."""
    lo = max(s.window[0] for s in spectra)
    hi = min(s.window[1] for s in spectra)
    pairs = [(v, m) for s in spectra for v, m in s.entries if lo < v < hi]
    modes = [r for s in spectra for r in s.modes if lo < r[0] < hi]
    return Spectrum((lo, hi), _merge(pairs), "+".join(s.provenance for s in spectra),
                    sorted(modes), [e for s in spectra for e in s.edge_hits])


@dataclass
class CloseReport:
    """Outcome of the spectral closeness test.

    ``status`` is ``"close"``, ``"not-close"`` or ``"indeterminate"`` (an
    eigenvalue on ``+-Lambda``); ``close`` is ``None`` when indeterminate.
    """

    close: bool | None
    status: str
    count1: int
    count2: int
    pairing: list
    max_gap: float
    reason: str = ""


def spectral_close(s1: Spectrum, s2: Spectrum, Lambda: float, epsilon: float,
                   tol: float = POINT_TOL) -> CloseReport:
    """``(Lambda, epsilon)``-spectral closeness of two spectra.

    Conditions: neither spectrum has ``+-Lambda``; the counts in
    ``(-Lambda, Lambda)`` agree; sorted eigenvalues pair with gaps ``< epsilon``.
    """
    for s in (s1, s2):
        if s.window[0] > -Lambda or s.window[1] < Lambda:
            raise ValueError("spectrum window must contain (-Lambda, Lambda)")
    hits = [e for s in (s1, s2) for e in s.edge_hits if abs(abs(e) - Lambda) < tol]
    hits += [v for s in (s1, s2) for v, _ in s.entries if abs(abs(v) - Lambda) < tol]
    a = np.sort(np.array([v for v in s1.values() if -Lambda < v < Lambda]))
    b = np.sort(np.array([v for v in s2.values() if -Lambda < v < Lambda]))
    if hits:
        return CloseReport(None, "indeterminate", a.size, b.size, [], float("nan"),
                           f"eigenvalue(s) on +-Lambda: {sorted(hits)}")
    if a.size != b.size:
        return CloseReport(False, "not-close", a.size, b.size, [], float("inf"),
                           "eigenvalue counts differ")
    gaps = np.abs(a - b)
    max_gap = float(gaps.max()) if gaps.size else 0.0
    ok = bool(np.all(gaps < epsilon))
    return CloseReport(ok, "close" if ok else "not-close", a.size, b.size,
                       [(float(x), float(y)) for x, y in zip(a, b)], max_gap,
                       "" if ok else "gap >= epsilon")


def eig_count(spec: Spectrum, a: float, b: float, tol: float = POINT_TOL) -> EigCount:
    """``dim E_[a,b]``; a point interval ``a == b`` clusters within ``tol``."""
    return EigCount((float(a), float(b)), spec.count(a, b, tol))


@dataclass
class ClaimReport:
    lam: float
    epsilon: float
    point: EigCount
    middle: EigCount
    outer: EigCount

    @property
    def passed(self) -> bool:
        return self.point.count <= self.middle.count <= self.outer.count


def claim_counts(spec_glued: Spectrum, spec1: Spectrum, spec2: Spectrum, lam: float,
                 epsilon: float, tol: float = POINT_TOL) -> ClaimReport:
    """Sandwich ``E_{lam}(D1) + E_{lam}(D2) <= E_[lam-eps, lam+eps](D) <=
    E_[lam-2eps, lam+2eps](D1) + E_[lam-2eps, lam+2eps](D2)``.

    Raises:
        ValueError: ``lam`` outside ``(-Lambda + 2 eps, Lambda - 2 eps)``.
    """
    Lambda = min(-spec_glued.window[0], spec_glued.window[1],
                 -spec1.window[0], spec1.window[1], -spec2.window[0], spec2.window[1])
    if not -Lambda + 2 * epsilon < lam < Lambda - 2 * epsilon:
        raise ValueError("need lam in (-Lambda + 2 eps, Lambda - 2 eps)")
    p = eig_count(spec1, lam, lam, tol).count + eig_count(spec2, lam, lam, tol).count
    m = spec_glued.count(lam - epsilon, lam + epsilon)
    o = spec1.count(lam - 2 * epsilon, lam + 2 * epsilon) + \
        spec2.count(lam - 2 * epsilon, lam + 2 * epsilon)
    return ClaimReport(float(lam), float(epsilon), EigCount((lam, lam), p),
                       EigCount((lam - epsilon, lam + epsilon), m),
                       EigCount((lam - 2 * epsilon, lam + 2 * epsilon), o))


# ---------------------------------------------------------------------------
# Rayleigh quotient of cut-off eigen-solutions

@dataclass
class RayleighRow:
    """One cap eigen-solution ``sigma`` and its cut-off ``chi sigma``.

    Ratios are relative to ``||sigma||^2``; ``quotient`` is
    ``||chi' sigma||^2 / ||chi sigma||^2``.
    """

    mu: float
    lam: float
    t_2: float
    kept: float
    gradient: float
    quotient: float

    @property
    def ok_kept(self) -> bool:
        return self.kept >= 0.5

    @property
    def ok_gradient(self) -> bool:
        return self.gradient <= 2 ** 11 * self.t_2

    @property
    def ok_quotient(self) -> bool:
        return self.quotient <= 2 ** 12 * self.t_2

    @property
    def passed(self) -> bool:
        return self.ok_kept and self.ok_gradient and self.ok_quotient


@dataclass
class RayleighReport:
    t_2: float
    Lambda: float
    rows: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)


def _log_weighted_mass(traj, a, b, log_weight):
    from scipy.special import logsumexp
    terms = []
    for log_w, th, el, s in traj.quad_nodes(a, b, with_s=True):
        with np.errstate(divide="ignore"):
            terms.append(log_w + 2 * el[0] + log_weight(s))
    return float(logsumexp(np.concatenate(terms))) if terms else -np.inf


def rayleigh_row(cap: WarpProfile, sched: GlueSchedule, mu: float, lam: float,
                 cutoff=None) -> RayleighRow:
    """Quantities of the Rayleigh estimate for one cap eigen-solution.

    ``cutoff`` defaults to :func:`build_cutoff` on ``[t_-1, t_1]``; the
    gluing site of the cap is ``r = 0``.
    """
    chi = build_cutoff(sched.t_1, sched.t_m1) if cutoff is None else cutoff
    eta = min(1e-6 * cap.length, 1e-3 * sched.t_m1)
    traj = eigenfunction(cap, abs(mu), lam, eta=eta)
    L = cap.length
    total = log_l2_norm_sq(traj, 0.0, L)
    with np.errstate(divide="ignore"):
        grad = _log_weighted_mass(traj, sched.t_m1, sched.t_1,
                                  lambda s: 2 * np.log(np.abs(chi.derivative(s))))
        inner = _log_weighted_mass(traj, sched.t_m1, sched.t_1,
                                   lambda s: 2 * np.log(np.abs(chi(s))))
    outer = log_l2_norm_sq(traj, sched.t_1, L)
    kept = np.logaddexp(inner, outer)
    return RayleighRow(float(mu), float(lam), sched.t_2, float(np.exp(kept - total)),
                       float(np.exp(grad - total)), float(np.exp(grad - kept)))


def rayleigh_check(cap: WarpProfile, sched: GlueSchedule, Lambda: float, n: int = 3,
                   eigensolutions=None, check: bool = True) -> RayleighReport:
    """Rayleigh bounds for every cap eigen-solution with ``|lam| <= Lambda``.

    Args:
        eigensolutions: optional ``[(mu, lam), ...]``; default: all modes of
            ``mode_spectrum(n, .)`` with radial eigenvalues in the window.

    Raises:
        HypothesisViolation: ``Lambda t_2^(1/2) > 1/10``, ``t_2 >= 2^-4`` or
            a collar narrower than ``t_2`` (when ``check``).
    """
    bad = []
    if Lambda * np.sqrt(sched.t_2) > 0.1:
        bad.append(f"need Lambda t_2^(1/2) <= 1/10, got {Lambda * np.sqrt(sched.t_2):.6g}")
    if not sched.t_2 < 2 ** -4:
        bad.append("need t_2 < 2^-4")
    if cap.meta.get("opening", 0.0) < sched.t_2:
        bad.append("cap collar narrower than t_2")
    if bad and check:
        raise HypothesisViolation(bad)
    if eigensolutions is None:
        eigensolutions = []
        mu = (n - 1) / 2.0
        while mu <= MU_HARD_CAP:
            try:
                vals = mode_eigenvalues(cap, mu, (-Lambda, Lambda))
            except WindowCollisionError:
                vals = mode_eigenvalues(cap, mu, (-Lambda, Lambda), on_edge="exclude")
            if vals.size == 0:
                break
            eigensolutions.extend((mu, float(v)) for v in vals)
            mu += 1.0
    rows = [rayleigh_row(cap, sched, mu, lam) for mu, lam in eigensolutions]
    return RayleighReport(sched.t_2, float(Lambda), rows)

