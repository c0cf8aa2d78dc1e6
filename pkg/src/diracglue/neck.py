"""Gluing neck, cut-off functions, parameter schedule and the cylinder estimate.

The neck joins two Euclidean collars through ``[-t_-2, t_-2] x S^(n-1)``
with warp ``rho``:

a) ``rho(t) = |t|`` for ``|t| >= t_-2``;
b) ``0 < rho <= t_-2`` on ``|t| <= t_-2``;
c) ``|rho'| <= 1``.

The schedule is ``t_1 = t_2^4 / 2``, ``t_-1 = t_1 / 2``,
``t_-2 = 2^-9 t_2^16``, and the admissible size of ``t_2`` is governed by

    delta(Lambda, eps, k) = min{1/(100 Lambda^2), 2^-4, 1/(2 Lambda),
                                1/(2 (k+1)), 2^-17 eps^2 / (k+1)^2}.

The cylinder estimate checked by :func:`prop33_check` states that if
``|lam| ||rho||_inf + ||rho'||_inf / 2 <= 1`` on ``[a - c, b + c]`` then
every eigen-solution satisfies

    ||s||^2_[a,b] <= (b - a) / (2 c) * (||s||^2_[b,b+c] + ||s||^2_[a-c,a]).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import HypothesisViolation
from .profiles import (NeckProfile, WarpProfile, neck_shape, smoothstep,
                       smoothstep_derivative)
from .radial_system import (DEFAULT_ATOL, DEFAULT_RTOL, RadialParams,
                            batch_log_masses, system_matrix)

__all__ = [
    "GlueSchedule", "glue_schedule", "delta_of", "build_neck", "NeckCheck",
    "verify_neck", "CutoffFunction", "build_cutoff", "warped_radial_params",
    "Prop33Row", "Prop33Report", "prop33_hypothesis", "prop33_check",
    "prop33_cases",
]

SAMPLES = 10_000
SAFETY = 1e-12


def delta_of(Lambda: float, epsilon: float, k: int) -> float:
    """Largest admissible neck size for ``(Lambda, epsilon)`` and ``k`` eigenvalues."""
    if Lambda <= 0 or epsilon <= 0:
        raise ValueError("Lambda and epsilon must be positive")
    if int(k) != k or k < 0:
        raise ValueError("k must be a nonnegative integer")
    k1 = k + 1.0
    return float(min(1.0 / (100.0 * Lambda ** 2), 2.0 ** -4, 1.0 / (2.0 * Lambda),
                     1.0 / (2.0 * k1), 2.0 ** -17 * epsilon ** 2 / k1 ** 2))


@dataclass(frozen=True)
class GlueSchedule:
    """Radii of the gluing construction and the closeness parameters."""

    t_2: float
    t_1: float
    t_m1: float
    t_m2: float
    Lambda: float
    epsilon: float
    k: int
    delta: float

    def violations(self) -> list[str]:
        """Failed conditions ``0 < t_2 < min{delta, 2^-4}`` (empty if none)."""
        out = []
        if not 0 < self.t_2 < 2 ** -4:
            out.append("need 0 < t_2 < 2^-4")
        if not self.t_2 < self.delta:
            out.append(f"need t_2 < delta = {self.delta:.6g}")
        return out

    @property
    def admissible(self) -> bool:
        """All conditions hold, including ``t_2 < delta``."""
        return not self.violations()


def glue_schedule(t_2: float, Lambda: float = 1.0, epsilon: float = 1.0, k: int = 0,
                  require_delta: bool = False, allow_large: bool = False) -> GlueSchedule:
    """Schedule for neck size ``t_2``.

    Args:
        require_delta: also enforce ``t_2 < delta``; off by default because
            ``delta`` is far below what a numerical run can resolve.
        allow_large: skip ``t_2 < 2^-4`` (trend studies at large ``t_2``).

    Raises:
        HypothesisViolation: an enforced condition fails.
    """
    if not t_2 > 0:
        raise ValueError("t_2 must be positive")
    t_1 = 0.5 * t_2 ** 4
    sched = GlueSchedule(float(t_2), t_1, 0.5 * t_1, 2.0 ** -9 * t_2 ** 16,
                         float(Lambda), float(epsilon), int(k), delta_of(Lambda, epsilon, k))
    bad = [v for v in sched.violations()
           if (require_delta or "delta" not in v) and (not allow_large or "2^-4" not in v)]
    if bad:
        raise HypothesisViolation(bad)
    return sched


def build_neck(t_2: float, allow_large: bool = False, extent: float | None = None) -> WarpProfile:
    """Neck profile ``rho(t) = t_-2 s(t / t_-2)`` on ``[-t_2, t_2]``.

    ``s`` is even, equal to ``|x|`` for ``|x| >= 1`` and ``1/2`` at 0.
    """
    if not t_2 > 0:
        raise ValueError("t_2 must be positive")
    if not allow_large and not t_2 < 2 ** -4:
        raise HypothesisViolation(["need 0 < t_2 < 2^-4"])
    t_m2 = 2.0 ** -9 * t_2 ** 16
    if t_m2 <= 0:
        raise ValueError("t_2 too small: t_-2 underflows")
    return NeckProfile(t_2, t_m2, extent)


@dataclass
class NeckCheck:
    """Sampled verification of properties a)-c) and symmetry."""

    rho_equals_abs_t: float
    min_rho_core: float
    max_rho_core: float
    max_abs_drho: float
    symmetry: float
    t_m2: float

    @property
    def passed(self) -> bool:
        return (self.rho_equals_abs_t <= SAFETY * max(self.t_m2, 1e-300)
                and 0 < self.min_rho_core and self.max_rho_core <= self.t_m2 * (1 + SAFETY)
                and self.max_abs_drho <= 1 + SAFETY and self.symmetry == 0.0)


def verify_neck(profile: WarpProfile, samples: int = SAMPLES) -> NeckCheck:
    """Check a)-c) by dense sampling of the domain and of the core ``|t| <= 2 t_-2``."""
    t_m2 = float(profile.meta["t_m2"])
    a, b = profile.domain
    t = np.concatenate([np.linspace(a, b, samples),
                        np.linspace(-2 * t_m2, 2 * t_m2, samples), [-t_m2, t_m2]])
    rho, drho = profile.rho(t), profile.drho(t)
    outer = np.abs(t) >= t_m2
    core = ~outer | (np.abs(t) == t_m2)
    return NeckCheck(
        rho_equals_abs_t=float(np.max(np.abs(rho[outer] - np.abs(t[outer])))),
        min_rho_core=float(np.min(rho[core])), max_rho_core=float(np.max(rho[core])),
        max_abs_drho=float(np.max(np.abs(drho))),
        symmetry=float(np.max(np.abs(profile.rho(-t) - rho))), t_m2=t_m2)


@dataclass(frozen=True)
class CutoffFunction:
    """``chi = 0`` for ``t <= t_-1``, ``1`` for ``t >= t_1``, quintic in between.

    The quintic smoothstep has maximal slope ``15/8``, so
    ``sup |chi'| = 15 / (8 (t_1 - t_-1)) = 3.75 / t_1`` when ``t_-1 = t_1 / 2``.
    """

    t_m1: float
    t_1: float

    def __call__(self, t):
        return smoothstep((np.asarray(t, dtype=float) - self.t_m1) / (self.t_1 - self.t_m1))

    def derivative(self, t):
        w = self.t_1 - self.t_m1
        return smoothstep_derivative((np.asarray(t, dtype=float) - self.t_m1) / w) / w

    @property
    def gradient_bound(self) -> float:
        """The required bound ``2 / (t_1 - t_-1) = 4 / t_1``."""
        return 2.0 / (self.t_1 - self.t_m1)

    @property
    def sup_gradient(self) -> float:
        """Exact ``sup |chi'|``."""
        return 1.875 / (self.t_1 - self.t_m1)

    def sampled_sup_gradient(self, samples: int = SAMPLES) -> float:
        t = np.linspace(self.t_m1, self.t_1, samples)
        return float(np.max(np.abs(self.derivative(t))))


def build_cutoff(t_1: float, t_m1: float) -> CutoffFunction:
    """Cut-off for the transition ``[t_-1, t_1]``; requires ``t_-1 = t_1 / 2``."""
    if not t_1 > 0 or not np.isclose(t_m1, 0.5 * t_1, rtol=1e-12, atol=0.0):
        raise ValueError("need t_1 > 0 and t_-1 = t_1 / 2")
    return CutoffFunction(float(t_m1), float(t_1))


def warped_radial_params(profile: WarpProfile, mu: float, lam: float,
                         samples: int = 1000) -> RadialParams:
    """Radial system ``B' = [[mu/rho, -lam], [lam, -mu/rho]] B`` on ``profile``.

    The normalisation ``rho^(-(n-1)/2)`` is already absorbed in ``B``, so
    ``n`` does not appear; ``rho(t) = t`` gives the Euclidean system.

    Raises:
        ValueError: ``rho`` is not positive on the open domain (sampled).
    """
    a, b = profile.domain
    lo = a if np.isfinite(a) else -1.0
    hi = b if np.isfinite(b) else lo + 1.0
    t = np.linspace(lo, hi, samples + 2)[1:-1]
    if np.any(np.asarray(profile.rho(t)) <= 0):
        raise ValueError("profile must be positive on the open domain")
    return RadialParams(float(mu), float(lam), profile)


def warped_system_matrix(params: RadialParams, t):
    """Coefficient matrix of the warped system at ``t`` (profile coordinate ``t``)."""
    return system_matrix(params.mu, params.lam, t, rho=params.profile.rho)


# ---------------------------------------------------------------------------
# cylinder estimate

def prop33_hypothesis(profile: WarpProfile, lam: float, a: float, b: float, c: float,
                      samples: int = SAMPLES) -> float:
    """Sampled ``|lam| ||rho||_inf + ||rho'||_inf / 2`` on ``[a - c, b + c]``."""
    t = np.linspace(a - c, b + c, samples)
    if "t_m2" in profile.meta:
        core = float(profile.meta["t_m2"])
        t = np.union1d(t, np.clip(np.linspace(-2 * core, 2 * core, samples), a - c, b + c))
    return float(abs(lam) * np.max(np.abs(profile.rho(t)))
                 + 0.5 * np.max(np.abs(profile.drho(t))))


@dataclass
class Prop33Row:
    mu: float
    theta: float
    log_lhs: float
    log_rhs: float

    @property
    def margin(self) -> float:
        """``log(rhs / lhs)``."""
        return self.log_rhs - self.log_lhs

    @property
    def passed(self) -> bool:
        return self.margin >= -1e-10


@dataclass
class Prop33Report:
    lam: float
    a: float
    b: float
    c: float
    hypothesis_value: float
    rows: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def margin(self) -> float:
        return min((r.margin for r in self.rows), default=np.inf)


def prop33_check(profile: WarpProfile, lam: float, a: float, b: float, c: float, mu,
                 n_dirs: int = 16, both_signs: bool = False, rtol: float = DEFAULT_RTOL,
                 atol: float = DEFAULT_ATOL) -> Prop33Report:
    """Check the cylinder estimate for every solution through ``n_dirs`` anchors.

    Solutions are anchored at ``(a + b) / 2`` with ``B = (cos th, sin th)``,
    ``th = j pi / n_dirs``; masses are compared in log space.

    Args:
        mu: one mode or a sequence of modes; ``both_signs`` adds ``-mu``
            (equivalent to ``mu`` under ``B -> (b+, -b-)``, kept as a check).

    Raises:
        ValueError: bad ``a, b, c`` or interval outside the domain.
        HypothesisViolation: the sampled hypothesis exceeds 1.
    """
    if not a < b or not c > 0:
        raise ValueError("need a < b and c > 0")
    lo, hi = profile.domain
    if a - c < lo or b + c > hi:
        raise ValueError(f"[a - c, b + c] = [{a - c}, {b + c}] outside domain {profile.domain}")
    hyp = prop33_hypothesis(profile, lam, a, b, c)
    if hyp > 1 + SAFETY:
        raise HypothesisViolation([f"|lambda| ||rho|| + ||rho'|| / 2 = {hyp:.6g} > 1"])
    mus = np.atleast_1d(np.asarray(mu, dtype=float))
    if both_signs:
        mus = np.concatenate([mus, -mus])
    thetas = np.arange(n_dirs) * np.pi / n_dirs
    log_factor = np.log((b - a) / (2 * c))
    report = Prop33Report(float(lam), float(a), float(b), float(c), hyp)
    for m in mus:
        logs = batch_log_masses(profile, m, lam, 0.5 * (a + b), thetas,
                                [(a, b), (b, b + c), (a - c, a)], rtol=rtol, atol=atol)
        rhs = log_factor + np.logaddexp(logs[1], logs[2])
        for th, l, r in zip(thetas, logs[0], rhs):
            report.rows.append(Prop33Row(float(m), float(th), float(l), float(r)))
    return report


def prop33_cases(profile: WarpProfile) -> list[tuple[float, float, float]]:
    """Five ``(a, b, c)`` cases inside the domain of ``profile``.

    For a neck: the symmetric ``(-t_1, t_1, t_2 - t_1)`` case, a wide
    symmetric, two one-sided and a core-only case.  Otherwise fractions of
    the domain.
    """
    if profile.kind == "neck":
        t_2, t_m2 = profile.meta["t_2"], profile.meta["t_m2"]
        t_1 = 0.5 * t_2 ** 4
        return [(-t_1, t_1, t_2 - t_1), (-t_2 / 4, t_2 / 4, t_2 / 2),
                (-t_2 / 2, 0.0, t_2 / 2), (0.0, t_2 / 2, t_2 / 2),
                (-t_m2, t_m2, t_2 / 2)]
    lo, hi = profile.domain
    L = hi - lo
    return [(lo + f * L, lo + g * L, h * L) for f, g, h in
            ((0.4, 0.6, 0.4), (0.25, 0.75, 0.25), (0.3, 0.5, 0.2),
             (0.45, 0.55, 0.1), (0.2, 0.3, 0.1))]
