"""Eigenvalues of the cross-section operator on the round unit sphere S^{n-1}.

The radial reduction of a Dirac eigenproblem on a warped product
``dt^2 + rho(t)^2 dsigma^2`` is indexed by the eigenvalues ``mu`` of the
sphere operator.  For odd ``n`` this is the Dirac operator of S^{n-1}; for
even ``n`` the restricted spinor bundle splits into two copies and the
operator is ``D (+) -D``, which is folded into the multiplicities here.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb, floor

__all__ = ["ModeSpectrum", "mode_spectrum", "lowest_mode", "mode_multiplicity"]


@dataclass(frozen=True)
class ModeSpectrum:
    """Sorted list of ``(mu, multiplicity)`` pairs with ``|mu| <= mu_max``."""

    n: int
    modes: tuple[tuple[float, int], ...]
    mu_max: float

    def positive(self) -> list[tuple[float, int]]:
        """Modes with ``mu > 0``; each indexes one 2x2 radial system."""
        return [(mu, m) for mu, m in self.modes if mu > 0]

    def count(self) -> int:
        return sum(m for _, m in self.modes)

    def __iter__(self):
        return iter(self.modes)

    def __len__(self):
        return len(self.modes)


def lowest_mode(n: int) -> float:
    """Smallest ``|mu|`` on S^{n-1}, i.e. ``(n-1)/2``."""
    return (n - 1) / 2


def mode_multiplicity(n: int, k: int) -> int:
    """Multiplicity of ``+((n-1)/2 + k)`` (equal to that of its negative)."""
    m = 2 ** floor((n - 1) / 2) * comb(k + n - 2, k)
    if n % 2 == 0:
        m *= 2
    return m


def mode_spectrum(n: int, mu_max: float) -> ModeSpectrum:
    """All sphere-operator eigenvalues of magnitude ``<= mu_max``.

    Uses the round-sphere closed form ``mu = +-((n-1)/2 + k)``, ``k >= 0``.
    The closed form is cross-checked against a finite-difference
    reconstruction of the sphere spectrum in the test suite
    (:func:`diracglue.fd_oracle.sphere_modes_fd`).

    Raises:
        ValueError: if ``n < 3`` (no spectral gap ``|mu| >= 1``) or
            ``mu_max`` is below ``(n-1)/2`` (empty spectrum).
    """
    if int(n) != n or n < 3:
        raise ValueError(f"dimension n must be an integer >= 3, got {n!r}")
    n = int(n)
    base = lowest_mode(n)
    if mu_max < base:
        raise ValueError(
            f"mu_max={mu_max} is below the smallest eigenvalue magnitude {base}")
    pos = []
    k = 0
    while base + k <= mu_max:
        pos.append((base + k, mode_multiplicity(n, k)))
        k += 1
    modes = [(-mu, m) for mu, m in reversed(pos)] + pos
    return ModeSpectrum(n=n, modes=tuple(modes), mu_max=float(mu_max))
