"""Numerical toolkit for radial Dirac eigenproblems on warped products.

Submodules:
    sphere_modes: Dirac eigenvalues of round spheres, the mode set ``mu``.
    profiles: warp functions ``rho`` (Euclidean, neck, caps, glued).
    radial_system: the radial 2x2 system in log-polar form.
    shooting: pole-regular shooting and eigenvalue location.
    gronwall: comparison bounds for perturbed linear systems.
    annulus: mass-ratio estimates on Euclidean annuli.
    neck: neck profiles, cutoffs and the local mass estimate.
    glued_model: spectra of capped and glued models.
    spectral_flow: zero crossings along operator families.
    fd_oracle: finite-difference reference spectra.
    cli: batch runner (``python -m diracglue``).
"""
from .errors import HypothesisViolation
from .glued_model import (ClosedModel, Spectrum, assemble_spectrum, claim_counts,
                          disjoint_union, glue, rayleigh_check, round_cap, round_model,
                          spectral_close)
from .profiles import CapProfile, ConstantProfile, EuclideanProfile, NeckProfile, WarpProfile
from .radial_system import RadialParams, integrate
from .shooting import WindowCollisionError, radial_eigenvalues
from .sphere_modes import mode_spectrum
from .spectral_flow import NoCrossingError, find_crossing

__version__ = "0.1.0"

__all__ = [
    "HypothesisViolation", "ClosedModel", "Spectrum", "assemble_spectrum", "claim_counts",
    "disjoint_union", "glue", "rayleigh_check", "round_cap", "round_model", "spectral_close",
    "CapProfile", "ConstantProfile", "EuclideanProfile", "NeckProfile", "WarpProfile",
    "RadialParams", "integrate", "WindowCollisionError", "radial_eigenvalues",
    "mode_spectrum", "NoCrossingError", "find_crossing",
]
