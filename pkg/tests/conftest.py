"""Shared fixtures: frozen oracle values and the expensive spectra."""
import json
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from diracglue.glued_model import ClosedModel, assemble_spectrum, glue, round_cap

settings.register_profile("default", max_examples=25, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ORACLES = json.loads((Path(__file__).parent / "oracles" / "frozen.json").read_text())

GLUE_T2 = (0.2, 0.1, 0.05, 0.025)
LAMBDA = 3.0


@pytest.fixture(scope="session")
def oracles():
    return ORACLES


@pytest.fixture(scope="session")
def caps():
    return round_cap(1.0, 0.2), round_cap(1.3, 0.2)


@pytest.fixture(scope="session")
def cap_spectra(caps):
    c1, c2 = caps
    return (assemble_spectrum(ClosedModel(c1, 3, "cap1"), LAMBDA),
            assemble_spectrum(ClosedModel(c2, 3, "cap2"), LAMBDA))


@pytest.fixture(scope="session")
def glued_spectra(caps):
    """``{t_2: Spectrum}`` of the glued caps for the gluing-trend sequence."""
    c1, c2 = caps
    return {t2: assemble_spectrum(glue(c1, c2, t2, n=3, allow_large=True), LAMBDA)
            for t2 in GLUE_T2}
