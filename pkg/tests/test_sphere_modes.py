import numpy as np
import pytest
from hypothesis import given, strategies as st

from diracglue.fd_oracle import sphere_modes_fd
from diracglue.sphere_modes import lowest_mode, mode_multiplicity, mode_spectrum


def test_below_smallest_magnitude_raises():
    with pytest.raises(ValueError, match="below"):
        mode_spectrum(3, 0.5)


def test_low_dimension_rejected():
    with pytest.raises(ValueError):
        mode_spectrum(2, 3.0)


def test_s2_modes_symmetric_with_gap():
    spec = mode_spectrum(3, 3.5)
    mus = [mu for mu, _ in spec]
    np.testing.assert_allclose(sorted(mus), sorted(-m for m in mus))
    assert min(abs(m) for m in mus) == 1.0
    assert spec.positive() == [(1.0, 2), (2.0, 4), (3.0, 6)]


def test_multiplicities_match_fd_reconstruction():
    spec = mode_spectrum(3, 2.5)
    fd = sphere_modes_fd(3, 2.5)
    assert len(fd) == len(spec)
    for (mu, m), (v, k) in zip(spec, fd):
        assert m == k
        np.testing.assert_allclose(v, mu, rtol=1e-6)


def test_s3_cross_section_multiplicities():
    # S^3 cross section (n = 4): mu = 3/2 + k, multiplicity 2 (k+1)(k+2) after doubling
    assert [mode_multiplicity(4, k) for k in range(3)] == [4, 12, 24]
    assert lowest_mode(4) == 1.5


@given(st.integers(3, 8), st.floats(0.0, 6.0))
def test_spectrum_properties(n, extra):
    spec = mode_spectrum(n, lowest_mode(n) + extra)
    mus = np.array([mu for mu, _ in spec])
    assert np.all(np.abs(mus) >= lowest_mode(n))
    assert np.all(np.diff(mus) > 0)
    np.testing.assert_array_equal(mus, -mus[::-1])
    assert spec.count() == 2 * sum(m for _, m in spec.positive())
