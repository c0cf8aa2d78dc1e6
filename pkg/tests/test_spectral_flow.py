import numpy as np
import pytest
from hypothesis import given, strategies as st

from diracglue.glued_model import Spectrum
from diracglue.spectral_flow import (BranchFamily, NoCrossingError, branch_rows,
                                     count_signed, find_crossing, linear_family)


def test_count_signed_examples():
    s = Spectrum((-1.5, 1.5), [(-0.5, 3), (0.2, 1)])
    assert count_signed(s) == (3, 1, 0)
    assert count_signed(Spectrum((-1.5, 1.5), [])) == (0, 0, 0)
    assert count_signed(Spectrum((-1.5, 1.5), [(1e-12, 2)])) == (0, 0, 2)
    with pytest.raises(ValueError):
        count_signed(Spectrum((-0.5, 0.5), []))


@pytest.mark.parametrize("m", [1, 3, 7])
@pytest.mark.parametrize("bg", [(), ((0.9, 1),)])
def test_linear_family_crossing(m, bg):
    rep = find_crossing(linear_family(m, bg), tol=1e-10)
    assert abs(rep.T0 - 0.5) < 1e-10
    assert rep.passed


def test_counting_argument_flag():
    rep = find_crossing(linear_family(3, ((0.9, 1),)))
    assert rep.balances == (2, -4) and rep.forced
    rep = find_crossing(linear_family(1, ((0.9, 1),)))
    assert rep.balances == (0, -2) and not rep.forced


@given(st.integers(1, 9), st.lists(st.tuples(st.floats(0.05, 1.2), st.integers(1, 3)),
                                   max_size=3),
       st.integers(2, 12))
def test_crossing_invariant_under_grid(m, bg, grid):
    bg = [(v * s, k) for (v, k), s in zip(bg, (1, -1, 1))]
    fam = linear_family(m, bg)
    r1 = find_crossing(fam, tol=1e-9, grid=2)
    r2 = find_crossing(linear_family(m, bg), tol=1e-9, grid=grid)
    assert abs(r1.T0 - 0.5) < 1e-9 and abs(r2.T0 - r1.T0) < 2e-9


def test_no_crossing_raises():
    gen = linear_family(2).generator
    fam = BranchFamily((0.0, 1.0), lambda T: gen(0.3), 2)
    with pytest.raises(NoCrossingError):
        find_crossing(fam)


def test_background_zero_rejected():
    with pytest.raises(ValueError):
        linear_family(1, ((0.0, 1),))


def test_branch_rows():
    fam = linear_family(2, ((0.9, 1), (1.1, 1)))
    rows = branch_rows(fam, [0.0, 0.5])
    assert rows == [(0.0, -1.0, 2), (0.0, 0.9, 1), (0.5, 0.0, 2), (0.5, 0.9, 1)]


def test_family_validation():
    gen = linear_family(1).generator
    with pytest.raises(ValueError):
        BranchFamily((1.0, 0.0), gen)
    with pytest.raises(ValueError):
        BranchFamily((0.0, 1.0), gen, multiplicity=0)
    narrow = BranchFamily((0.0, 1.0), lambda T: Spectrum((-0.5, 0.5), []))
    with pytest.raises(ValueError):
        narrow.spectrum(0.0)


@pytest.fixture(scope="session")
def cap_crossing():
    from diracglue.spectral_flow import cap_scaling_family
    fam = cap_scaling_family()
    return fam, find_crossing(fam, tol=1e-8)


def test_geometric_family(cap_crossing):
    fam, rep = cap_crossing
    assert rep.passed and rep.residual < 1e-8
    assert rep.balances == (2, -2) and rep.forced
    assert 0.0 < rep.T0 < 1.0
    # the branch near zero is doubly degenerate
    near = [(v, m) for v, m in fam.spectrum(rep.T0).entries if abs(v) < 1e-6]
    assert near and near[0][1] == 2
