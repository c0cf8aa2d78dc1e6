"""Acceptance criteria 1-10; each test prints one PASS/FAIL line."""
import filecmp
from pathlib import Path

import numpy as np
import pytest

from diracglue.annulus import (corollary1_check, corollary1_schedule, corollary2_check,
                               max_ratio)
from diracglue.cli import main
from diracglue.errors import HypothesisViolation
from diracglue.glued_model import (assemble_spectrum, claim_counts, disjoint_union,
                                   mode_eigenvalues, rayleigh_check, round_cap, round_model,
                                   spectral_close)
from diracglue.gronwall import comparison_instance
from diracglue.neck import build_neck, glue_schedule, prop33_cases, prop33_check
from diracglue.profiles import CapProfile, ConstantProfile
from diracglue.spectral_flow import (BranchFamily, NoCrossingError, cap_scaling_family,
                                     find_crossing, linear_family)
from diracglue.sphere_modes import mode_spectrum

from conftest import GLUE_T2, LAMBDA


@pytest.fixture
def verdict(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\nCRITERION {n:2d} {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return emit


def test_criterion_01_annulus_ratio(verdict):
    rows = []
    for t2 in (2.0 ** -5, 2.0 ** -6, 2.0 ** -8):
        sched = corollary1_schedule(t2)
        for mu in (1.0, 2.0, 3.0, 5.0):
            for lam in (0.0, 0.05, -0.05, 0.1, -0.1):
                assert not sched.violations(lam)
                rep = max_ratio(mu, lam, sched, n_theta=64)
                rows.append((rep.passed and rep.eig_max <= rep.bound, rep.margin))
    bad = sum(not ok for ok, _ in rows)
    verdict(1, bad == 0, f"{len(rows)} cases, {bad} violations, "
                         f"min log-margin {min(m for _, m in rows):.3f}")


def test_criterion_02_corollaries(verdict):
    out = []
    for lam in (0.0, 0.05):
        for fn in (corollary1_check, corollary2_check):
            rep = fn(3, 2.0 ** -8, 1.0, lam, 5.0)
            out.append((rep.passed, len(rep.rows), rep.worst))
    assert all(n == len(mode_spectrum(3, 5.0).positive()) for _, n, _ in out)
    verdict(2, all(ok for ok, _, _ in out),
            f"{sum(n for _, n, _ in out)} mode checks, worst ratio/target "
            f"{max(w for _, _, w in out):.3e}")


def test_criterion_03_round_oracle(verdict, oracles):
    prof = CapProfile(1.0, 0.0)
    worst, edges_seen = 0.0, []
    for mu in (1.5, 2.5):
        vals, edges = mode_eigenvalues(prof, mu, (-6.0, 6.0), on_edge="exclude",
                                       return_edges=True)
        fd = np.array(oracles["fd_round_s3"][str(mu)])
        fd = fd[np.abs(fd) < 6.0 - 1e-6]
        assert vals.size == fd.size
        worst = max(worst, float(np.max(np.abs(vals - fd) / np.abs(fd))))
        edges_seen += edges
    spec = assemble_spectrum(round_model(3), 6.0)
    v = np.sort(spec.values())
    sym = float(np.max(np.abs(v + v[::-1])))
    verdict(3, worst < 1e-6 and sym < 1e-8,
            f"max rel diff vs FD {worst:.2e}, symmetry defect {sym:.2e}, "
            f"excluded edge eigenvalues {sorted(edges_seen)}")


def test_criterion_04_gronwall(verdict):
    rng = np.random.default_rng(2024)
    excess, exact = [], True
    for _ in range(100):
        mu = rng.uniform(1.0, 5.0)
        lam = rng.uniform(-0.3, 0.3)
        length = rng.uniform(0.1, 3.0)
        lo = rng.uniform(-6.0, 0.0)
        tau0 = rng.uniform(lo, lo + length)
        w = rng.normal(size=2) + 1j * rng.normal(size=2)
        rep = comparison_instance(mu, lam, tau0, lo, lo + length, w)
        i0 = int(np.searchsorted(rep.grid, tau0))
        exact &= bool(rep.deviation[i0] == 0.0 and rep.bound[i0] == 0.0)
        excess.append((rep.passed, rep.max_excess))
    bad = sum(not ok for ok, _ in excess)
    verdict(4, bad == 0 and exact,
            f"100 instances, {bad} failures, max excess {max(e for _, e in excess):.2e}, "
            f"exact zero at t0: {exact}")


def test_criterion_05_cylinder_estimate(verdict):
    profiles = [build_neck(0.05, allow_large=True), ConstantProfile(0.5), ConstantProfile(1.0)]
    n, bad = 0, 0
    for prof in profiles:
        for a, b, c in prop33_cases(prof):
            for lam in (0.0, 0.5):
                rep = prop33_check(prof, lam, a, b, c, [1, 2, 3, 5], n_dirs=16)
                n += len(rep.rows)
                bad += sum(not r.passed for r in rep.rows)
    try:
        prop33_check(ConstantProfile(0.2), 10.0, 0.4, 0.6, 0.2, [1.0])
        raised = False
    except HypothesisViolation:
        raised = True
    verdict(5, bad == 0 and raised, f"{n} solution checks, {bad} violations, "
                                    f"lambda=10 hypothesis error raised: {raised}")


def test_criterion_06_gluing_trend(verdict, cap_spectra, glued_spectra):
    union = disjoint_union(*cap_spectra)
    reps = [spectral_close(glued_spectra[t2], union, LAMBDA, 0.1) for t2 in GLUE_T2]
    gaps = [r.max_gap for r in reps]
    trend = all(b <= a + 1e-9 for a, b in zip(gaps, gaps[1:]))
    verdict(6, trend and reps[-1].close is True,
            f"max gaps {['%.2e' % g for g in gaps]} for t2 {list(GLUE_T2)}, "
            f"close at t2={GLUE_T2[-1]}: {reps[-1].close}")


def test_criterion_07_claim(verdict, cap_spectra, glued_spectra):
    s1, s2 = cap_spectra
    g = glued_spectra[0.05]
    eps = 0.1
    lo, hi = -LAMBDA + 2 * eps, LAMBDA - 2 * eps
    eigs = sorted({v for s in (s1, s2) for v, _ in s.entries if lo < v < hi})
    every = np.array([v for s in (s1, s2, g) for v, _ in s.entries])
    rng = np.random.default_rng(7)
    rand = []
    while len(rand) < 10:
        x = rng.uniform(lo, hi)
        if np.min(np.abs(every - x)) > 1e-6:
            rand.append(x)
    reps = [claim_counts(g, s1, s2, lam, eps) for lam in eigs + rand]
    assert eigs and all(r.point.count >= 1 for r in reps[:len(eigs)])
    verdict(7, all(r.passed for r in reps),
            f"{len(eigs)} cap eigenvalues + 10 random lambdas, "
            f"{sum(not r.passed for r in reps)} failures")


def test_criterion_08_rayleigh(verdict):
    sched = glue_schedule(2.0 ** -8)
    rows = []
    for R in (2.0, 3.0):
        rows += rayleigh_check(round_cap(R, 0.05), sched, 1.0).rows
    worst_q = max(r.quotient for r in rows) / (2 ** 12 * sched.t_2)
    verdict(8, bool(rows) and all(r.passed for r in rows),
            f"{len(rows)} cap eigenmodes, min kept {min(r.kept for r in rows):.6f}, "
            f"worst quotient/bound {worst_q:.2e}")


def test_criterion_09_spectral_flow(verdict):
    errs = []
    for m in (1, 3, 7):
        for bg in ((), ((0.9, 1),)):
            errs.append(abs(find_crossing(linear_family(m, bg)).T0 - 0.5))
    geo = find_crossing(cap_scaling_family(), tol=1e-6)
    gen = linear_family(1).generator
    try:
        find_crossing(BranchFamily((0.0, 1.0), lambda T: gen(0.25)))
        raised = False
    except NoCrossingError:
        raised = True
    ok = max(errs) < 1e-8 and geo.passed and geo.residual < 1e-6 and raised
    verdict(9, ok, f"linear max |T0-1/2| {max(errs):.1e}, geometric T0 {geo.T0:.8f} "
                   f"residual {geo.residual:.1e}, no-crossing error raised: {raised}")


DETERMINISM_RUNS = {
    "prop31": ["--count", "5"],
    "prop32": ["--mu", "1,2", "--lambda", "0.05", "--t2", "2^-5", "--dirs", "16"],
    "cor1": ["--mu", "2", "--lambda", "0.05"],
    "cor2": ["--mu", "2", "--lambda", "0.05"],
    "prop33": ["--mu", "1,2", "--lambda", "0.5", "--dirs", "4"],
    "neck": ["--t2", "2^-6,2^-8"],
    "glue": ["--t2", "0.2", "--Lambda", "1.6"],
    "claim": ["--t2", "0.2", "--Lambda", "1.6", "--count", "3"],
    "rayleigh": [],
    "flow": [],
    "sphere-oracle": ["--Lambda", "3"],
}


def _tree(path: Path):
    return sorted(p.relative_to(path) for p in path.rglob("*") if p.is_file())


def test_criterion_10_determinism(verdict, tmp_path):
    differ, codes = [], {}
    for cmd, extra in DETERMINISM_RUNS.items():
        outs = [tmp_path / cmd / run for run in ("a", "b")]
        codes[cmd] = [main([cmd, *extra, "--seed", "3", "--out", str(o)]) for o in outs]
        files = _tree(outs[0])
        if files != _tree(outs[1]) or not files:
            differ.append(cmd)
            continue
        if any(not filecmp.cmp(outs[0] / f, outs[1] / f, shallow=False) for f in files):
            differ.append(cmd)
    assert all(c[0] == c[1] == 0 for c in codes.values()), codes
    verdict(10, not differ, f"{len(DETERMINISM_RUNS)} subcommands run twice, "
                            f"differing: {differ or 'none'}")
