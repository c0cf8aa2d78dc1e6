"""Command-line runner: every check as a subcommand writing a report.

Exit codes: 0 all checks hold, 1 a verified inequality fails (or an oracle
disagrees), 2 usage error, 3 the requested parameters violate the
hypotheses of the statement being checked.

List-valued flags take comma-separated values; ``2^-8`` style powers are
accepted.  Negative leading values need the ``--flag=-0.1,0.1`` form.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .annulus import corollary1_check, corollary1_schedule, corollary2_check, max_ratio
from .errors import HypothesisViolation
from .fd_oracle import sphere_dirac_fd
from .glued_model import (ClosedModel, assemble_spectrum, claim_counts, disjoint_union,
                          glue, rayleigh_check, round_cap, round_model, spectral_close)
from .gronwall import comparison_instance
from .neck import build_neck, glue_schedule, prop33_cases, prop33_check, verify_neck
from .profiles import ConstantProfile
from .reports import Report, write_csv
from .spectral_flow import (BranchFamily, NoCrossingError, branch_rows, cap_scaling_family,
                            find_crossing, linear_family)

__all__ = ["build_parser", "main", "run", "parse_floats", "SUBCOMMANDS"]

REFS = {
    "prop31": "|u(t) - v(t)| <= |int_{t0}^{t} delta(s) exp(||A||_inf |t - s|) ds|",
    "prop32": "int_{t_-1}^{t_1} |B|^2 / int_{t_-2}^{t_2} |B|^2 <= "
              "2^6 max{3 (t_1/t_2)^(2mu+1), (t_1/t_-1)(t_-2/t_-1)^(2mu-1)}",
    "cor1": "||sigma||^2_{Z(t_-1,t_1)} <= 2^7 t_1^2 t_2 ||sigma||^2_{Z(t_-2,t_2)}",
    "cor2": "||sigma||^2_{B(t_1)} <= 2^9 t_1^2 t_2 ||sigma||^2_{B(t_2)}",
    "prop33": "int_a^b |B|^2 <= (b - a)/(2c) (int_{a-c}^a |B|^2 + int_b^{b+c} |B|^2) "
              "if |lambda| ||rho||_inf + ||rho'||_inf / 2 <= 1",
    "neck": "rho = |t| for |t| >= t_-2, 0 < rho <= t_-2 on [-t_-2, t_-2], |rho'| <= 1",
    "glue": "(Lambda, epsilon)-spectral closeness of the glued and disjoint spectra",
    "claim": "dim E_{lambda}(D1) + dim E_{lambda}(D2) <= dim E_[lambda-eps,lambda+eps](D) "
             "<= dim E_[lambda-2eps,lambda+2eps](D1) + dim E_[lambda-2eps,lambda+2eps](D2)",
    "rayleigh": "||chi sigma||^2 >= ||sigma||^2 / 2, ||grad chi sigma||^2 <= 2^11 t_2 "
                "||sigma||^2, Rayleigh quotient <= 2^12 t_2",
    "flow": "sign balance in [-1, 1] changes over [a, b] => 0 is an eigenvalue of D_T0",
    "sphere-oracle": "shooting spectrum of the round sphere = finite-difference oracle",
}


def parse_floats(text: str) -> list[float]:
    """``"0.2,2^-8,-1e-3"`` -> ``[0.2, 0.00390625, -0.001]``."""
    out = []
    for tok in str(text).split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            if "^" in tok:
                base, exp = tok.split("^")
                out.append(float(base) ** float(exp))
            else:
                out.append(float(tok))
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {tok!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def parse_ints(text: str) -> list[int]:
    vals = parse_floats(text)
    if any(v != int(v) for v in vals):
        raise argparse.ArgumentTypeError("integers expected")
    return [int(v) for v in vals]


def _pmap(fn, items, workers: int):
    """Ordered map, fanned out over a process pool when ``workers > 1``."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _hypothesis_report(check: str, params: dict, exc: HypothesisViolation) -> Report:
    rows = [{"violation": v} for v in exc.violations]
    return Report(check, REFS[check], params, False, float("nan"), rows, status="hypothesis")


def _first(args, name, default):
    vals = getattr(args, name)
    return default if vals is None else vals[0]


def _list(args, name, default):
    vals = getattr(args, name)
    return list(default) if vals is None else list(vals)


# ---------------------------------------------------------------------------
# subcommands

def _prop31_job(job):
    i, mu, lam, tau0, lo, hi, w = job
    r = comparison_instance(mu, lam, tau0, lo, hi, w)
    i0 = int(np.searchsorted(r.grid, r.t0))
    return {"index": i, "mu": mu, "lambda": lam, "tau_lo": lo, "tau_hi": hi, "tau0": tau0,
            "max_deviation": float(np.max(r.deviation)), "max_excess": r.max_excess,
            "deviation_at_t0": float(r.deviation[i0]), "bound_at_t0": float(r.bound[i0]),
            "anchor_mismatch": r.anchor_mismatch, "hypothesis_ok": r.hypothesis_ok,
            "passed": r.passed and r.deviation[i0] == 0.0 and r.bound[i0] == 0.0}


def cmd_prop31(args) -> Report:
    count = args.count or 100
    seed = args.seed
    rng = np.random.default_rng(seed)
    jobs = []
    for i in range(count):
        mu = float(rng.uniform(1.0, 5.0))
        lam = float(rng.uniform(-0.3, 0.3))
        length = float(rng.uniform(0.1, 3.0))
        lo = float(rng.uniform(-6.0, 0.0))
        tau0 = float(rng.uniform(lo, lo + length))
        w = rng.normal(size=2) + 1j * rng.normal(size=2)
        jobs.append((i, mu, lam, tau0, lo, lo + length, w))
    rows = _pmap(_prop31_job, jobs, args.workers)
    params = {"count": count, "seed": seed, "mu_range": [1.0, 5.0],
              "lambda_range": [-0.3, 0.3], "max_length": 3.0, "slack_rel": 1e-8}
    margin = -max(r["max_excess"] for r in rows)
    return Report("prop31", REFS["prop31"], params, all(r["passed"] for r in rows), margin, rows)


def _prop32_job(job):
    t2, mu, lam, n_theta = job
    rep = max_ratio(mu, lam, corollary1_schedule(t2), n_theta=n_theta)
    measured = max(rep.measured, rep.eig_max)
    log_margin = rep.log_bound - np.log(measured)
    return {"t2": t2, "mu": mu, "lambda": lam, "measured": rep.measured, "eig_max": rep.eig_max,
            "bound": rep.bound, "log_margin": float(log_margin), "passed": bool(log_margin >= 0)}


def cmd_prop32(args) -> Report:
    t2s = _list(args, "t2", [2 ** -5, 2 ** -6, 2 ** -8])
    mus = _list(args, "mu", [1, 2, 3, 5])
    lams = _list(args, "lam", [0.0, 0.05, -0.05, 0.1, -0.1])
    n_theta = args.dirs or 64
    params = {"t2": t2s, "mu": mus, "lambda": lams, "n_theta": n_theta,
              "schedule": "t_1 = t_2^4/2, t_-1 = t_1/2, t_-2 = t_-1^4/2"}
    bad = []
    for t2 in t2s:
        for lam in lams:
            bad += [f"t2={t2:g}, lambda={lam:g}: {v}"
                    for v in corollary1_schedule(t2).violations(lam)]
    if bad:
        return _hypothesis_report("prop32", params, HypothesisViolation(bad))
    jobs = [(t2, float(mu), float(lam), n_theta) for t2 in t2s for mu in mus for lam in lams]
    rows = _pmap(_prop32_job, jobs, args.workers)
    return Report("prop32", REFS["prop32"], params, all(r["passed"] for r in rows),
                  min(r["log_margin"] for r in rows), rows)


def _corollary(args, which: str) -> Report:
    n = _first(args, "n", 3)
    t2s = _list(args, "t2", [2 ** -8])
    Lambda = _first(args, "Lambda", 1.0)
    lams = _list(args, "lam", [0.0, 0.05])
    mu_max = _first(args, "mu", 5.0)
    params = {"n": n, "t2": t2s, "Lambda": Lambda, "lambda": lams, "mu_max": mu_max}
    fn = corollary1_check if which == "cor1" else corollary2_check
    rows, ok = [], True
    try:
        for t2 in t2s:
            for lam in lams:
                rep = fn(n, t2, Lambda, lam, mu_max)
                ok &= rep.passed
                for r in rep.rows:
                    rows.append({"t2": t2, "lambda": lam, "mu": r.mu,
                                 "multiplicity": r.multiplicity, "ratio": r.ratio,
                                 "mode_bound": r.mode_bound, "target": r.target,
                                 "log_margin": float(np.log(r.target) - np.log(r.ratio)),
                                 "passed": r.passed})
    except HypothesisViolation as exc:
        return _hypothesis_report(which, params, exc)
    return Report(which, REFS[which], params, bool(ok), min(r["log_margin"] for r in rows), rows)


def cmd_cor1(args) -> Report:
    return _corollary(args, "cor1")


def cmd_cor2(args) -> Report:
    return _corollary(args, "cor2")


def cmd_prop33(args) -> Report:
    t2 = _first(args, "t2", 0.05)
    lams = _list(args, "lam", [0.0, 0.5])
    mus = _list(args, "mu", [1, 2, 3, 5])
    n_dirs = args.dirs or 16
    params = {"neck_t2": t2, "constant_rho": [0.5, 1.0], "lambda": lams, "mu": mus,
              "n_dirs": n_dirs}
    profiles = [("neck", build_neck(t2, allow_large=True)),
                ("constant-0.5", ConstantProfile(0.5)), ("constant-1", ConstantProfile(1.0))]
    rows = []
    try:
        for name, prof in profiles:
            for j, (a, b, c) in enumerate(prop33_cases(prof)):
                for lam in lams:
                    rep = prop33_check(prof, lam, a, b, c, mus, n_dirs=n_dirs)
                    for mu in mus:
                        sel = [r for r in rep.rows if r.mu == mu]
                        rows.append({"profile": name, "case": j, "a": a, "b": b, "c": c,
                                     "lambda": lam, "mu": float(mu),
                                     "hypothesis": rep.hypothesis_value,
                                     "log_margin": min(r.margin for r in sel),
                                     "passed": all(r.passed for r in sel)})
    except HypothesisViolation as exc:
        return _hypothesis_report("prop33", params, exc)
    return Report("prop33", REFS["prop33"], params, all(r["passed"] for r in rows),
                  min(r["log_margin"] for r in rows), rows)


def cmd_neck(args) -> Report:
    t2s = _list(args, "t2", [2 ** -8])
    Lambda = _first(args, "Lambda", 1.0)
    eps = _first(args, "epsilon", 1.0)
    k = _first(args, "k", 0)
    params = {"t2": t2s, "Lambda": Lambda, "epsilon": eps, "k": k}
    rows = []
    try:
        for t2 in t2s:
            sched = glue_schedule(t2, Lambda, eps, k)
            chk = verify_neck(build_neck(t2))
            rows.append({"t2": t2, "t_1": sched.t_1, "t_m1": sched.t_m1, "t_m2": sched.t_m2,
                         "delta": sched.delta, "below_delta": t2 < sched.delta,
                         "rho_minus_abs_t": chk.rho_equals_abs_t,
                         "min_rho_core": chk.min_rho_core, "max_rho_core": chk.max_rho_core,
                         "max_abs_drho": chk.max_abs_drho, "symmetry": chk.symmetry,
                         "margin": 1.0 - chk.max_abs_drho, "passed": chk.passed})
    except HypothesisViolation as exc:
        return _hypothesis_report("neck", params, exc)
    return Report("neck", REFS["neck"], params, all(r["passed"] for r in rows),
                  min(r["margin"] for r in rows), rows)


GLUE_CAPS = ((1.0, 0.2), (1.3, 0.2))


def _spectrum_job(job):
    kind, t2, Lambda, n = job
    c1, c2 = (round_cap(R, op) for R, op in GLUE_CAPS)
    if kind == "cap1":
        return assemble_spectrum(ClosedModel(c1, n, "cap1"), Lambda)
    if kind == "cap2":
        return assemble_spectrum(ClosedModel(c2, n, "cap2"), Lambda)
    return assemble_spectrum(glue(c1, c2, t2, n=n, allow_large=True), Lambda)


def cmd_glue(args) -> Report:
    t2s = _list(args, "t2", [0.2, 0.1, 0.05, 0.025])
    Lambda = _first(args, "Lambda", 3.0)
    eps = _first(args, "epsilon", 0.1)
    n = _first(args, "n", 3)
    params = {"t2": t2s, "Lambda": Lambda, "epsilon": eps, "n": n,
              "caps": [{"radius": R, "opening": op} for R, op in GLUE_CAPS],
              "trend_tol": 1e-9}
    jobs = [("cap1", 0.0, Lambda, n), ("cap2", 0.0, Lambda, n)] + \
        [("glued", t2, Lambda, n) for t2 in t2s]
    specs = _pmap(_spectrum_job, jobs, args.workers)
    union = disjoint_union(specs[0], specs[1])
    rows, pairings, spectra_rows = [], {}, []
    for s in specs[:2]:
        spectra_rows += s.to_rows()
    for t2, spec in zip(t2s, specs[2:]):
        rep = spectral_close(spec, union, Lambda, eps)
        rows.append({"t2": t2, "status": rep.status, "count_glued": rep.count1,
                     "count_union": rep.count2, "max_gap": rep.max_gap,
                     "close": bool(rep.close)})
        pairings[f"{t2!r}"] = rep.pairing
        spectra_rows += spec.to_rows()
    gaps = [r["max_gap"] for r in rows]
    order = np.argsort([-t for t in t2s], kind="stable")
    seq = [gaps[i] for i in order]
    trend = all(b <= a + params["trend_tol"] for a, b in zip(seq, seq[1:]))
    smallest = rows[int(order[-1])]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "glue_spectra.csv", ["eigenvalue", "multiplicity", "mode_mu", "model_tag"],
              spectra_rows)
    (out / "glue_pairings.json").write_text(json.dumps(pairings, indent=2) + "\n")
    margin = eps - smallest["max_gap"] if np.isfinite(smallest["max_gap"]) else -np.inf
    return Report("glue", REFS["glue"], params | {"trend_nonincreasing": trend},
                  trend and smallest["close"], margin, rows)


def cmd_claim(args) -> Report:
    t2 = _first(args, "t2", 0.05)
    Lambda = _first(args, "Lambda", 3.0)
    eps = _first(args, "epsilon", 0.1)
    n = _first(args, "n", 3)
    count = args.count or 10
    params = {"t2": t2, "Lambda": Lambda, "epsilon": eps, "n": n, "seed": args.seed,
              "random_lambdas": count}
    jobs = [("cap1", 0.0, Lambda, n), ("cap2", 0.0, Lambda, n), ("glued", t2, Lambda, n)]
    s1, s2, g = _pmap(_spectrum_job, jobs, args.workers)
    lo, hi = -Lambda + 2 * eps, Lambda - 2 * eps
    eigs = sorted({v for s in (s1, s2) for v, _ in s.entries if lo < v < hi})
    rng = np.random.default_rng(args.seed)
    all_vals = np.array([v for s in (s1, s2, g) for v, _ in s.entries])
    rand = []
    while len(rand) < count:
        x = float(rng.uniform(lo, hi))
        if all_vals.size == 0 or np.min(np.abs(all_vals - x)) > 1e-6:
            rand.append(x)
    rows = []
    for kind, lams in (("cap-eigenvalue", eigs), ("random", rand)):
        for lam in lams:
            rep = claim_counts(g, s1, s2, lam, eps)
            rows.append({"lambda": lam, "kind": kind, "point": rep.point.count,
                         "middle": rep.middle.count, "outer": rep.outer.count,
                         "margin": min(rep.middle.count - rep.point.count,
                                       rep.outer.count - rep.middle.count),
                         "passed": rep.passed})
    return Report("claim", REFS["claim"], params, all(r["passed"] for r in rows),
                  float(min(r["margin"] for r in rows)), rows)


RAYLEIGH_CAPS = ((2.0, 0.05), (3.0, 0.05))


def cmd_rayleigh(args) -> Report:
    t2 = _first(args, "t2", 2 ** -8)
    Lambda = _first(args, "Lambda", 1.0)
    n = _first(args, "n", 3)
    params = {"t2": t2, "Lambda": Lambda, "n": n,
              "caps": [{"radius": R, "opening": op} for R, op in RAYLEIGH_CAPS]}
    rows = []
    try:
        sched = glue_schedule(t2)
        for R, op in RAYLEIGH_CAPS:
            rep = rayleigh_check(round_cap(R, op), sched, Lambda, n=n)
            for r in rep.rows:
                m = min(r.kept - 0.5, np.log(2 ** 11 * t2 / r.gradient),
                        np.log(2 ** 12 * t2 / r.quotient))
                rows.append({"radius": R, "mu": r.mu, "lambda": r.lam, "kept": r.kept,
                             "gradient": r.gradient, "gradient_bound": 2 ** 11 * t2,
                             "quotient": r.quotient, "quotient_bound": 2 ** 12 * t2,
                             "margin": float(m), "passed": r.passed})
    except HypothesisViolation as exc:
        return _hypothesis_report("rayleigh", params, exc)
    return Report("rayleigh", REFS["rayleigh"], params, bool(rows) and all(r["passed"] for r in rows),
                  min((r["margin"] for r in rows), default=-np.inf), rows)


def _constant_family() -> BranchFamily:
    gen = linear_family(1).generator
    return BranchFamily((0.0, 1.0), lambda T: gen(0.25), 1, name="constant")


def cmd_flow(args) -> Report:
    ms = _list(args, "k", [1, 3, 7])
    family = args.family
    tol = 1e-8
    params = {"m": ms, "background": [0.9, 1], "family": family, "tol": tol}
    rows, branch = [], []
    if family in ("all", "linear"):
        for m in ms:
            for bg in ((), ((0.9, 1),)):
                rep = find_crossing(linear_family(int(m), bg), tol=tol)
                err = abs(rep.T0 - 0.5)
                rows.append({"family": "linear", "m": int(m), "background": bool(bg),
                             "T0": rep.T0, "residual": rep.residual, "balance_a": rep.balances[0],
                             "balance_b": rep.balances[1], "forced": rep.forced,
                             "margin": tol - err, "passed": rep.passed and err < tol})
        try:
            find_crossing(_constant_family())
            raised = False
        except NoCrossingError:
            raised = True
        rows.append({"family": "constant", "m": 1, "background": False, "T0": None,
                     "residual": None, "balance_a": None, "balance_b": None, "forced": False,
                     "margin": 0.0 if raised else -1.0, "passed": raised})
    if family in ("all", "cap"):
        fam = cap_scaling_family()
        ctol = 1e-6
        rep = find_crossing(fam, tol=ctol)
        rows.append({"family": "cap-scaling", "m": fam.multiplicity, "background": False,
                     "T0": rep.T0, "residual": rep.residual, "balance_a": rep.balances[0],
                     "balance_b": rep.balances[1], "forced": rep.forced,
                     "margin": ctol - rep.residual, "passed": rep.passed})
        branch = branch_rows(fam, sorted(fam.cache))
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_csv(out / "flow_branch.csv", ["T", "eigenvalue", "multiplicity"], branch)
    return Report("flow", REFS["flow"], params, all(r["passed"] for r in rows),
                  min(r["margin"] for r in rows), rows)


def cmd_sphere_oracle(args) -> Report:
    n = _first(args, "n", 3)
    Lambda = _first(args, "Lambda", 5.0)
    params = {"n": n, "Lambda": Lambda, "fd_points": 4096, "rel_tol": 1e-6, "sym_tol": 1e-8}
    spec = assemble_spectrum(round_model(n), Lambda)
    fd = [(v, m) for v, m in sphere_dirac_fd(n, Lambda) if abs(v) < Lambda]
    rows = []
    ok = len(fd) == len(spec.entries) and not spec.edge_hits
    for (v, m), (w, k) in zip(spec.entries, fd):
        rel = abs(v - w) / abs(w)
        rows.append({"shooting": v, "multiplicity": m, "fd": w, "fd_multiplicity": k,
                     "rel_diff": rel, "margin": 1e-6 - rel, "passed": rel <= 1e-6 and m == k})
    vals = spec.values()
    sym = float(np.max(np.abs(np.sort(vals) + np.sort(vals)[::-1]))) if vals.size else 0.0
    params["symmetry_defect"] = sym
    ok = ok and sym <= 1e-8 and all(r["passed"] for r in rows)
    return Report("sphere-oracle", REFS["sphere-oracle"], params, bool(ok),
                  min((r["margin"] for r in rows), default=-1.0), rows)


SUBCOMMANDS = {
    "prop31": cmd_prop31, "prop32": cmd_prop32, "cor1": cmd_cor1, "cor2": cmd_cor2,
    "prop33": cmd_prop33, "neck": cmd_neck, "glue": cmd_glue, "claim": cmd_claim,
    "rayleigh": cmd_rayleigh, "flow": cmd_flow, "sphere-oracle": cmd_sphere_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="python -m diracglue",
                                description="Run a numerical check and write its report.")
    sub = p.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")
    for name in SUBCOMMANDS:
        s = sub.add_parser(name, help=REFS[name][:70])
        s.add_argument("--t2", type=parse_floats)
        s.add_argument("--mu", type=parse_floats)
        s.add_argument("--lambda", dest="lam", type=parse_floats)
        s.add_argument("--Lambda", type=parse_floats)
        s.add_argument("--epsilon", type=parse_floats)
        s.add_argument("--k", type=parse_ints)
        s.add_argument("--n", type=parse_ints)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--out", default="reports")
        s.add_argument("--format", choices=("json", "csv"), default="json")
        s.add_argument("--workers", type=int, default=1)
        s.add_argument("--count", type=int, help="number of random instances")
        s.add_argument("--dirs", type=int, help="number of anchor directions")
        if name == "flow":
            s.add_argument("--family", choices=("all", "linear", "cap"), default="all")
    return p


def run(args) -> Report:
    """Run the parsed subcommand and write its report."""
    report = SUBCOMMANDS[args.command](args)
    report.write(args.out, args.format)
    return report


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.workers < 1:
        parser.error("--workers must be positive")
    report = run(args)
    verdict = {"ok": "PASS", "fail": "FAIL", "hypothesis": "HYPOTHESIS-VIOLATION"}[report.status]
    print(f"{report.check}: {verdict} margin={report.margin:.6g} "
          f"rows={len(report.rows)} -> {Path(args.out) / (report.check + '.' + args.format)}")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
