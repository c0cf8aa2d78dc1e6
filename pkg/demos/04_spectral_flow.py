"""A doubly degenerate eigenvalue branch crossing zero.

Cap 2 carries a constant potential V = 6, so its lowest branch sits near
V - 3/(2R).  Growing its radius R from 0.22 to 0.29 pushes that branch (of
multiplicity 2) from about -0.87 to +0.81.  The sign balance in [-1, 1]
changes from +2 to -2, so some intermediate operator has a kernel.
"""
import numpy as np

from diracglue.spectral_flow import branch_rows, cap_scaling_family, find_crossing

fam = cap_scaling_family()
for T, v, m in branch_rows(fam, np.linspace(0.0, 1.0, 5)):
    print(f"T={T:.2f}: eigenvalue {v:+.6f} x{m}")

rep = find_crossing(fam, tol=1e-10)
print(f"\nzero crossing at T0 = {rep.T0:.10f} (residual {rep.residual:.1e}, "
      f"{rep.evaluations} spectra, balances {rep.balances})")
