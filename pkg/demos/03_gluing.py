"""Gluing two round caps through a shrinking neck.

Two round caps (radii 1 and 1.3, flat collars of width 0.2) are joined by a
neck of size t_2.  As t_2 decreases the glued spectrum approaches the
disjoint-union spectrum.  The gaps soon sit at the eigenvalue refinement
tolerance, far above the true (super-exponentially small) splitting.
"""
from diracglue.glued_model import (ClosedModel, assemble_spectrum, disjoint_union, glue,
                                   round_cap, spectral_close)

Lambda = 2.0
c1, c2 = round_cap(1.0, 0.2), round_cap(1.3, 0.2)
union = disjoint_union(assemble_spectrum(ClosedModel(c1, 3, "cap1"), Lambda),
                       assemble_spectrum(ClosedModel(c2, 3, "cap2"), Lambda))
print("disjoint union:", [(round(v, 6), m) for v, m in union.entries])

for t2 in (0.2, 0.05):
    spec = assemble_spectrum(glue(c1, c2, t2, allow_large=True), Lambda)
    rep = spectral_close(spec, union, Lambda, 0.1)
    print(f"t2={t2}: {rep.status}, max gap {rep.max_gap:.2e}, "
          f"{rep.count1} eigenvalues in (-{Lambda}, {Lambda})")
