"""Walkthrough: the PAM mother constellation and its energy law.

The base constellation is a small real matrix shared by every user.  One
amplitude parameter (delta) stretches the PAM ladder; the per-dimension
energy follows a closed form that we double-check against a direct sum.
"""

import numpy as np

from scma_ntn import build_mother_constellation, dimension_energy
from scma_ntn.constellation import pam_amplitudes

for delta in (1.0, 1.5, 2.0, 3.0):
    mc = build_mother_constellation(4, 2, delta)
    print(f"delta = {delta}")
    print(f"  ladder a_m      : {pam_amplitudes(4, delta)}")
    print(f"  dimension 1     : {mc.rows[0]}")
    print(f"  dimension 2     : {mc.rows[1]}")
    closed = dimension_energy(4, delta)
    brute = float(np.sum(mc.rows[0] ** 2))
    print(f"  energy          : closed form {closed:.6g}, direct sum {brute:.6g}")
    print(f"  row means       : {mc.rows.mean(axis=1)}")
    print()

print("Larger alphabets follow the same interleaving pattern:")
mc8 = build_mother_constellation(8, 2, 1.5)
print(f"  M = 8, delta = 1.5, dim 1: {mc8.rows[0]}")
print(f"  M = 8, delta = 1.5, dim 2: {mc8.rows[1]}")
