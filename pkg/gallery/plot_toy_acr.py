"""
Robustness in a two-species power-law system
=============================================

Two reactions move material between X1 and X2.  The total X1 + X2 is
conserved, yet every positive steady state has the same X1.
"""

import numpy as np

from acrkit import models, structural_report, shinar_feinberg_acr, find_equilibrium

# X2 -> X1 at k1 X2^0.8 and X1 + X2 -> 2 X2 at k2 X1^0.5 X2^0.8
sys = models.toy_system(k1=1.0, k2=2.0)
rep = structural_report(sys.net)
print("complexes:", [sys.net.complex_label(i) for i in range(rep.n)])
print("deficiency", rep.delta, "with nonterminal",
      [sys.net.complex_label(i) for i in rep.nonterminal_complexes])

###############################################################################
# The two nonterminal complexes X2 and X1+X2 have kinetic-order columns that
# differ only in X1, so X1 is robust.

report = shinar_feinberg_acr(sys)
print(report.verdict, report.acr_species)

###############################################################################
# Check it: solve for the steady state at several totals.  X1 sits at
# (k1/k2)^2 = 0.25 every time while X2 absorbs the rest.

for total in [0.5, 1.0, 2.0, 5.0]:
    c = find_equilibrium(sys, [total / 2, total / 2])
    print(f"total {total:4.1f}:  X1 = {c[0]:.12f}  X2 = {c[1]:.6f}")

# below 0.25 there is no positive steady state at all
print(find_equilibrium(sys, [0.1, 0.1]))
