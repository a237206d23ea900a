"""
Atmospheric carbon in an approximated carbon cycle
===================================================

Three pools (land A1, atmosphere A2, ocean A3) exchange carbon.  After a
power-law approximation the network has deficiency one and the
atmospheric pool is robust.  The approximated dynamics are also very stiff,
which the last section shows.
"""

import numpy as np

from acrkit import models, structural_report, shinar_feinberg_acr, t_matrix
from acrkit.equilibria import integrate, sample_equilibria
from acrkit.errors import IntegrationError

sys = models.carbon_gma_system()
rep = structural_report(sys.net)
print(f"n={rep.n} linkage classes={rep.ell} s={rep.s} deficiency={rep.delta}")
print(t_matrix(sys).entries)

###############################################################################
# The land-pool orders are equal (-68) in both photosynthesis and
# respiration, so the T columns of A1+2A2 and A1+A2 differ only in A2.

print(shinar_feinberg_acr(sys).acr_species)

###############################################################################
# Sample steady states over many total-carbon values.

eqs = sample_equilibria(sys, 12, seed=0, total_range=(0.5, 2.0))
for p, w in zip(eqs.points, eqs.class_values[:, 0]):
    print(f"A0 = {w:.3f}:  A1 = {p[0]:.4f}  A2 = {p[1]:.8f}  A3 = {p[2]:.8f}")

###############################################################################
# At A0 = 1 the steady state is (0.7, 0.15, 0.15).  Its Jacobian has one huge
# positive eigenvalue, because A1 enters with order -68 and q1 < q2.  So the
# state repels almost every trajectory and stiff solvers give up at once.

c = np.array([0.7, 0.15, 0.15])
K = sys.k * np.prod(c ** sys.F, axis=1)
J = sys.N @ (K[:, None] * sys.F) / c[None, :]
print("eigenvalues:", np.linalg.eigvals(J))

try:
    integrate(sys, models.CARBON_INITIAL_STATE, 500.0, method="radau")
except IntegrationError as exc:
    print("integration stops:", exc)
