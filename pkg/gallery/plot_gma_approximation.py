"""
Power-law approximation of the original carbon fluxes
======================================================

Each flux V is replaced by alpha * prod x_i^p_i, matched in value and
logarithmic slope at an operating point.
"""

import numpy as np

from acrkit import models, read_params, approximate_flux_model, emit_crn
from acrkit.approx import simulate_flux_model

params = read_params(models.fixture_text("anderies.toml"))
model = models.carbon_preindustrial(params)

# the original model settles where the land pool meets its capacity
traj = simulate_flux_model(model, models.CARBON_INITIAL_STATE, 500.0)
print("original model at t=500:", traj.final)

###############################################################################
# Approximate near that state.  The logistic factor A1 (1 - A1/k) gives the
# order (2 A1 - k)/(A1 - k) in A1, which is -68 at A1 = 0.69 with k = 0.7.

x0 = models.CARBON_OPERATING_POINT
analytic = approximate_flux_model(model, x0, mode="analytic")
numeric = approximate_flux_model(model, x0, mode="finite_difference")
print(analytic.orders)
print("max order difference, analytic vs finite difference:",
      np.max(np.abs(analytic.orders - numeric.orders)))
print("exact:", models.logistic_order("0.69", "0.7"))

###############################################################################
# The approximated system as .crn text, ready for ``acrkit analyze``.

print(emit_crn(analytic.system))
