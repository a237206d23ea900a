"""Structural analysis and absolute concentration robustness for power-law
reaction networks."""

from .acr import (
    AcrCandidatePair,
    AcrReport,
    ReactantMapCheck,
    acr_candidate_pairs,
    log_constraint_residual,
    reactant_map_check,
    shinar_feinberg_acr,
)
from .approx import (
    Flux,
    FluxModel,
    GmaApproximation,
    approximate_flux_model,
    kinetic_orders,
    rate_constant,
)
from .crnfile import emit_crn, parse_crn, parse_flux_model, read_params
from .diagnostics import deficiency_bound_check, stlk_check
from .equilibria import (
    EquilibriumSet,
    Trajectory,
    find_equilibrium,
    integrate,
    is_equilibrium,
    sample_equilibria,
    verify_acr_numerically,
)
from .errors import *  # noqa: F401,F403
from .kinetics import (
    PowerLawKineticSystem,
    attach,
    classify,
    laplacian,
    mass_action,
    species_formation_rate,
    t_matrix,
)
from .network import (
    Complex,
    ReactionNetwork,
    StructuralReport,
    build_network,
    conservation_laws,
    network_from_strings,
    structural_report,
)

__version__ = "0.1.0"
