"""Power-law kinetics on a reaction network.

Rates are ``K_j(c) = k_j * prod_i c_i ** F[j, i]`` with a real kinetic-order
matrix ``F`` (r x m).  Evaluation is done in log space, which is exact for
positive concentrations and avoids overflow-prone intermediate powers when
orders are large in magnitude (the carbon model has orders of -68).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    NonpositiveConcentration,
    NonpositiveKappa,
    NonpositiveRate,
    NotPlRdk,
)
from .network import ReactionNetwork, matrices

DEFAULT_TOL_KO = 1e-9


@dataclass(frozen=True, eq=False)
class PowerLawKineticSystem:
    net: ReactionNetwork
    F: np.ndarray
    k: np.ndarray

    @cached_property
    def N(self) -> np.ndarray:
        return matrices(self.net)[2].astype(float)

    @cached_property
    def log_k(self) -> np.ndarray:
        return np.log(self.k)

    def __eq__(self, other):
        if not isinstance(other, PowerLawKineticSystem):
            return NotImplemented
        return (
            self.net == other.net
            and np.array_equal(self.F, other.F)
            and np.array_equal(self.k, other.k)
        )

    __hash__ = None

    def with_rates(self, k) -> "PowerLawKineticSystem":
        return attach(self.net, self.F, k)


def attach(net: ReactionNetwork, F, k) -> PowerLawKineticSystem:
    """Attach power-law kinetics ``(F, k)`` to ``net``."""
    F = np.array(F, dtype=float)
    k = np.array(k, dtype=float).reshape(-1)
    if F.ndim != 2 or F.shape != (net.r, net.m):
        raise DimensionMismatch(f"F must be {net.r}x{net.m}, got {F.shape}")
    if k.shape != (net.r,):
        raise DimensionMismatch(f"k must have length {net.r}, got {k.shape[0]}")
    if not np.all(np.isfinite(F)):
        raise DimensionMismatch("F contains non-finite entries")
    if not np.all(np.isfinite(k)) or np.any(k <= 0):
        raise NonpositiveRate(f"rate constants must be positive, got {k.tolist()}")
    F.setflags(write=False)
    k.setflags(write=False)
    return PowerLawKineticSystem(net, F, k)


def mass_action(net: ReactionNetwork, k) -> PowerLawKineticSystem:
    """Mass-action kinetics: row j of F is the reactant complex of R_j."""
    F = np.array(
        [net.complexes[rx.reactant].vector(net.m) for rx in net.reactions], dtype=float
    ).reshape(net.r, net.m)
    return attach(net, F, k)


@dataclass(frozen=True)
class KineticsClassification:
    is_mass_action: bool
    is_pl_rdk: bool
    is_pl_rlk: bool
    # reactions (j1, j2) sharing a reactant complex with different orders
    rdk_violation: Optional[tuple[int, int]] = None


def _rdk_violation(sys: PowerLawKineticSystem, tol_ko: float):
    first: dict[int, int] = {}
    for j, rx in enumerate(sys.net.reactions):
        j0 = first.setdefault(rx.reactant, j)
        if j0 != j and np.max(np.abs(sys.F[j] - sys.F[j0])) > tol_ko:
            return (j0, j)
    return None


def is_pl_rdk(sys: PowerLawKineticSystem, tol_ko: float = DEFAULT_TOL_KO) -> bool:
    return _rdk_violation(sys, tol_ko) is None


def _t_entries(sys: PowerLawKineticSystem) -> np.ndarray:
    first: dict[int, int] = {}
    for j, rx in enumerate(sys.net.reactions):
        first.setdefault(rx.reactant, j)
    cols = [sys.F[first[y]] for y in sys.net.reactant_complexes]
    return np.array(cols, dtype=float).reshape(len(cols), sys.net.m).T


def numeric_rank(a: np.ndarray, rtol: float) -> int:
    """Rank from singular values above ``rtol * largest``."""
    if a.size == 0:
        return 0
    sv = np.linalg.svd(a, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > rtol * sv[0]))


def classify(
    sys: PowerLawKineticSystem, tol_ko: float = DEFAULT_TOL_KO
) -> KineticsClassification:
    violation = _rdk_violation(sys, tol_ko)
    rdk = violation is None
    mak = all(
        np.max(np.abs(sys.F[j] - sys.net.complexes[rx.reactant].vector(sys.net.m).astype(float)),
               initial=0.0) <= tol_ko
        for j, rx in enumerate(sys.net.reactions)
    )
    rlk = False
    if rdk:
        T = _t_entries(sys)
        rlk = numeric_rank(T, 1e-9) == T.shape[1]
    return KineticsClassification(
        is_mass_action=mak, is_pl_rdk=rdk, is_pl_rlk=rlk, rdk_violation=violation
    )


@dataclass(frozen=True, eq=False)
class TMatrix:
    """Kinetic-order columns indexed by reactant complex (m x n_r)."""

    entries: np.ndarray
    reactant_complexes: tuple[int, ...]

    @property
    def reactant_index(self) -> dict[int, int]:
        return {y: i for i, y in enumerate(self.reactant_complexes)}

    def column(self, y: int) -> np.ndarray:
        return self.entries[:, self.reactant_index[y]]

    def y_tilde(self, n: int) -> np.ndarray:
        """m x n matrix: T columns at reactant complexes, zeros elsewhere."""
        out = np.zeros((self.entries.shape[0], n))
        out[:, list(self.reactant_complexes)] = self.entries
        return out


def t_matrix(sys: PowerLawKineticSystem, tol_ko: float = DEFAULT_TOL_KO) -> TMatrix:
    violation = _rdk_violation(sys, tol_ko)
    if violation is not None:
        a, b = violation
        raise NotPlRdk(
            f"reactions {sys.net.reaction_label(a)} and {sys.net.reaction_label(b)} share "
            "a reactant complex but have different kinetic orders"
        )
    entries = _t_entries(sys)
    entries.setflags(write=False)
    return TMatrix(entries, sys.net.reactant_complexes)


# -- evaluation ---------------------------------------------------------------

def _check_positive(c, m: int) -> np.ndarray:
    c = np.asarray(c, dtype=float).reshape(-1)
    if c.shape != (m,):
        raise DimensionMismatch(f"concentration vector must have length {m}")
    if not np.all(c > 0) or not np.all(np.isfinite(c)):
        raise NonpositiveConcentration(f"concentrations must be positive, got {c.tolist()}")
    return c


def log_rates(sys: PowerLawKineticSystem, u: np.ndarray) -> np.ndarray:
    """``log K(exp u)``; no positivity check (``u`` is already a log)."""
    return sys.log_k + sys.F @ u


def rates(sys: PowerLawKineticSystem, c) -> np.ndarray:
    c = _check_positive(c, sys.net.m)
    return np.exp(log_rates(sys, np.log(c)))


def species_formation_rate(sys: PowerLawKineticSystem, c) -> np.ndarray:
    """``f(c) = N K(c)``."""
    return sys.N @ rates(sys, c)


def log_jacobian(sys: PowerLawKineticSystem, u: np.ndarray) -> np.ndarray:
    """d f / d u at ``c = exp(u)``: ``N diag(K) F``."""
    K = np.exp(log_rates(sys, u))
    return sys.N @ (K[:, None] * sys.F)


def laplacian(net: ReactionNetwork, kappa) -> np.ndarray:
    """Matrix of ``x -> sum kappa_j x_y (e_y' - e_y)`` in the complex basis."""
    kappa = np.asarray(kappa, dtype=float).reshape(-1)
    if kappa.shape != (net.r,):
        raise DimensionMismatch(f"kappa must have length {net.r}")
    if np.any(kappa <= 0) or not np.all(np.isfinite(kappa)):
        raise NonpositiveKappa(f"kappa must be positive, got {kappa.tolist()}")
    A = np.zeros((net.n, net.n))
    for kap, rx in zip(kappa, net.reactions):
        A[rx.product, rx.reactant] += kap
        A[rx.reactant, rx.reactant] -= kap
    return A


def kappa_from_equilibrium(sys: PowerLawKineticSystem, c_star) -> np.ndarray:
    """Per-reaction ``k_j * (c*) ** F_j``, i.e. the rates at ``c*``."""
    return rates(sys, c_star)


def orders_as_dicts(sys: PowerLawKineticSystem) -> list[dict[str, float]]:
    names = sys.net.species_names
    return [
        {names[i]: float(v) for i, v in enumerate(row) if v != 0} for row in sys.F
    ]


def species_vector(values: Sequence[float], net: ReactionNetwork) -> np.ndarray:
    return _check_positive(values, net.m)
