"""Absolute concentration robustness for PL-RDK systems.

The structural test: in a deficiency-one network whose power-law system is
reactant-determined and has a positive equilibrium, two nonterminal
complexes whose kinetic-order columns differ in a single species force that
species to take the same value at every positive equilibrium.  The test is
sufficient only; failing it says nothing about the absence of ACR.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .equilibria import (
    EquilibriumSet,
    NumericAcrCheck,
    sample_equilibria,
    verify_acr_numerically,
)
from .errors import NotPlRdk
from .kinetics import (
    DEFAULT_TOL_KO,
    PowerLawKineticSystem,
    _check_positive,
    classify,
    numeric_rank,
    t_matrix,
)
from .network import StructuralReport, reactant_matrix, structural_report


@dataclass(frozen=True)
class AcrCandidatePair:
    y: int
    y_prime: int
    species: int
    delta_order: float  # T[species, y] - T[species, y_prime]


def acr_candidate_pairs(
    sys: PowerLawKineticSystem,
    tol_ko: float = DEFAULT_TOL_KO,
    report: Optional[StructuralReport] = None,
) -> list[AcrCandidatePair]:
    """Nonterminal complex pairs whose T columns differ in exactly one species.

    Each unordered pair appears once.  It is oriented so that ``y`` has the
    larger stoichiometric coefficient in the differing species (ties go to
    the lower complex index).
    """
    T = t_matrix(sys, tol_ko)
    report = report or structural_report(sys.net)
    col = T.reactant_index
    # nonterminal complexes always have an outgoing arc, hence a T column
    nonterminal = [y for y in report.nonterminal_complexes if y in col]
    out = []
    for a, b in itertools.combinations(nonterminal, 2):
        diff = T.entries[:, col[a]] - T.entries[:, col[b]]
        differing = np.flatnonzero(np.abs(diff) > tol_ko)
        if differing.size != 1:
            continue
        i = int(differing[0])
        ca = sys.net.complexes[a].as_dict().get(i, 0)
        cb = sys.net.complexes[b].as_dict().get(i, 0)
        y, yp = (b, a) if cb > ca else (a, b)
        delta = float(T.column(y)[i] - T.column(yp)[i])
        out.append(AcrCandidatePair(y, yp, i, delta))
    return out


@dataclass(frozen=True)
class AcrReport:
    """Outcome of the deficiency-one ACR test.

    ``verdict`` is one of ``"acr"``, ``"inapplicable"`` (deficiency is not
    one, or no candidate pair) and ``"hypothesis_failed"`` (no positive
    equilibrium found in verify mode).  Only ``"acr"`` carries species.
    """

    verdict: str
    deficiency: int
    deficiency_ok: bool
    equilibrium_status: str  # assumed | verified | not_found
    candidates: tuple[AcrCandidatePair, ...]
    acr_species: tuple[str, ...]
    detail: str = ""
    equilibrium: Optional[np.ndarray] = field(default=None, compare=False)
    equilibria: Optional[EquilibriumSet] = field(default=None, compare=False)
    numeric_confirmation: tuple[NumericAcrCheck, ...] = ()


def shinar_feinberg_acr(
    sys: PowerLawKineticSystem,
    mode: str = "assume",
    tol_ko: float = DEFAULT_TOL_KO,
    n_starts: int = 20,
    seed: int = 0,
    rel_tol: float = 1e-5,
    **sample_kwargs,
) -> AcrReport:
    """Apply the deficiency-one ACR criterion to a PL-RDK system.

    ``mode="assume"`` takes the existence of a positive equilibrium on
    trust.  ``mode="verify"`` searches for equilibria with
    :func:`sample_equilibria` (``n_starts``, ``seed`` and any extra keyword
    arguments are forwarded) and, when found, checks each reported species
    numerically at ``rel_tol``.
    """
    if mode not in ("assume", "verify"):
        raise ValueError("mode must be 'assume' or 'verify'")
    cls = classify(sys, tol_ko)
    if not cls.is_pl_rdk:
        a, b = cls.rdk_violation
        raise NotPlRdk(
            f"reactions {sys.net.reaction_label(a)} and {sys.net.reaction_label(b)} "
            "share a reactant complex but have different kinetic orders"
        )
    rep = structural_report(sys.net)
    candidates = tuple(acr_candidate_pairs(sys, tol_ko, rep))
    deficiency_ok = rep.delta == 1
    names = sys.net.species_names

    status, c_star, eq_set = "assumed", None, None
    if mode == "verify":
        eq_set = sample_equilibria(sys, n_starts, seed=seed, **sample_kwargs)
        if len(eq_set):
            status, c_star = "verified", eq_set.points[0]
        else:
            status = "not_found"

    species_idx = sorted({p.species for p in candidates})
    if not deficiency_ok:
        verdict, detail, species_idx = "inapplicable", f"deficiency is {rep.delta}, not 1", []
    elif not candidates:
        verdict, detail = "inapplicable", "no nonterminal pair differs in exactly one species"
    elif status == "not_found":
        verdict, detail, species_idx = (
            "hypothesis_failed",
            f"no positive equilibrium found from {n_starts} starts",
            [],
        )
    else:
        verdict, detail = "acr", ""

    checks = ()
    if verdict == "acr" and eq_set is not None:
        checks = tuple(verify_acr_numerically(sys, i, eq_set, rel_tol) for i in species_idx)
    return AcrReport(
        verdict=verdict,
        deficiency=rep.delta,
        deficiency_ok=deficiency_ok,
        equilibrium_status=status,
        candidates=candidates,
        acr_species=tuple(names[i] for i in species_idx),
        detail=detail,
        equilibrium=c_star,
        equilibria=eq_set,
        numeric_confirmation=checks,
    )


def log_constraint_residual(sys: PowerLawKineticSystem, c1, c2, pair) -> float:
    """``(T[:, y] - T[:, y']) . (log c2 - log c1)``.

    Zero (to rounding) whenever ``c1`` and ``c2`` are both positive
    equilibria of a deficiency-one PL-RDK system and ``y, y'`` are
    nonterminal.  ``pair`` is an :class:`AcrCandidatePair` or ``(y, y')``.
    """
    m = sys.net.m
    c1 = _check_positive(c1, m)
    c2 = _check_positive(c2, m)
    y, yp = (pair.y, pair.y_prime) if isinstance(pair, AcrCandidatePair) else pair
    T = t_matrix(sys)
    return float((T.column(y) - T.column(yp)) @ (np.log(c2) - np.log(c1)))


@dataclass(frozen=True)
class ReactantMapCheck:
    """Outcome of the zero-reactant-deficiency sufficient condition."""

    applicable: bool
    reason: str
    delta_rho: int
    y_hat: Optional[np.ndarray] = field(default=None, compare=False)
    is_diagonal: bool = False
    pair: Optional[tuple[int, int]] = None
    species: Optional[str] = None
    is_pl_rlk: bool = False

    @property
    def confirmed(self) -> bool:
        return self.applicable and self.is_diagonal and self.pair is not None


def reactant_map_check(sys: PowerLawKineticSystem, tol: float = 1e-9) -> ReactantMapCheck:
    """Sufficient condition via the map ``T @ inv(Y_res)``.

    Applicable only when the network has deficiency one, reactant
    deficiency zero and a square invertible reactant matrix.  It then
    succeeds when ``T @ inv(Y_res)`` is diagonal with nonzero diagonal
    (within ``tol``) and two nonterminal complexes differ, as complexes, in
    a single species; the system is then PL-RLK with ACR in that species.
    """
    rep = structural_report(sys.net)
    if rep.delta != 1:
        return ReactantMapCheck(False, f"deficiency is {rep.delta}, not 1", rep.delta_rho)
    if rep.delta_rho != 0:
        return ReactantMapCheck(False, f"reactant deficiency is {rep.delta_rho}", rep.delta_rho)
    if not (rep.m == rep.n_r == rep.q):
        return ReactantMapCheck(
            False,
            f"reactant matrix is {rep.m}x{rep.n_r} with rank {rep.q}; only the square "
            "invertible case is handled",
            rep.delta_rho,
        )
    T = t_matrix(sys)
    Yres = reactant_matrix(sys.net).astype(float)
    y_hat = T.entries @ np.linalg.inv(Yres)
    off = y_hat - np.diag(np.diag(y_hat))
    diagonal = bool(np.max(np.abs(off)) <= tol and np.min(np.abs(np.diag(y_hat))) > tol)

    pair, species = None, None
    for a, b in itertools.combinations(rep.nonterminal_complexes, 2):
        da = sys.net.complexes[a].as_dict()
        db = sys.net.complexes[b].as_dict()
        differ = [i for i in range(rep.m) if da.get(i, 0) != db.get(i, 0)]
        if len(differ) == 1:
            pair, species = (a, b), sys.net.species_names[differ[0]]
            break
    reason = ""
    if not diagonal:
        reason = "T @ inv(Y_res) is not diagonal with nonzero diagonal"
    elif pair is None:
        reason = "no two nonterminal complexes differ in a single species"
    return ReactantMapCheck(
        applicable=True,
        reason=reason,
        delta_rho=rep.delta_rho,
        y_hat=y_hat,
        is_diagonal=diagonal,
        pair=pair,
        species=species if diagonal and pair else None,
        is_pl_rlk=numeric_rank(T.entries, 1e-9) == T.entries.shape[1],
    )


# name used by earlier callers
proposition3_check = reactant_map_check
