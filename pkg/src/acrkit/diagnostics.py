"""Numerical checks of the Laplacian kernel structure.

These are oracles for the structural theory, not production paths: they
use SVD null spaces with relative singular-value cutoffs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

from .kinetics import laplacian, numeric_rank
from .network import ReactionNetwork, matrices, structural_report


@dataclass(frozen=True)
class KernelSupportCheck:
    passed: bool
    nullity: int
    t: int
    supports: tuple[tuple[int, ...], ...]
    max_off_support: float  # relative to the basis vector norm
    min_on_support: float
    detail: str = ""


def stlk_check(
    net: ReactionNetwork, kappa, rcond: float = 1e-10, support_tol: float = 1e-8
) -> KernelSupportCheck:
    """Kernel of the Laplacian has one basis vector per terminal class.

    After computing an SVD null space ``Z`` of ``A_kappa`` the basis is
    re-combined per terminal class ``C``: the combination of the columns of
    ``Z`` that is smallest outside ``C`` must vanish there (below
    ``support_tol`` relative), be nonzero and single-signed on all of
    ``C``, and be unique.
    """
    terminal = structural_report(net).terminal_slcs
    A = laplacian(net, kappa)
    Z = null_space(A, rcond=rcond)
    nullity = Z.shape[1]
    t = len(terminal)
    if nullity != t:
        return KernelSupportCheck(False, nullity, t, (), np.inf, 0.0, "nullity differs from t")

    supports, worst_off, worst_on, problems = [], 0.0, np.inf, []
    for cls in terminal:
        outside = [i for i in range(net.n) if i not in cls]
        if outside:
            sv_full = np.linalg.svd(Z[outside], full_matrices=True)
            _, sv, vt = sv_full
            padded = np.concatenate([sv, np.zeros(t - sv.size)]) if sv.size < t else sv
            a = vt[-1]
            if t > 1 and padded[-2] <= support_tol:
                problems.append(f"class {cls}: kernel vector on the class is not unique")
        else:
            a = np.ones(t)
        b = Z @ a
        b = b / np.linalg.norm(b)
        if b[list(cls)].sum() < 0:
            b = -b
        off = float(np.max(np.abs(b[outside]), initial=0.0))
        on = b[list(cls)]
        worst_off = max(worst_off, off)
        worst_on = min(worst_on, float(np.min(on)))
        support = tuple(i for i in range(net.n) if abs(b[i]) > support_tol)
        supports.append(support)
        if support != tuple(cls) or np.min(on) <= support_tol:
            problems.append(f"class {cls}: support {support}")
    return KernelSupportCheck(
        passed=not problems,
        nullity=nullity,
        t=t,
        supports=tuple(supports),
        max_off_support=worst_off,
        min_on_support=worst_on,
        detail="; ".join(problems),
    )


@dataclass(frozen=True)
class DeficiencyBoundCheck:
    passed: bool
    nullity: int
    bound: int


def deficiency_bound_check(net: ReactionNetwork, kappa, rtol: float = 1e-9) -> DeficiencyBoundCheck:
    """``dim ker(Y A_kappa) <= deficiency + t``."""
    rep = structural_report(net)
    Y = matrices(net)[0].astype(float)
    M = Y @ laplacian(net, kappa)
    nullity = net.n - numeric_rank(M, rtol)
    bound = rep.delta + rep.t
    return DeficiencyBoundCheck(nullity <= bound, nullity, bound)
