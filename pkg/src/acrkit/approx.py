"""Power-law (GMA) approximation of flux models.

Each flux rate ``V`` is replaced by ``alpha * prod x_i ** p_i`` matching
``V`` and its logarithmic derivatives at an operating point ``x0``::

    p_i   = dV/dx_i * x0_i / V(x0)
    alpha = V(x0) * prod x0_i ** -p_i

One reaction per flux gives the total CRN representation of the GMA system.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .errors import NonpositivePoint, ZeroRateAtOperatingPoint
from .kinetics import KineticsClassification, PowerLawKineticSystem, attach, classify
from .network import Complex, build_network, parse_complex

RateFunction = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class Flux:
    """One mass transfer: ``reactant -> product`` at rate ``rate(x)``.

    ``reactant`` and ``product`` are complex strings over the pools
    (e.g. ``"A1 + 2 A2"``).  ``gradient(x)``, when given, returns
    ``dV/dx`` and enables the analytic path.
    """

    label: str
    reactant: str
    product: str
    rate: RateFunction
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None


@dataclass(frozen=True)
class FluxModel:
    pools: tuple[str, ...]
    fluxes: tuple[Flux, ...]
    params: Mapping[str, float] = field(default_factory=dict)

    def species_formation_rate(self, x) -> np.ndarray:
        """Right-hand side of the original (non-approximated) ODE."""
        x = _positive_point(x, len(self.pools))
        out = np.zeros(len(self.pools))
        for fl in self.fluxes:
            v = fl.rate(x)
            out += v * (_vec(fl.product, self.pools) - _vec(fl.reactant, self.pools))
        return out


def simulate_flux_model(
    model: FluxModel, x0, t_end: float, method: str = "Radau", rtol: float = 1e-9,
    atol: float = 1e-12,
):
    """Integrate the original flux ODE (no approximation) with scipy.

    Returns an :class:`~acrkit.equilibria.Trajectory`.  Raises
    :class:`IntegrationError` when the solver fails.
    """
    from scipy.integrate import solve_ivp

    from .equilibria import Trajectory
    from .errors import IntegrationError

    x0 = _positive_point(x0, len(model.pools))
    S = np.array([_vec(f.product, model.pools) - _vec(f.reactant, model.pools)
                  for f in model.fluxes]).T

    def rhs(t, x):
        return S @ np.array([f.rate(x) for f in model.fluxes])

    sol = solve_ivp(rhs, (0.0, float(t_end)), x0, method=method, rtol=rtol, atol=atol)
    if sol.status == -1:
        raise IntegrationError(sol.message)
    return Trajectory(sol.t, sol.y.T, model.pools, {"method": method, "nfev": int(sol.nfev)})


def _vec(text: str, pools: Sequence[str]) -> np.ndarray:
    return parse_complex(text, pools).vector(len(pools)).astype(float)


def _positive_point(x0, m: Optional[int] = None) -> np.ndarray:
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if m is not None and x0.shape != (m,):
        raise NonpositivePoint(f"operating point must have length {m}")
    if not np.all(np.isfinite(x0)) or np.any(x0 <= 0):
        raise NonpositivePoint(f"operating point must be strictly positive, got {x0.tolist()}")
    return x0


def _rate_at(V: RateFunction, x0: np.ndarray) -> float:
    v = float(V(x0))
    if not np.isfinite(v) or v <= 0:
        raise ZeroRateAtOperatingPoint(f"rate is {v!r} at the operating point")
    return v


def kinetic_orders(
    V: RateFunction,
    x0,
    mode: str = "finite_difference",
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    h_rel: float = 1e-6,
) -> np.ndarray:
    """Logarithmic derivatives ``dV/dx_i * x_i / V`` at ``x0``.

    ``mode="finite_difference"`` uses central differences with step
    ``h_rel * x0_i``; ``mode="analytic"`` requires ``gradient``.
    """
    x0 = _positive_point(x0)
    v0 = _rate_at(V, x0)
    if mode == "analytic":
        if gradient is None:
            raise ValueError("analytic mode needs a gradient function")
        grad = np.asarray(gradient(x0), dtype=float).reshape(-1)
    elif mode == "finite_difference":
        grad = np.empty_like(x0)
        for i in range(x0.size):
            h = h_rel * x0[i]
            up, dn = x0.copy(), x0.copy()
            up[i] += h
            dn[i] -= h
            grad[i] = (float(V(up)) - float(V(dn))) / (up[i] - dn[i])
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return grad * x0 / v0


def rate_constant(V: RateFunction, x0, p) -> float:
    """``alpha = V(x0) * prod x0 ** -p``, so that ``alpha * x0 ** p == V(x0)``."""
    x0 = _positive_point(x0)
    v0 = _rate_at(V, x0)
    p = np.asarray(p, dtype=float).reshape(-1)
    return float(np.exp(np.log(v0) - p @ np.log(x0)))


@dataclass(frozen=True, eq=False)
class GmaApproximation:
    orders: np.ndarray  # r x m
    constants: np.ndarray  # length r
    operating_point: np.ndarray
    system: PowerLawKineticSystem
    classification: KineticsClassification

    def power_law(self, j: int, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(self.constants[j] * np.prod(x ** self.orders[j]))


def approximate_flux_model(
    model: FluxModel, x0, mode: str = "auto", h_rel: float = 1e-6
) -> GmaApproximation:
    """Approximate every flux at ``x0`` and assemble the PL system.

    ``mode="auto"`` uses a flux's analytic gradient when it has one and
    finite differences otherwise.  Emits a ``UserWarning`` if the result is
    not reactant-determined.
    """
    pools = model.pools
    x0 = _positive_point(x0, len(pools))
    complexes: list[Complex] = []
    arcs = []

    def intern(c: Complex) -> int:
        if c not in complexes:
            complexes.append(c)
        return complexes.index(c)

    orders, consts = [], []
    for fl in model.fluxes:
        a = intern(parse_complex(fl.reactant, pools))
        b = intern(parse_complex(fl.product, pools))
        arcs.append((a, b, fl.label))
        flux_mode = mode
        if mode == "auto":
            flux_mode = "analytic" if fl.gradient is not None else "finite_difference"
        p = kinetic_orders(fl.rate, x0, flux_mode, gradient=fl.gradient, h_rel=h_rel)
        orders.append(p)
        consts.append(rate_constant(fl.rate, x0, p))
    net = build_network(pools, complexes, arcs)
    F = np.array(orders).reshape(net.r, net.m)
    sys = attach(net, F, consts)
    cls = classify(sys)
    if not cls.is_pl_rdk:
        warnings.warn("approximated system is not PL-RDK", UserWarning, stacklevel=2)
    return GmaApproximation(F, np.asarray(consts), x0, sys, cls)
