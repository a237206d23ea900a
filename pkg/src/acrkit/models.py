"""Built-in models: the two-pool toy system and the pre-industrial carbon cycle."""

from __future__ import annotations

from fractions import Fraction
from importlib import resources
from typing import Mapping

import numpy as np

from .approx import Flux, FluxModel
from .errors import MissingParameter, NonpositiveRate
from .kinetics import PowerLawKineticSystem, attach
from .network import network_from_strings

# Kinetic orders of the carbon GMA approximation at the operating point
# (0.69, 0.155, 0.155) with zero off-take.  q1, q2 need the photosynthesis
# and respiration calibration, which is external; they enter as constants.
CARBON_P = -68.0
CARBON_Q1 = 0.580148
CARBON_Q2 = 0.910864

CARBON_PARAM_NAMES = (
    "r_tc", "k", "alpha_offtake", "a_m", "beta",
    "a_f", "b_f", "a_p", "b_p", "c_p", "a_r", "b_r", "c_r", "a_T", "b_T",
)


def toy_model(k1: float = 1.0, k2: float = 2.0) -> FluxModel:
    """Two pools; ``X2 -> X1`` at ``k1 X2^0.8`` and ``X1 -> X2`` at
    ``k2 X1^0.5 X2^0.8`` written as ``X1 + X2 -> 2 X2``."""
    if not (k1 > 0 and k2 > 0):
        raise NonpositiveRate("k1 and k2 must be positive")

    def v1(x):
        return k1 * x[1] ** 0.8

    def g1(x):
        return np.array([0.0, 0.8 * k1 * x[1] ** -0.2])

    def v2(x):
        return k2 * x[0] ** 0.5 * x[1] ** 0.8

    def g2(x):
        return np.array(
            [0.5 * k2 * x[0] ** -0.5 * x[1] ** 0.8, 0.8 * k2 * x[0] ** 0.5 * x[1] ** -0.2]
        )

    return FluxModel(
        pools=("X1", "X2"),
        fluxes=(
            Flux("R1", "X2", "X1", v1, g1),
            Flux("R2", "X1 + X2", "2 X2", v2, g2),
        ),
        params={"k1": float(k1), "k2": float(k2)},
    )


def toy_system(k1: float = 1.0, k2: float = 2.0) -> PowerLawKineticSystem:
    net = network_from_strings(["X2 -> X1", "X1 + X2 -> 2 X2"], species=["X1", "X2"])
    return attach(net, [[0.0, 0.8], [0.5, 0.8]], [k1, k2])


def toy_equilibrium(k1: float, k2: float, total: float) -> np.ndarray:
    """Closed form: ``X1 = (k1/k2)^2``, ``X2 = total - X1``."""
    x1 = (k1 / k2) ** 2
    return np.array([x1, total - x1])


def carbon_network():
    return network_from_strings(
        ["A1 + 2 A2 -> 2 A1 + A2", "A1 + A2 -> 2 A2", "A2 -> A3", "A3 -> A2"],
        species=["A1", "A2", "A3"],
    )


def carbon_gma_system(
    k1: float = 1.0,
    k2: float | None = None,
    a_m: float = 1.0,
    beta: float = 1.0,
    p1: float = CARBON_P,
    p2: float = CARBON_P,
    q1: float = CARBON_Q1,
    q2: float = CARBON_Q2,
) -> PowerLawKineticSystem:
    """The approximated carbon system.

    ``k2`` defaults to ``k1 * 0.15 ** (q1 - q2)``, which puts the
    atmospheric pool at 0.15 in every positive equilibrium when ``p1 == p2``.
    """
    if k2 is None:
        k2 = k1 * 0.15 ** (q1 - q2)
    F = [[p1, q1, 0.0], [p2, q2, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
    return attach(carbon_network(), F, [k1, k2, a_m, a_m * beta])


def carbon_equilibrium(sys: PowerLawKineticSystem, total: float) -> np.ndarray:
    """Closed-form positive equilibrium of :func:`carbon_gma_system` (p1 == p2)."""
    k1, k2, a_m, a_m_beta = sys.k
    q1, q2 = sys.F[0, 1], sys.F[1, 1]
    beta = a_m_beta / a_m
    a2 = (k2 / k1) ** (1.0 / (q1 - q2))
    return np.array([total - (1 + 1 / beta) * a2, a2, a2 / beta])


def carbon_preindustrial(params: Mapping[str, float]) -> FluxModel:
    """Three-pool carbon model (land A1, atmosphere A2, ocean A3).

    Fluxes::

        A1 + 2 A2 -> 2 A1 + A2   r_tc * P(A2) * A1 * (1 - A1/k)
        A1 + A2   -> 2 A2        r_tc * R(A2) * A1 * (1 - A1/k) + alpha_offtake * A1
        A2 -> A3                 a_m * A2
        A3 -> A2                 a_m * beta * A3

    with temperature ``T = a_T A2 + b_T``,
    ``P = a_f A2^b_f * a_p T^b_p exp(-c_p T)`` and
    ``R = a_r T^b_r exp(-c_r T)``.  All partial derivatives are analytic.
    """
    missing = [name for name in CARBON_PARAM_NAMES if name not in params]
    if missing:
        raise MissingParameter(f"missing carbon model parameters: {', '.join(missing)}")
    p = {name: float(params[name]) for name in CARBON_PARAM_NAMES}
    r_tc, k, alpha = p["r_tc"], p["k"], p["alpha_offtake"]

    def temp(a2):
        return p["a_T"] * a2 + p["b_T"]

    def photo(a2):
        T = temp(a2)
        return p["a_f"] * a2 ** p["b_f"] * p["a_p"] * T ** p["b_p"] * np.exp(-p["c_p"] * T)

    def dlog_photo(a2):
        T = temp(a2)
        return p["b_f"] / a2 + p["a_T"] * (p["b_p"] / T - p["c_p"])

    def resp(a2):
        T = temp(a2)
        return p["a_r"] * T ** p["b_r"] * np.exp(-p["c_r"] * T)

    def dlog_resp(a2):
        T = temp(a2)
        return p["a_T"] * (p["b_r"] / T - p["c_r"])

    def logistic(a1):
        return a1 * (1.0 - a1 / k)

    def dlogistic(a1):
        return 1.0 - 2.0 * a1 / k

    def v1(x):
        return r_tc * photo(x[1]) * logistic(x[0])

    def g1(x):
        P, L = photo(x[1]), logistic(x[0])
        return np.array([r_tc * P * dlogistic(x[0]), r_tc * P * dlog_photo(x[1]) * L, 0.0])

    def v2(x):
        return r_tc * resp(x[1]) * logistic(x[0]) + alpha * x[0]

    def g2(x):
        R, L = resp(x[1]), logistic(x[0])
        return np.array(
            [r_tc * R * dlogistic(x[0]) + alpha, r_tc * R * dlog_resp(x[1]) * L, 0.0]
        )

    def v3(x):
        return p["a_m"] * x[1]

    def g3(x):
        return np.array([0.0, p["a_m"], 0.0])

    def v4(x):
        return p["a_m"] * p["beta"] * x[2]

    def g4(x):
        return np.array([0.0, 0.0, p["a_m"] * p["beta"]])

    return FluxModel(
        pools=("A1", "A2", "A3"),
        fluxes=(
            Flux("K1", "A1 + 2 A2", "2 A1 + A2", v1, g1),
            Flux("K2", "A1 + A2", "2 A2", v2, g2),
            Flux("K3", "A2", "A3", v3, g3),
            Flux("K4", "A3", "A2", v4, g4),
        ),
        params=p,
    )


def logistic_order(a1, k):
    """Kinetic order of ``A1 (1 - A1/k)`` in ``A1``: ``(2 A1 - k) / (A1 - k)``.

    Exact when given :class:`fractions.Fraction` (or decimal strings, which
    are converted to fractions).
    """
    if isinstance(a1, str) or isinstance(k, str):
        a1, k = Fraction(a1), Fraction(k)
    return (2 * a1 - k) / (a1 - k)


CARBON_INITIAL_STATE = np.array([2850.0, 750.0, 900.0]) / 4500.0
CARBON_OPERATING_POINT = np.array([0.69, 0.155, 0.155])


def fixture_path(name: str):
    """Path-like handle for a packaged fixture (``toy.crn``, ``carbon.crn``,
    ``anderies.toml``)."""
    return resources.files("acrkit") / "data" / name


def fixture_text(name: str) -> str:
    return fixture_path(name).read_text()
