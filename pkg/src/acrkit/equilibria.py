"""Dynamics of a power-law system: integration and positive equilibria.

All numerics run in log-concentration coordinates ``u = log c``.  This keeps
states strictly positive and makes rates with large or negative kinetic
orders smooth functions of the unknowns.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    BlowUp,
    EmptySet,
    IntegrationError,
    NewtonDiverged,
    NonpositiveConcentration,
    StepSizeUnderflow,
)
from .kinetics import PowerLawKineticSystem, _check_positive, log_rates
from .network import conservation_laws

log = logging.getLogger(__name__)

_SCIPY_METHODS = {
    "rk23": "RK23",
    "rk45": "RK45",
    "dop853": "DOP853",
    "radau": "Radau",
    "bdf": "BDF",
    "lsoda": "LSODA",
}
METHODS = ("rk4",) + tuple(_SCIPY_METHODS)
_IMPLICIT = {"radau", "bdf", "lsoda"}


def conservation_matrix(sys: PowerLawKineticSystem) -> np.ndarray:
    """Float matrix whose rows span the conservation laws (may have 0 rows)."""
    W = np.array(conservation_laws(sys.net), dtype=float)
    return W.reshape(-1, sys.net.m)


# -- vector field in log coordinates ------------------------------------------

def _rates_u(sys, u):
    with np.errstate(over="raise", invalid="raise"):
        try:
            return np.exp(log_rates(sys, u))
        except FloatingPointError as exc:
            raise BlowUp(f"rate overflow at log-state {u.tolist()}") from exc


def _rhs_u(sys, u):
    """du/dt = f(exp u) / exp u."""
    K = _rates_u(sys, u)
    with np.errstate(over="raise", invalid="raise"):
        try:
            return (sys.N @ K) * np.exp(-u)
        except FloatingPointError as exc:
            raise BlowUp(f"vector field overflow at log-state {u.tolist()}") from exc


def _jac_u(sys, u):
    K = _rates_u(sys, u)
    inv_c = np.exp(-u)
    df_du = sys.N @ (K[:, None] * sys.F)
    f = sys.N @ K
    return inv_c[:, None] * df_du - np.diag(f * inv_c)


# -- trajectories -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    species: tuple[str, ...]
    meta: dict = field(default_factory=dict)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def to_csv(self, dest=None) -> str:
        """Write ``t,<species...>`` rows at 17 significant digits.

        ``dest`` may be a path or a text stream; the CSV text is returned
        either way.
        """
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", *self.species])
        for t, row in zip(self.times, self.states):
            w.writerow([format(float(t), ".17g")] + [format(float(x), ".17g") for x in row])
        text = buf.getvalue()
        if isinstance(dest, (str, bytes)) or hasattr(dest, "__fspath__"):
            with open(dest, "w", newline="") as fh:
                fh.write(text)
        elif dest is not None:
            dest.write(text)
        return text


def read_trajectory_csv(text: str) -> Trajectory:
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    if not header or header[0] != "t":
        raise ValueError("trajectory CSV must start with a 't' column")
    data = np.array([[float(x) for x in row] for row in body], dtype=float)
    data = data.reshape(len(body), len(header))
    return Trajectory(data[:, 0], data[:, 1:], tuple(header[1:]))


def _rk4(sys, u0, t_end, h, log_max, max_steps):
    n = max(1, math.ceil(t_end / h - 1e-12))
    if n > max_steps:
        raise IntegrationError(f"rk4 would need {n} steps (max_steps={max_steps})")
    ts = [0.0]
    us = [u0]
    u = u0.copy()
    t = 0.0
    for i in range(n):
        dt = min(h, t_end - t) if i == n - 1 else h
        k1 = _rhs_u(sys, u)
        k2 = _rhs_u(sys, u + 0.5 * dt * k1)
        k3 = _rhs_u(sys, u + 0.5 * dt * k2)
        k4 = _rhs_u(sys, u + dt * k3)
        u = u + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t_end if i == n - 1 else t + dt
        if not np.all(np.isfinite(u)) or u.max() > log_max:
            raise BlowUp(f"state exceeded bound at t={t:.6g}")
        ts.append(t)
        us.append(u)
    return np.array(ts), np.array(us), {"n_steps": n, "nfev": 4 * n}


def integrate(
    sys: PowerLawKineticSystem,
    c0,
    t_end: float,
    method: str = "rk45",
    rtol: float = 1e-8,
    atol: float = 1e-10,
    step: Optional[float] = None,
    max_conc: float = 1e12,
    max_steps: int = 1_000_000,
    stop_residual: Optional[float] = None,
) -> Trajectory:
    """Integrate ``dc/dt = f(c)`` from ``c0`` over ``[0, t_end]``.

    Parameters
    ----------
    method : str
        ``"rk4"`` (fixed step ``step``, default ``t_end/1000``) or one of the
        adaptive schemes ``rk23``, ``rk45``, ``dop853``, ``radau``, ``bdf``,
        ``lsoda``.  The implicit ones receive the analytic Jacobian.
    rtol, atol : float
        Tolerances on the log-state for adaptive schemes.
    max_conc : float
        Any concentration above this raises :class:`BlowUp`.
    stop_residual : float, optional
        Stop early once ``max|f(c)|`` falls to this value.

    Returns one row per accepted step.
    """
    c0 = _check_positive(c0, sys.net.m)
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    u0 = np.log(c0)
    log_max = math.log(max_conc)
    stopped = None

    if method == "rk4":
        if stop_residual is not None:
            raise ValueError("stop_residual requires an adaptive method")
        h = step if step is not None else t_end / 1000.0
        if not h > 0:
            raise ValueError("step must be positive")
        ts, us, stats = _rk4(sys, u0, t_end, h, log_max, max_steps)
    else:
        def blowup(t, u):
            return log_max - np.max(u)

        blowup.terminal = True
        events = [blowup]
        if stop_residual is not None:
            def converged(t, u):
                K = np.exp(log_rates(sys, u))
                return np.max(np.abs(sys.N @ K)) - stop_residual

            converged.terminal = True
            events.append(converged)

        kwargs = {}
        if method in _IMPLICIT:
            kwargs["jac"] = lambda t, u: _jac_u(sys, u)
        try:
            sol = solve_ivp(
                lambda t, u: _rhs_u(sys, u),
                (0.0, float(t_end)),
                u0,
                method=_SCIPY_METHODS[method],
                rtol=rtol,
                atol=atol,
                events=events,
                **kwargs,
            )
        except (FloatingPointError, OverflowError, ValueError) as exc:
            raise BlowUp(str(exc)) from exc
        if sol.status == -1:
            if "step size" in sol.message.lower():
                raise StepSizeUnderflow(f"{sol.message} (t={sol.t[-1]:.6g})")
            raise IntegrationError(sol.message)
        ts, us = sol.t, sol.y.T
        if sol.status == 1:
            if sol.t_events[0].size:
                raise BlowUp(f"concentration exceeded {max_conc:g} at t={sol.t[-1]:.6g}")
            stopped = "residual"
        if len(ts) > max_steps + 1:
            raise IntegrationError(f"more than max_steps={max_steps} steps")
        stats = {"n_steps": len(ts) - 1, "nfev": int(sol.nfev), "njev": int(sol.njev)}

    states = np.exp(us)
    if not np.all(np.isfinite(states)) or np.any(states <= 0):
        raise BlowUp("state left the positive orthant")
    meta = {"method": method, "rtol": rtol, "atol": atol, "stopped": stopped, **stats}
    return Trajectory(np.asarray(ts, dtype=float), states, sys.net.species_names, meta)


# -- equilibria ---------------------------------------------------------------

def _residual_scales(sys, K):
    return np.abs(sys.N) @ K


def is_equilibrium(sys: PowerLawKineticSystem, c, tol: float = 1e-12) -> bool:
    """``max|f(c)|`` small relative to the largest reaction flux.

    Both a global test (against ``max_j K_j * max_i |N_ij|``) and a
    per-species test (against the total flux through that species) must
    pass; the second catches slow species hidden behind very fast ones.
    """
    try:
        c = _check_positive(c, sys.net.m)
    except NonpositiveConcentration:
        return False
    u = np.log(c)
    K = np.exp(log_rates(sys, u))
    if not np.all(np.isfinite(K)):
        return False
    f = sys.N @ K
    scale = float(np.max(K) * np.max(np.abs(sys.N))) if K.size else 0.0
    if np.max(np.abs(f), initial=0.0) > tol * scale and scale > 0:
        return False
    S = _residual_scales(sys, K)
    mask = S > 0
    return bool(np.all(np.abs(f[mask]) <= tol * S[mask]))


def _newton_residual(sys, W, totals, wscale, u):
    K = _rates_u(sys, u)
    f = sys.N @ K
    S = _residual_scales(sys, K)
    safe = np.where(S > 0, S, 1.0)
    rf = np.where(S > 0, f / safe, 0.0)
    c = np.exp(u)
    rw = (W @ c - totals) / wscale
    return np.concatenate([rf, rw]), (K, f, S, safe, c)


def _newton_jacobian(sys, W, wscale, parts):
    K, f, S, safe, c = parts
    KF = K[:, None] * sys.F
    df = sys.N @ KF
    dS = np.abs(sys.N) @ KF
    jf = (df - (f / safe)[:, None] * dS) / safe[:, None]
    jf[S <= 0] = 0.0
    jw = (W * c[None, :]) / wscale[:, None]
    return np.vstack([jf, jw])


def newton_equilibrium(
    sys: PowerLawKineticSystem,
    c_start,
    totals,
    W: Optional[np.ndarray] = None,
    tol: float = 1e-12,
    max_iter: int = 100,
    max_log_step: float = 5.0,
) -> np.ndarray:
    """Damped Gauss-Newton for a positive equilibrium with ``W c = totals``.

    The unknowns are ``u = log c``.  Each species equation is divided by the
    total flux through that species and each conservation row by its
    magnitude, so every residual is dimensionless.  Raises
    :class:`NewtonDiverged` when no point with residual below ``tol`` is
    reached.
    """
    if W is None:
        W = conservation_matrix(sys)
    totals = np.asarray(totals, dtype=float).reshape(-1)
    u = np.log(_check_positive(c_start, sys.net.m))
    wscale = np.abs(W) @ np.exp(u) if W.size else np.zeros(0)
    wscale = np.maximum(np.maximum(wscale, np.abs(totals)), 1e-300)
    # u may move far before exp overflows; bound it by the largest order
    u_limit = 700.0 / max(1.0, float(np.max(np.abs(sys.F), initial=1.0)))

    try:
        r, parts = _newton_residual(sys, W, totals, wscale, u)
    except BlowUp as exc:
        raise NewtonDiverged(str(exc)) from exc
    norm = float(np.linalg.norm(r))
    for _ in range(max_iter):
        if np.max(np.abs(r), initial=0.0) <= 1e-14:
            break
        J = _newton_jacobian(sys, W, wscale, parts)
        du = np.linalg.lstsq(J, -r, rcond=None)[0]
        big = np.max(np.abs(du), initial=0.0)
        if big > max_log_step:
            du *= max_log_step / big
        lam = 1.0
        while lam > 1e-10:
            u_new = u + lam * du
            if np.max(np.abs(u_new)) > u_limit:
                lam *= 0.5
                continue
            try:
                r_new, parts_new = _newton_residual(sys, W, totals, wscale, u_new)
            except BlowUp:
                lam *= 0.5
                continue
            norm_new = float(np.linalg.norm(r_new))
            if norm_new <= (1 - 1e-4 * lam) * norm:
                break
            lam *= 0.5
        else:
            if np.max(np.abs(r)) <= tol:
                break
            raise NewtonDiverged(f"line search failed at residual {np.max(np.abs(r)):.3g}")
        u, r, parts, norm = u_new, r_new, parts_new, norm_new
    if np.max(np.abs(r), initial=0.0) > tol:
        raise NewtonDiverged(f"no convergence; residual {np.max(np.abs(r)):.3g}")
    return np.exp(u)


def project_to_class(W: np.ndarray, c, totals, tol: float = 1e-14, max_iter: int = 200):
    """Positive point ``c * exp(Wᵀλ)`` with ``W x = totals``.

    Minimises the convex function ``sum(c * exp(Wᵀλ)) - λ·totals``; its
    stationarity condition is the class constraint.
    """
    c = np.asarray(c, dtype=float)
    totals = np.asarray(totals, dtype=float)
    if W.size == 0:
        return c.copy()
    lam = np.zeros(W.shape[0])

    def phi(l):
        return float(np.sum(c * np.exp(W.T @ l)) - l @ totals)

    for _ in range(max_iter):
        x = c * np.exp(W.T @ lam)
        g = W @ x - totals
        if np.max(np.abs(g) / np.maximum(np.abs(totals), 1.0)) <= tol:
            return x
        H = (W * x[None, :]) @ W.T
        d = np.linalg.lstsq(H, -g, rcond=None)[0]
        t, p0, g0 = 1.0, phi(lam), np.linalg.norm(g)
        # near the optimum phi cannot resolve the decrease; the gradient can
        while t > 1e-12 and not (
            phi(lam + t * d) <= p0 + 1e-4 * t * (g @ d)
            or np.linalg.norm(W @ (c * np.exp(W.T @ (lam + t * d))) - totals) < 0.5 * g0
        ):
            t *= 0.5
        lam = lam + t * d
    x = c * np.exp(W.T @ lam)
    if np.max(np.abs(W @ x - totals) / np.maximum(np.abs(totals), 1.0)) > 1e-10:
        raise ValueError("could not reach the requested compatibility class")
    return x


def find_equilibrium(
    sys: PowerLawKineticSystem,
    c0,
    t_relax: Optional[float] = None,
    relax_method: str = "radau",
    tol: float = 1e-12,
    class_tol: float = 1e-10,
    max_restarts: int = 4,
    max_iter: int = 100,
    seed: int = 0,
) -> Optional[np.ndarray]:
    """Positive equilibrium in the compatibility class of ``c0``, or ``None``.

    The start is first relaxed along the flow (until ``max|f|`` drops to
    ``1e-6`` of its initial value, or ``t_relax``, default ``1e4``), then
    polished by :func:`newton_equilibrium`.  If relaxation fails (stiff
    blow-up, extinction) Newton starts from ``c0`` itself; further restarts
    use seeded log-normal perturbations of ``c0``.  ``None`` means no
    positive equilibrium was found in that class, which is a legitimate
    outcome.
    """
    c0 = _check_positive(c0, sys.net.m)
    W = conservation_matrix(sys)
    totals = W @ c0
    starts = []
    f0 = np.max(np.abs(sys.N @ np.exp(log_rates(sys, np.log(c0)))), initial=0.0)
    if np.isfinite(f0) and f0 > 0:
        try:
            traj = integrate(
                sys,
                c0,
                t_relax if t_relax is not None else 1e4,
                method=relax_method,
                rtol=1e-6,
                atol=1e-9,
                stop_residual=1e-6 * f0,
            )
            starts.append(traj.final)
        except IntegrationError as exc:
            log.debug("relaxation failed: %s", exc)
    starts.append(c0)
    rng = np.random.default_rng(seed)
    for _ in range(max_restarts):
        starts.append(c0 * np.exp(rng.normal(0.0, 0.5, size=c0.shape)))

    for start in starts:
        try:
            c = newton_equilibrium(sys, start, totals, W, tol=1e-13, max_iter=max_iter)
        except NewtonDiverged as exc:
            log.debug("newton failed from %s: %s", start, exc)
            continue
        gap = np.max(np.abs(W @ c - totals), initial=0.0)
        if is_equilibrium(sys, c, tol) and gap <= class_tol * max(1.0, np.max(np.abs(totals), initial=0.0)):
            return c
    return None


@dataclass(frozen=True, eq=False)
class EquilibriumSet:
    points: np.ndarray
    starts: np.ndarray
    start_indices: tuple[int, ...]
    class_values: np.ndarray
    species: tuple[str, ...]
    n_starts: int

    def __len__(self):
        return len(self.start_indices)

    def column(self, species_index: int) -> np.ndarray:
        return self.points[:, species_index]


def _same_point(a, b, rel):
    return bool(np.all(np.abs(a - b) <= rel * np.maximum(np.abs(a), np.abs(b))))


def sample_equilibria(
    sys: PowerLawKineticSystem,
    n_starts: int,
    seed: int = 0,
    box: tuple[float, float] = (0.1, 2.0),
    totals: Optional[Sequence[float]] = None,
    total_range: Optional[tuple[float, float]] = None,
    merge_rel: float = 1e-7,
    **find_kwargs,
) -> EquilibriumSet:
    """Multi-start search for positive equilibria.

    Starts are log-uniform in ``box`` per species.  With ``totals`` every
    start is moved (multiplicatively) into that compatibility class; with
    ``total_range`` each start gets its own class, every conserved quantity
    drawn log-uniform in the range.  Equal seeds give identical results.
    """
    if n_starts < 1:
        raise ValueError("n_starts must be at least 1")
    W = conservation_matrix(sys)
    m = sys.net.m
    rng = np.random.default_rng(seed)
    lo, hi = np.log(box[0]), np.log(box[1])
    points, starts, idx = [], [], []
    for i in range(n_starts):
        c = np.exp(rng.uniform(lo, hi, size=m))
        if totals is not None:
            c = project_to_class(W, c, totals)
        elif total_range is not None and W.size:
            target = np.exp(
                rng.uniform(np.log(total_range[0]), np.log(total_range[1]), size=W.shape[0])
            )
            c = project_to_class(W, c, target)
        found = find_equilibrium(sys, c, seed=seed * 100003 + i, **find_kwargs)
        if found is None:
            continue
        if any(_same_point(found, p, merge_rel) for p in points):
            continue
        points.append(found)
        starts.append(c)
        idx.append(i)
    pts = np.array(points, dtype=float).reshape(len(points), m)
    return EquilibriumSet(
        points=pts,
        starts=np.array(starts, dtype=float).reshape(len(starts), m),
        start_indices=tuple(idx),
        class_values=pts @ W.T if W.size else np.zeros((len(points), 0)),
        species=sys.net.species_names,
        n_starts=n_starts,
    )


@dataclass(frozen=True)
class NumericAcrCheck:
    species: str
    passed: bool
    spread: float
    count: int
    minimum: float
    maximum: float
    rel_tol: float

    @property
    def low_confidence(self) -> bool:
        return self.count < 2


def verify_acr_numerically(
    sys: PowerLawKineticSystem, species, equilibrium_set: EquilibriumSet, rel_tol: float = 1e-5
) -> NumericAcrCheck:
    """Does the species coordinate agree across all sampled equilibria?

    ``spread = max/min - 1``; passes when below ``rel_tol``.
    """
    if len(equilibrium_set) == 0:
        raise EmptySet("no equilibria to compare")
    i = sys.net.species_index(species)
    vals = equilibrium_set.column(i)
    lo, hi = float(vals.min()), float(vals.max())
    spread = hi / lo - 1.0
    return NumericAcrCheck(
        species=sys.net.species_names[i],
        passed=spread < rel_tol,
        spread=spread,
        count=len(vals),
        minimum=lo,
        maximum=hi,
        rel_tol=rel_tol,
    )
