"""Acceptance criteria, one test each.

Run with ``pytest tests/test_acceptance.py -v`` (a PASS/FAIL line per
criterion is printed in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""

import io
import itertools
import json
import sys

import numpy as np
import pytest

from acrkit import cli, models
from acrkit.acr import log_constraint_residual
from acrkit.approx import approximate_flux_model, kinetic_orders, rate_constant
from acrkit.crnfile import emit_crn, parse_crn, read_params
from acrkit.diagnostics import deficiency_bound_check, stlk_check
from acrkit.equilibria import find_equilibrium, integrate, sample_equilibria
from acrkit.kinetics import t_matrix
from acrkit.network import structural_report
from acrkit.random_networks import random_network, random_system

RESULTS = {}


def run_cli(*argv):
    out = io.StringIO()
    code = cli.main([str(a) for a in argv], out=out)
    return code, out.getvalue()


def fixture(name):
    return parse_crn(models.fixture_text(name))[1]


def ensemble(count=100, seed=8):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        net = random_network(rng)
        yield net, 1.0 - rng.uniform(size=net.r)


def c01_toy_structure():
    code, text = run_cli("analyze", models.fixture_path("toy.crn"), "--json")
    assert code == 0
    s = json.loads(text)["structure"]
    got = (s["n"], s["linkage_classes"], s["s"], s["deficiency"], s["terminal_classes"])
    assert got == (4, 2, 1, 1, 2), got
    assert set(s["nonterminal"]) == {"X2", "X1+X2"}, s["nonterminal"]


def c02_toy_acr():
    code, text = run_cli("acr", models.fixture_path("toy.crn"), "--verify", "--starts", 20,
                         "--seed", 1, "--total-range", "0.5,5", "--json")
    assert code == 0
    a = json.loads(text)["acr"]
    assert a["verdict"] == "acr" and a["acr_species"] == ["X1"], a["verdict"]
    pts = np.array(a["equilibria"])
    assert len(pts) >= 2
    assert np.max(np.abs(pts[:, 0] - 0.25) / 0.25) < 1e-6
    spread = pts[:, 1].max() / pts[:, 1].min() - 1
    assert spread > 0.1, spread


def c03_closed_form():
    rng = np.random.default_rng(3)
    for _ in range(10):
        k1, k2 = np.exp(rng.uniform(np.log(0.2), np.log(5.0), size=2))
        x1 = (k1 / k2) ** 2
        total = x1 * (1 + np.exp(rng.uniform(np.log(0.05), np.log(20.0))))
        sys_ = models.toy_system(k1, k2)
        frac = rng.uniform(0.1, 0.9)
        c0 = np.array([frac * total, (1 - frac) * total])
        c = find_equilibrium(sys_, c0)
        assert c is not None, (k1, k2, total)
        np.testing.assert_allclose(c, [x1, total - x1], rtol=1e-9)


def c04_carbon_structure():
    code, text = run_cli("analyze", models.fixture_path("carbon.crn"), "--json")
    assert code == 0
    data = json.loads(text)
    s = data["structure"]
    got = (s["n"], s["linkage_classes"], s["s"], s["deficiency"])
    assert got == (6, 3, 2, 1), got
    T = data["kinetics"]["t_matrix"]
    assert T["columns"] == ["A1+2A2", "A1+A2", "A2", "A3"]
    p, q1, q2 = -68.0, 0.580148, 0.910864
    assert T["rows"] == {"A1": [p, p, 0, 0], "A2": [q1, q2, 1, 0], "A3": [0, 0, 0, 1]}


def c05_carbon_acr():
    carbon = fixture("carbon.crn")
    s = sample_equilibria(carbon, 20, seed=5, totals=[1.0])
    assert len(s) >= 1
    np.testing.assert_allclose(s.column(1), 0.15, atol=1e-5)
    np.testing.assert_allclose(s.column(2), 0.15, atol=1e-5)
    np.testing.assert_allclose(s.column(0), 1.0 - 2 * 0.15, atol=1e-5)
    traj = integrate(carbon, models.CARBON_INITIAL_STATE, 500.0, method="radau")
    assert np.max(np.abs(traj.final - [0.7, 0.15, 0.15])) < 1e-4, traj.final


def c06_gma_tangency():
    rng = np.random.default_rng(6)
    for _ in range(20):
        c = float(np.exp(rng.uniform(-2, 2)))
        a, b = rng.uniform(-3, 3, size=2)
        x0 = np.exp(rng.uniform(-1, 1, size=2))

        def V(x):
            return c * x[0] ** a * x[1] ** b

        def grad(x):
            return np.array([a, b]) * V(x) / x

        p_fd = kinetic_orders(V, x0)
        p_an = kinetic_orders(V, x0, mode="analytic", gradient=grad)
        assert np.max(np.abs(p_fd - [a, b])) < 1e-6
        assert np.max(np.abs(p_an - [a, b])) < 1e-12
        assert abs(rate_constant(V, x0, p_fd) - c) / c < 1e-6
        alpha = rate_constant(V, x0, p_an)
        assert abs(alpha - c) / c < 1e-12
        assert abs(alpha * np.prod(x0 ** p_an) - V(x0)) / V(x0) < 1e-12


def c07_carbon_order():
    k = 0.7

    def logistic_flux(x):
        return x[0] * (1 - x[0] / k)

    p = kinetic_orders(logistic_flux, [0.69])
    assert abs(p[0] + 68) < 1e-4, p
    assert models.logistic_order("0.69", "0.7") == -68
    params = read_params(models.fixture_text("anderies.toml"))
    g = approximate_flux_model(models.carbon_preindustrial(params),
                               models.CARBON_OPERATING_POINT, mode="analytic")
    assert abs(g.orders[0, 0] + 68) < 1e-9 and g.orders[0, 0] == g.orders[1, 0]


def c08_stlk():
    bad = [i for i, (net, kappa) in enumerate(ensemble()) if not stlk_check(net, kappa).passed]
    assert not bad, bad


def c09_deficiency_bound():
    bad = [i for i, (net, kappa) in enumerate(ensemble())
           if not deficiency_bound_check(net, kappa).passed]
    assert not bad, bad


def c10_log_residual():
    for name in ("toy.crn", "carbon.crn"):
        sys_ = fixture(name)
        s = sample_equilibria(sys_, 10, seed=10)
        assert len(s) >= 2, name
        pairs = list(itertools.combinations(structural_report(sys_.net).nonterminal_complexes, 2))
        assert pairs
        worst = max(
            abs(log_constraint_residual(sys_, s.points[a], s.points[b], pr))
            for a, b in itertools.combinations(range(len(s)), 2) for pr in pairs
        )
        assert worst < 1e-6, (name, worst)


def c11_conservation_drift():
    for name, c0 in (("toy.crn", [1.75, 0.25]), ("carbon.crn", models.CARBON_INITIAL_STATE)):
        sys_ = fixture(name)
        traj = integrate(sys_, c0, 500.0)
        totals = traj.states.sum(axis=1)
        drift = np.max(np.abs(totals - totals[0])) / abs(totals[0])
        assert drift < 1e-8, (name, drift)


def c12_round_trip():
    rng = np.random.default_rng(12)
    for i in range(50):
        sys_ = random_system(rng, kind=("rdk", "any", "mass_action")[i % 3])
        text = emit_crn(sys_)
        assert emit_crn(parse_crn(text)[1]) == text


CRITERIA = [
    (1, "toy structural analysis", c01_toy_structure),
    (2, "toy ACR in X1 with verified equilibria", c02_toy_acr),
    (3, "closed-form toy equilibrium", c03_closed_form),
    (4, "carbon structural analysis and T-matrix", c04_carbon_structure),
    (5, "carbon ACR equilibria and trajectory", c05_carbon_acr),
    (6, "GMA tangency and idempotence", c06_gma_tangency),
    (7, "carbon land-pool order -68", c07_carbon_order),
    (8, "Laplacian kernel supports (100 networks)", c08_stlk),
    (9, "kernel dimension bound (100 networks)", c09_deficiency_bound),
    (10, "log-constraint residual", c10_log_residual),
    (11, "conservation drift over t=500", c11_conservation_drift),
    (12, "parser round-trip (50 systems)", c12_round_trip),
]


@pytest.mark.parametrize("number, title, check", CRITERIA, ids=[f"c{n:02d}" for n, _, _ in CRITERIA])
def test_criterion(number, title, check):
    try:
        check()
    except BaseException as exc:
        RESULTS[number] = (title, False, f"{type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}")
        raise
    RESULTS[number] = (title, True, "")


def summary_lines():
    lines = []
    for n, title, _ in CRITERIA:
        if n in RESULTS:
            t, ok, why = RESULTS[n]
            lines.append(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {t}" + (f"  ({why})" if why else ""))
    return lines


if __name__ == "__main__":
    failed = 0
    for n, title, check in CRITERIA:
        try:
            check()
            RESULTS[n] = (title, True, "")
        except Exception as exc:
            failed += 1
            RESULTS[n] = (title, False, f"{type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}")
        print(summary_lines()[-1], flush=True)
    sys.exit(1 if failed else 0)
