from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from acrkit import approx, models
from acrkit.crnfile import read_params
from acrkit.errors import MissingParameter, NonpositivePoint, ZeroRateAtOperatingPoint


def power(c, a, b):
    def V(x):
        return c * x[0] ** a * x[1] ** b

    def grad(x):
        return np.array([a * V(x) / x[0], b * V(x) / x[1]])

    return V, grad


@settings(max_examples=50, deadline=None)
@given(
    st.floats(0.1, 10), st.floats(-3, 3), st.floats(-3, 3),
    st.floats(0.2, 5), st.floats(0.2, 5),
)
def test_power_law_recovered(c, a, b, x, y):
    V, grad = power(c, a, b)
    x0 = [x, y]
    p_fd = approx.kinetic_orders(V, x0)
    p_an = approx.kinetic_orders(V, x0, mode="analytic", gradient=grad)
    np.testing.assert_allclose(p_fd, [a, b], atol=1e-6)
    np.testing.assert_allclose(p_an, [a, b], atol=1e-12)
    assert approx.rate_constant(V, x0, p_an) == pytest.approx(c, rel=1e-12)
    assert approx.rate_constant(V, x0, p_fd) == pytest.approx(c, rel=1e-5)


def test_tangency_of_nonlinear_rate():
    def V(x):
        return x[0] * (1 - x[0] / 2) * np.exp(-x[1]) + 0.1

    x0 = np.array([0.6, 0.3])
    p = approx.kinetic_orders(V, x0)
    alpha = approx.rate_constant(V, x0, p)
    assert alpha * np.prod(x0 ** p) == pytest.approx(V(x0), rel=1e-12)
    # derivative of the power law at x0 matches dV/dx
    for i in range(2):
        h = 1e-6 * x0[i]
        e = np.zeros(2)
        e[i] = h
        dV = (V(x0 + e) - V(x0 - e)) / (2 * h)
        dP = p[i] * V(x0) / x0[i]
        assert dP == pytest.approx(dV, rel=1e-4)


def test_orders_scale_invariant():
    def V(x):
        return x[0] ** 2 / (1 + x[1])

    x0 = [0.7, 1.3]
    p1 = approx.kinetic_orders(V, x0)
    p2 = approx.kinetic_orders(lambda x: 7.5 * V(x), x0)
    np.testing.assert_allclose(p1, p2, rtol=1e-9)


def test_toy_is_idempotent(toy):
    g = approx.approximate_flux_model(models.toy_model(), [0.4, 1.9])
    np.testing.assert_allclose(g.orders, toy.F, atol=1e-12)
    np.testing.assert_allclose(g.constants, toy.k, rtol=1e-12)
    g_fd = approx.approximate_flux_model(models.toy_model(), [0.4, 1.9], mode="finite_difference")
    np.testing.assert_allclose(g_fd.orders, toy.F, atol=1e-9)


def test_approximation_matches_at_operating_point():
    model = models.toy_model(1.3, 0.7)
    x0 = [0.9, 1.1]
    g = approx.approximate_flux_model(model, x0)
    for j, fl in enumerate(model.fluxes):
        assert g.power_law(j, x0) == pytest.approx(fl.rate(np.array(x0)), rel=1e-12)


def carbon_model():
    return models.carbon_preindustrial(read_params(models.fixture_text("anderies.toml")))


def test_logistic_order_exact():
    assert models.logistic_order("0.69", "0.7") == -68
    assert models.logistic_order(Fraction(69, 100), Fraction(7, 10)) == Fraction(-68)


@pytest.mark.parametrize("mode, tol", [("finite_difference", 1e-4), ("analytic", 1e-9)])
def test_carbon_land_orders(mode, tol):
    g = approx.approximate_flux_model(carbon_model(), models.CARBON_OPERATING_POINT, mode=mode)
    assert g.orders[0, 0] == pytest.approx(-68, abs=tol)
    assert g.orders[1, 0] == pytest.approx(-68, abs=tol)
    # the mixing fluxes are linear
    np.testing.assert_allclose(g.orders[2:], [[0, 1, 0], [0, 0, 1]], atol=tol)
    assert g.classification.is_pl_rdk


@pytest.mark.parametrize("a1", [0.2, 0.5, 0.65, 0.69])
def test_carbon_land_orders_equal_everywhere(a1):
    x0 = [a1, 0.2, 0.2]
    g = approx.approximate_flux_model(carbon_model(), x0, mode="analytic")
    assert g.orders[0, 0] == pytest.approx(g.orders[1, 0], rel=1e-12)
    assert g.orders[0, 0] == pytest.approx(float(models.logistic_order(a1, 0.7)), rel=1e-12)


def test_carbon_original_model_steady_state():
    tr = approx.simulate_flux_model(carbon_model(), models.CARBON_INITIAL_STATE, 500.0)
    np.testing.assert_allclose(tr.final, [0.7, 0.15, 0.15], atol=1e-6)
    assert np.max(np.abs(tr.states.sum(axis=1) - 1.0)) < 1e-9


def test_offtake_term():
    p = dict(read_params(models.fixture_text("anderies.toml")))
    x = np.array([0.5, 0.2, 0.2])
    base = models.carbon_preindustrial(p).fluxes[1].rate(x)
    p["alpha_offtake"] = 0.3
    assert models.carbon_preindustrial(p).fluxes[1].rate(x) == pytest.approx(base + 0.15)


def test_zero_rate_at_carrying_capacity():
    with pytest.raises(ZeroRateAtOperatingPoint):
        approx.approximate_flux_model(carbon_model(), [0.7, 0.15, 0.15])


def test_missing_parameter():
    p = read_params(models.fixture_text("anderies.toml"))
    del p["a_f"]
    with pytest.raises(MissingParameter, match="a_f"):
        models.carbon_preindustrial(p)


@pytest.mark.parametrize("x0", [[0.0, 1.0], [-1.0, 1.0], [1.0], [np.nan, 1.0]])
def test_nonpositive_point(x0):
    with pytest.raises(NonpositivePoint):
        approx.approximate_flux_model(models.toy_model(), x0)


def test_not_rdk_warns():
    model = approx.FluxModel(
        pools=("A", "B"),
        fluxes=(
            approx.Flux("f1", "A", "B", lambda x: x[0]),
            approx.Flux("f2", "A", "2 B", lambda x: x[0] ** 2),
        ),
    )
    with pytest.warns(UserWarning, match="not PL-RDK"):
        g = approx.approximate_flux_model(model, [1.0, 1.0])
    assert not g.classification.is_pl_rdk
