import numpy as np
import pytest

from acrkit import kinetics as kin
from acrkit.errors import DimensionMismatch, NonpositiveConcentration, NonpositiveRate, NotPlRdk
from acrkit.network import network_from_strings


def test_toy_classification(toy):
    cls = kin.classify(toy)
    assert cls.is_pl_rdk and cls.is_pl_rlk and not cls.is_mass_action
    T = kin.t_matrix(toy)
    np.testing.assert_array_equal(T.entries, [[0.0, 0.5], [0.8, 0.8]])


def test_carbon_t_matrix(carbon):
    T = kin.t_matrix(carbon)
    np.testing.assert_array_equal(
        T.entries,
        [[-68, -68, 0, 0], [0.580148, 0.910864, 1, 0], [0, 0, 0, 1]],
    )
    cls = kin.classify(carbon)
    # four reactant complexes in three species: columns are dependent
    assert cls.is_pl_rdk and not cls.is_pl_rlk


def test_mass_action_is_rdk():
    net = network_from_strings(["A + B -> C", "C -> A + B", "C -> 2 A"])
    sys = kin.mass_action(net, [1, 2, 3])
    cls = kin.classify(sys)
    assert cls.is_mass_action and cls.is_pl_rdk


def test_not_rdk_detected():
    net = network_from_strings(["A -> B", "A -> C"])
    sys = kin.attach(net, [[1, 0, 0], [2, 0, 0]], [1, 1])
    cls = kin.classify(sys)
    assert not cls.is_pl_rdk and cls.rdk_violation == (0, 1)
    with pytest.raises(NotPlRdk):
        kin.t_matrix(sys)


def test_rates_match_definition(toy):
    c = np.array([0.3, 1.7])
    expected = [1.0 * 1.7**0.8, 2.0 * 0.3**0.5 * 1.7**0.8]
    np.testing.assert_allclose(kin.rates(toy, c), expected, rtol=1e-14)
    f = kin.species_formation_rate(toy, c)
    np.testing.assert_allclose(f, [expected[0] - expected[1], expected[1] - expected[0]], rtol=1e-13)


def test_log_jacobian_matches_finite_difference(rng):
    from acrkit.random_networks import random_system

    sys = random_system(rng, kind="any")
    u = rng.normal(size=sys.net.m) * 0.3
    J = kin.log_jacobian(sys, u)
    h = 1e-6
    for i in range(sys.net.m):
        e = np.zeros_like(u)
        e[i] = h
        fd = (kin.species_formation_rate(sys, np.exp(u + e))
              - kin.species_formation_rate(sys, np.exp(u - e))) / (2 * h)
        np.testing.assert_allclose(J[:, i], fd, rtol=1e-5, atol=1e-8)


def test_laplacian_columns_sum_to_zero(rng):
    from acrkit.random_networks import random_network

    net = random_network(rng)
    A = kin.laplacian(net, 1.0 - rng.uniform(size=net.r))
    np.testing.assert_allclose(A.sum(axis=0), 0, atol=1e-14)
    off = A - np.diag(np.diag(A))
    assert np.all(off >= 0)


def test_kappa_from_equilibrium(toy):
    c = np.array([0.25, 1.0])
    # at c = (0.25, 1) both toy rates equal 1
    np.testing.assert_allclose(kin.kappa_from_equilibrium(toy, c), [1.0, 1.0], rtol=1e-15)


@pytest.mark.parametrize(
    "F, k, exc",
    [
        ([[0, 0.8]], [1, 2], DimensionMismatch),
        ([[0, 0.8], [0.5, 0.8]], [1, 0], NonpositiveRate),
        ([[0, 0.8], [0.5, 0.8]], [1, -2], NonpositiveRate),
        ([[0, np.nan], [0.5, 0.8]], [1, 2], DimensionMismatch),
    ],
)
def test_attach_rejects(toy, F, k, exc):
    with pytest.raises(exc):
        kin.attach(toy.net, F, k)


def test_nonpositive_concentration(toy):
    with pytest.raises(NonpositiveConcentration):
        kin.rates(toy, [0.0, 1.0])


def test_system_is_read_only(toy):
    with pytest.raises(ValueError):
        toy.F[0, 0] = 3.0
