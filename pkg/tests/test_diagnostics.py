import numpy as np
import pytest

from acrkit.diagnostics import deficiency_bound_check, stlk_check
from acrkit.models import carbon_network
from acrkit.network import network_from_strings, structural_report
from acrkit.random_networks import random_network


def test_toy_kernel():
    net = network_from_strings(["X2 -> X1", "X1 + X2 -> 2 X2"], species=["X1", "X2"])
    chk = stlk_check(net, [1.0, 2.0])
    assert chk.passed and chk.nullity == 2
    assert [[net.complex_label(i) for i in s] for s in chk.supports] == [["X1"], ["2X2"]]
    b = deficiency_bound_check(net, [1.0, 2.0])
    assert b.passed and b.bound == 3


def test_carbon_kernel():
    net = carbon_network()
    chk = stlk_check(net, [0.5, 2.0, 1.0, 3.0])
    assert chk.passed and chk.nullity == 3
    assert chk.supports == structural_report(net).terminal_slcs


def test_cycle_kernel_is_tree_constants():
    # a single strong class: the kernel is spanned by a positive vector
    net = network_from_strings(["A -> B", "B -> C", "C -> A"])
    chk = stlk_check(net, [1.0, 2.0, 4.0])
    assert chk.passed and chk.nullity == 1 and chk.min_on_support > 0


@pytest.mark.parametrize("seed", range(40))
def test_random_networks(seed):
    rng = np.random.default_rng(seed)
    net = random_network(rng)
    kappa = 1.0 - rng.uniform(size=net.r)
    chk = stlk_check(net, kappa)
    assert chk.passed, chk.detail
    assert chk.max_off_support < 1e-8
    assert deficiency_bound_check(net, kappa).passed


def test_extreme_rates_still_pass():
    net = network_from_strings(["A -> B", "B -> A", "B -> C", "C -> D", "D -> C"])
    chk = stlk_check(net, [1e-2, 1e2, 1.0, 1e2, 1e-2])
    assert chk.passed
