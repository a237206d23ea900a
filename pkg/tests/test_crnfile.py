import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from acrkit import crnfile, models
from acrkit.errors import CrnSemanticError, CrnSyntaxError
from acrkit.random_networks import random_network, random_system

TOY_TEXT = """\
# toy system
species X1 X2
reaction R1: X2 -> X1 rate 1 orders { X2: 0.8 }
reaction R2: X1 + X2 -> 2X2 rate 2 orders { X1: 0.5, X2: 0.8 }
"""


def test_parse_toy_text(toy):
    net, sys = crnfile.parse_crn(TOY_TEXT)
    assert sys == toy
    assert net.reaction_label(1) == "R2"


def test_fixtures_match_builtins(toy, carbon):
    assert crnfile.parse_crn(models.fixture_text("toy.crn"))[1] == toy
    assert crnfile.parse_crn(models.fixture_text("carbon.crn"))[1] == carbon


def test_bare_network():
    net, sys = crnfile.parse_crn("species A B\nreaction a: A -> B\nreaction b: B -> A\n")
    assert sys is None and net.r == 2


def test_rational_and_zero_complex():
    net, _ = crnfile.parse_crn("species A\nreaction in: 0 -> 3/2 A\nreaction out: 3/2 A -> 0\n")
    assert net.complex_label(0) == "0"
    assert net.complex_label(1) == "3/2A"


def test_comments_and_blank_lines():
    text = "\n# header\nspecies A B   # two species\n\nreaction r: A -> B  # one way\n"
    net, _ = crnfile.parse_crn(text)
    assert net.species_names == ("A", "B")


def test_scientific_and_negative_orders():
    _, sys = crnfile.parse_crn(
        "species A B\nreaction r: A -> B rate 1.5e-3 orders { A: -68, B: 2.5E+1 }\n"
    )
    assert sys.k[0] == 1.5e-3
    np.testing.assert_array_equal(sys.F, [[-68.0, 25.0]])


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("", 1, 1),
        ("# nothing\n", 1, 1),
        ("species A B\nreaction r A -> B\n", 2, 12),
        ("species A B\nreaction r: A => B\n", 2, 16),
        ("species A B\nreaction r: A -> B rate\n", 2, 24),
        ("species A B\nreaction r: A -> B rate 1 orders { A 1 }\n", 2, 38),
        ("species A B\nreaction r: A -> B speed 1\n", 2, 20),
        ("specie A\n", 1, 1),
        ("species A $\n", 1, 11),
    ],
)
def test_syntax_errors_carry_position(text, line, col):
    with pytest.raises(CrnSyntaxError) as info:
        crnfile.parse_crn(text)
    assert (info.value.line, info.value.col) == (line, col)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("species A\nreaction r: A -> A\n", "self-loop"),
        ("species A\nreaction r: A -> B\n", "unknown species"),
        ("species A B\nreaction r: -A -> B\n", "negative"),
        ("species A B\nreaction r: A -> B rate 1 orders { A: 1 }\nreaction s: B -> A\n",
         "some reactions"),
        ("species A B\nreaction r: A -> B rate 1\n", "together"),
        ("species A B\nreaction r: A -> B rate 0 orders { }\n", "positive"),
        ("species A A\n", "twice"),
        ("species A B\nreaction r: A -> B\nreaction r: B -> A\n", "duplicate"),
        ("species A B\nreaction r: A -> B rate 1 orders { C: 1 }\n", "unknown species"),
        ("species A B\n", "no reactions"),
    ],
)
def test_semantic_errors(text, fragment):
    with pytest.raises(CrnSemanticError, match=fragment):
        crnfile.parse_crn(text)


def test_emit_is_canonical(toy):
    text = crnfile.emit_crn(toy)
    assert text == models.fixture_text("toy.crn")
    assert "0.80000000000000004" in text


def test_emit_bare_network():
    net = random_network(np.random.default_rng(5))
    text = crnfile.emit_crn(net)
    assert "rate" not in text
    net2, sys2 = crnfile.parse_crn(text)
    assert sys2 is None
    assert crnfile.canonical_form(net2) == crnfile.canonical_form(net)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["rdk", "any", "mass_action"]))
def test_round_trip_property(seed, kind):
    sys = random_system(np.random.default_rng(seed), kind=kind)
    text = crnfile.emit_crn(sys)
    net2, sys2 = crnfile.parse_crn(text)
    assert crnfile.canonical_form(sys2) == crnfile.canonical_form(sys)
    assert crnfile.emit_crn(sys2) == text


def test_read_params():
    p = crnfile.read_params("# c\na = 1\nb=2.5e-1  # trailing\n\n")
    assert p == {"a": 1.0, "b": 0.25}
    with pytest.raises(CrnSyntaxError):
        crnfile.read_params("a 1\n")
    with pytest.raises(CrnSyntaxError):
        crnfile.read_params("a = x\n")
    with pytest.raises(CrnSemanticError):
        crnfile.read_params("a = 1\na = 2\n")
    with pytest.raises(CrnSemanticError, match="unknown"):
        crnfile.check_param_keys({"k": 1, "kk": 2}, ["k"])


def test_fixture_params_cover_carbon_model():
    p = crnfile.read_params(models.fixture_text("anderies.toml"))
    assert set(p) == set(models.CARBON_PARAM_NAMES)
    assert p["k"] == 0.7 and p["alpha_offtake"] == 0.0


FLUX_TEXT = """\
pools X1 X2
param k1 = 1
param k2 = 2
let s = X2 ** 0.8
flux R1: X2 -> X1 = k1 * s
flux R2: X1 + X2 -> 2 X2 = k2 * sqrt(X1) * s
"""


def test_flux_model_matches_toy():
    model = crnfile.parse_flux_model(FLUX_TEXT)
    x = np.array([0.3, 1.2])
    np.testing.assert_allclose(
        model.species_formation_rate(x), models.toy_model().species_formation_rate(x), rtol=1e-14
    )
    model = crnfile.parse_flux_model(FLUX_TEXT, overrides={"k2": 4.0})
    assert model.params["k2"] == 4.0


@pytest.mark.parametrize(
    "bad, exc",
    [
        ("flux R3: X1 -> X2 = __import__('os')", CrnSyntaxError),
        ("flux R3: X1 -> X2 = X1.real", CrnSyntaxError),
        ("flux R3: X1 -> X2 = q * X1", CrnSemanticError),
        ("flux R3: X1 -> X2 = pow(X1, 2)", CrnSyntaxError),
        ("bogus line", CrnSyntaxError),
    ],
)
def test_flux_model_rejects(bad, exc):
    with pytest.raises(exc):
        crnfile.parse_flux_model(FLUX_TEXT + bad + "\n")


def test_flux_override_unknown_key():
    with pytest.raises(CrnSemanticError):
        crnfile.parse_flux_model(FLUX_TEXT, overrides={"k3": 1.0})
