"""Seeded random networks and systems for property tests and batch checks.

Recipe: m in [2, 6] species, n in [3, min(10, 3**m)] distinct complexes with
coefficients in {0, 1, 2} (the zero complex allowed), then arcs.  Every
complex first gets one arc to or from a random partner, then extra random
arcs are added up to a target count of at most ``max_r``.  Self-loops and
repeated arcs are rejected.
"""

from __future__ import annotations

import itertools

import numpy as np

from .kinetics import PowerLawKineticSystem, attach
from .network import ReactionNetwork, build_network


def random_network(
    rng: np.random.Generator,
    m_range: tuple[int, int] = (2, 6),
    n_range: tuple[int, int] = (3, 10),
    max_r: int = 14,
    coeffs: tuple[int, ...] = (0, 1, 2),
) -> ReactionNetwork:
    m = int(rng.integers(m_range[0], m_range[1] + 1))
    n_max = min(n_range[1], len(coeffs) ** m)
    n = int(rng.integers(n_range[0], n_max + 1))
    vectors: list[tuple[int, ...]] = []
    while len(vectors) < n:
        v = tuple(int(x) for x in rng.choice(coeffs, size=m))
        if v not in vectors:
            vectors.append(v)

    arcs: list[tuple[int, int]] = []
    covered = set()
    for i in rng.permutation(n):
        i = int(i)
        if i in covered:
            continue
        j = int(rng.integers(0, n - 1))
        j = j + 1 if j >= i else j
        arc = (i, j) if rng.random() < 0.5 else (j, i)
        if arc in arcs:
            arc = arc[::-1]
        arcs.append(arc)
        covered.update(arc)
    target = int(rng.integers(len(arcs), max(len(arcs), max_r) + 1))
    free = [a for a in itertools.permutations(range(n), 2) if a not in arcs]
    rng.shuffle(free)
    arcs.extend(tuple(int(x) for x in a) for a in free[: target - len(arcs)])

    species = [f"S{i + 1}" for i in range(m)]
    complexes = [dict(enumerate(v)) for v in vectors]
    reactions = [(a, b, f"R{j + 1}") for j, (a, b) in enumerate(arcs)]
    return build_network(species, complexes, reactions)


def random_system(
    rng: np.random.Generator, kind: str = "rdk", net: ReactionNetwork | None = None, **net_kwargs
) -> PowerLawKineticSystem:
    """Random power-law system on a random (or given) network.

    ``kind="rdk"`` draws one order row per reactant complex, ``"any"`` one per
    reaction, ``"mass_action"`` uses reactant stoichiometry.  Orders are
    uniform in [-2, 2] and rates log-uniform in [0.1, 10].
    """
    net = net or random_network(rng, **net_kwargs)
    k = np.exp(rng.uniform(np.log(0.1), np.log(10.0), size=net.r))
    if kind == "mass_action":
        F = np.array([net.complexes[rx.reactant].vector(net.m) for rx in net.reactions], dtype=float)
    elif kind == "rdk":
        rows = {y: rng.uniform(-2, 2, size=net.m) for y in net.reactant_complexes}
        F = np.array([rows[rx.reactant] for rx in net.reactions])
    elif kind == "any":
        F = rng.uniform(-2, 2, size=(net.r, net.m))
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return attach(net, F.reshape(net.r, net.m), k)
