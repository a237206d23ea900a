"""Reaction network representation and structural analysis.

A network is the digraph whose vertices are complexes (non-negative
combinations of species) and whose arcs are reactions.  Everything here is
exact: stoichiometric coefficients are :class:`fractions.Fraction` and ranks
come from rational elimination, so the deficiency never depends on a
floating-point tolerance.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import networkx as nx
import numpy as np
import sympy

from .errors import (
    DuplicateComplex,
    IsolatedComplex,
    NetworkError,
    SelfLoopReaction,
    UnknownSpecies,
)

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_TERM_RE = re.compile(
    r"\s*(?P<coef>\d+(?:/\d+|\.\d*)?)?\s*(?P<name>[A-Za-z_][A-Za-z0-9_]*)\s*\Z"
)


@dataclass(frozen=True)
class Species:
    name: str
    index: int


@dataclass(frozen=True)
class Complex:
    """A complex as a sparse map species index -> coefficient.

    ``coefficients`` is kept sorted by species index with zero entries
    dropped, so equality of two complexes is equality of the tuples.
    The zero complex is the empty tuple.
    """

    coefficients: tuple[tuple[int, Fraction], ...] = ()

    @classmethod
    def from_mapping(cls, coeffs: Mapping[int, object]) -> "Complex":
        items = []
        for idx, val in coeffs.items():
            q = Fraction(val)
            if q < 0:
                raise NetworkError(f"negative stoichiometric coefficient {q}")
            if q != 0:
                items.append((int(idx), q))
        return cls(tuple(sorted(items)))

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.coefficients)

    def vector(self, m: int) -> np.ndarray:
        """Dense coefficient vector of length ``m`` (object dtype, exact)."""
        out = np.array([Fraction(0)] * m, dtype=object)
        for idx, q in self.coefficients:
            out[idx] = q
        return out

    @property
    def support(self) -> frozenset[int]:
        return frozenset(i for i, _ in self.coefficients)

    @property
    def is_zero(self) -> bool:
        return not self.coefficients


@dataclass(frozen=True)
class Reaction:
    reactant: int
    product: int
    label: str = ""


def _format_coef(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_complex(c: Complex, names: Sequence[str], compact: bool = False) -> str:
    """Render a complex, e.g. ``A1 + 2 A2`` (or ``A1+2A2`` when compact)."""
    if c.is_zero:
        return "0"
    terms = []
    for idx, q in c.coefficients:
        if q == 1:
            terms.append(names[idx])
        else:
            sep = "" if compact else " "
            terms.append(f"{_format_coef(q)}{sep}{names[idx]}")
    return ("+" if compact else " + ").join(terms)


def parse_complex(text: str, names: Sequence[str]) -> Complex:
    """Parse ``"X1 + 2 X2"``, ``"2X2+X1"`` or ``"0"`` against known species.

    Repeated species are summed, so textual order never matters.
    """
    text = text.strip()
    if text == "0":
        return Complex()
    if not text:
        raise NetworkError("empty complex")
    index = {n: i for i, n in enumerate(names)}
    coeffs: dict[int, Fraction] = {}
    for raw in text.split("+"):
        m = _TERM_RE.match(raw)
        if m is None:
            raise NetworkError(f"malformed term {raw.strip()!r}")
        name = m.group("name")
        if name not in index:
            raise UnknownSpecies(f"unknown species {name!r}")
        q = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
        coeffs[index[name]] = coeffs.get(index[name], Fraction(0)) + q
    return Complex.from_mapping(coeffs)


@dataclass(frozen=True)
class ReactionNetwork:
    """Validated (species, complexes, reactions) triple.

    Use :func:`build_network` (or :func:`network_from_strings`) rather than
    calling the constructor directly; the constructor does not validate.
    """

    species: tuple[Species, ...]
    complexes: tuple[Complex, ...]
    reactions: tuple[Reaction, ...]

    @property
    def m(self) -> int:
        return len(self.species)

    @property
    def n(self) -> int:
        return len(self.complexes)

    @property
    def r(self) -> int:
        return len(self.reactions)

    @property
    def species_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.species)

    def species_index(self, name_or_index) -> int:
        if isinstance(name_or_index, (int, np.integer)):
            if not 0 <= name_or_index < self.m:
                raise UnknownSpecies(f"species index {name_or_index} out of range")
            return int(name_or_index)
        for s in self.species:
            if s.name == name_or_index:
                return s.index
        raise UnknownSpecies(f"unknown species {name_or_index!r}")

    def complex_label(self, idx: int, compact: bool = True) -> str:
        return format_complex(self.complexes[idx], self.species_names, compact=compact)

    def reaction_label(self, j: int) -> str:
        rx = self.reactions[j]
        return rx.label or f"R{j + 1}"

    @cached_property
    def reactant_complexes(self) -> tuple[int, ...]:
        """Indices of complexes that are the tail of some reaction, ascending."""
        return tuple(sorted({rx.reactant for rx in self.reactions}))

    @cached_property
    def digraph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from((rx.reactant, rx.product) for rx in self.reactions)
        return g


def build_network(
    species: Sequence[str],
    complexes: Sequence[Complex | Mapping],
    reactions: Sequence[Reaction | tuple],
) -> ReactionNetwork:
    """Validate and assemble a :class:`ReactionNetwork`.

    ``complexes`` entries may be :class:`Complex` objects or mappings keyed
    by species name or index.  ``reactions`` entries may be
    :class:`Reaction` objects or ``(reactant, product[, label])`` tuples of
    complex indices.
    """
    species = list(species)
    if not species or not complexes or not reactions:
        raise NetworkError("species, complexes and reactions must be nonempty")
    for name in species:
        if not isinstance(name, str) or not _NAME_RE.match(name):
            raise NetworkError(f"invalid species name {name!r}")
    if len(set(species)) != len(species):
        raise NetworkError("duplicate species name")
    index = {n: i for i, n in enumerate(species)}

    cplx: list[Complex] = []
    for c in complexes:
        if isinstance(c, Complex):
            cc = c
        else:
            mapped = {}
            for key, val in c.items():
                if isinstance(key, str):
                    if key not in index:
                        raise UnknownSpecies(f"unknown species {key!r}")
                    key = index[key]
                mapped[key] = mapped.get(key, 0) + Fraction(val)
            cc = Complex.from_mapping(mapped)
        for idx, _ in cc.coefficients:
            if not 0 <= idx < len(species):
                raise UnknownSpecies(f"species index {idx} out of range")
        cplx.append(cc)
    if len(set(cplx)) != len(cplx):
        dup = next(c for c in cplx if cplx.count(c) > 1)
        raise DuplicateComplex(f"duplicate complex {format_complex(dup, species)}")

    rxs: list[Reaction] = []
    seen_arcs = set()
    for j, rx in enumerate(reactions):
        if not isinstance(rx, Reaction):
            rx = Reaction(*rx)
        for end in (rx.reactant, rx.product):
            if not 0 <= end < len(cplx):
                raise NetworkError(f"reaction {j}: complex index {end} out of range")
        if rx.reactant == rx.product:
            raise SelfLoopReaction(
                f"reaction {rx.label or j}: {format_complex(cplx[rx.reactant], species)}"
                " -> itself"
            )
        if (rx.reactant, rx.product) in seen_arcs:
            raise NetworkError(f"reaction {rx.label or j} duplicates an earlier arc")
        seen_arcs.add((rx.reactant, rx.product))
        rxs.append(rx)

    used = {rx.reactant for rx in rxs} | {rx.product for rx in rxs}
    for i, c in enumerate(cplx):
        if i not in used:
            raise IsolatedComplex(f"complex {format_complex(c, species)} is in no reaction")

    return ReactionNetwork(
        species=tuple(Species(n, i) for i, n in enumerate(species)),
        complexes=tuple(cplx),
        reactions=tuple(rxs),
    )


def network_from_strings(
    reactions: Iterable[str], species: Sequence[str] | None = None
) -> ReactionNetwork:
    """Build a network from lines like ``"X1 + X2 -> 2 X2"``.

    ``"A <-> B"`` adds both directions.  Species default to order of first
    appearance; complexes are numbered in order of first appearance
    (reactant before product).
    """
    lines = [r for r in reactions]
    if species is None:
        seen: list[str] = []
        for line in lines:
            for name in re.findall(r"[A-Za-z_][A-Za-z0-9_]*", line):
                if name not in seen:
                    seen.append(name)
        species = seen
    complexes: list[Complex] = []
    arcs: list[tuple[int, int, str]] = []

    def intern(c: Complex) -> int:
        if c not in complexes:
            complexes.append(c)
        return complexes.index(c)

    for line in lines:
        if "<->" in line:
            lhs, rhs = line.split("<->")
            a = intern(parse_complex(lhs, species))
            b = intern(parse_complex(rhs, species))
            arcs.append((a, b, f"R{len(arcs) + 1}"))
            arcs.append((b, a, f"R{len(arcs) + 1}"))
        elif "->" in line:
            lhs, rhs = line.split("->")
            a = intern(parse_complex(lhs, species))
            b = intern(parse_complex(rhs, species))
            arcs.append((a, b, f"R{len(arcs) + 1}"))
        else:
            raise NetworkError(f"no arrow in reaction {line!r}")
    return build_network(species, complexes, arcs)


# -- graph structure ----------------------------------------------------------

def _sorted_partition(parts: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted((tuple(sorted(p)) for p in parts), key=lambda p: p[0]))


def linkage_classes(net: ReactionNetwork) -> tuple[tuple[int, ...], ...]:
    """Weakly connected components of the complex digraph."""
    return _sorted_partition(nx.weakly_connected_components(net.digraph))


def strong_linkage_classes(net: ReactionNetwork) -> tuple[tuple[int, ...], ...]:
    return _sorted_partition(nx.strongly_connected_components(net.digraph))


def terminal_strong_linkage_classes(net: ReactionNetwork) -> tuple[tuple[int, ...], ...]:
    """Strong linkage classes with no arc leaving the class."""
    cond = nx.condensation(net.digraph)
    terminal = [
        cond.nodes[v]["members"] for v in cond.nodes if cond.out_degree(v) == 0
    ]
    return _sorted_partition(terminal)


def nonterminal_complexes(net: ReactionNetwork) -> tuple[int, ...]:
    terminal = {i for cls in terminal_strong_linkage_classes(net) for i in cls}
    return tuple(i for i in range(net.n) if i not in terminal)


# -- linear algebra -----------------------------------------------------------

def matrices(net: ReactionNetwork) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(Y, I_a, N)`` as exact object-dtype arrays of Fractions.

    ``Y`` is m x n (complex coefficient columns), ``I_a`` is n x r (column j
    is ``e_product - e_reactant``) and ``N = Y @ I_a`` is m x r.
    """
    m, n, r = net.m, net.n, net.r
    Y = np.empty((m, n), dtype=object)
    for j, c in enumerate(net.complexes):
        Y[:, j] = c.vector(m)
    Ia = np.array([[Fraction(0)] * r for _ in range(n)], dtype=object)
    for j, rx in enumerate(net.reactions):
        Ia[rx.product, j] += 1
        Ia[rx.reactant, j] -= 1
    N = Y.dot(Ia)
    return Y, Ia, N


def stoichiometric_matrix(net: ReactionNetwork) -> np.ndarray:
    """Float copy of ``N`` for numerical work."""
    return matrices(net)[2].astype(float)


def exact_rank(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    return sympy.Matrix(a.tolist()).rank()


def _primitive_integer(vec) -> tuple[int, ...]:
    """Scale a rational vector to coprime integers with a positive first nonzero."""
    rats = [sympy.Rational(v) for v in vec]
    den = sympy.ilcm(*[q.q for q in rats]) if rats else 1
    ints = [int(q * den) for q in rats]
    g = 0
    for v in ints:
        g = sympy.igcd(g, v)
    g = int(g) or 1
    ints = [v // g for v in ints]
    first = next((v for v in ints if v != 0), 1)
    if first < 0:
        ints = [-v for v in ints]
    return tuple(ints)


def conservation_laws(net: ReactionNetwork) -> tuple[tuple[int, ...], ...]:
    """Integer basis of the left null space of ``N`` (vectors w with wᵀN = 0)."""
    N = matrices(net)[2]
    basis = sympy.Matrix(N.T.tolist()).nullspace()
    return tuple(_primitive_integer(list(b)) for b in basis)


@dataclass(frozen=True)
class StructuralReport:
    n: int
    r: int
    m: int
    linkage_classes: tuple[tuple[int, ...], ...]
    strong_linkage_classes: tuple[tuple[int, ...], ...]
    terminal_slcs: tuple[tuple[int, ...], ...]
    nonterminal_complexes: tuple[int, ...]
    s: int
    delta: int
    n_r: int
    q: int
    delta_rho: int
    reactant_complexes: tuple[int, ...] = field(default=())

    @property
    def ell(self) -> int:
        return len(self.linkage_classes)

    @property
    def sl(self) -> int:
        return len(self.strong_linkage_classes)

    @property
    def t(self) -> int:
        return len(self.terminal_slcs)


def reactant_matrix(net: ReactionNetwork) -> np.ndarray:
    """``Y`` restricted to reactant-complex columns (exact)."""
    Y = matrices(net)[0]
    return Y[:, list(net.reactant_complexes)]


def structural_report(net: ReactionNetwork) -> StructuralReport:
    Y, _, N = matrices(net)
    lcs = linkage_classes(net)
    s = exact_rank(N)
    reactants = net.reactant_complexes
    q = exact_rank(Y[:, list(reactants)])
    return StructuralReport(
        n=net.n,
        r=net.r,
        m=net.m,
        linkage_classes=lcs,
        strong_linkage_classes=strong_linkage_classes(net),
        terminal_slcs=terminal_strong_linkage_classes(net),
        nonterminal_complexes=nonterminal_complexes(net),
        s=s,
        delta=net.n - len(lcs) - s,
        n_r=len(reactants),
        q=q,
        delta_rho=len(reactants) - q,
        reactant_complexes=reactants,
    )
