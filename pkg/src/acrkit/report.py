"""Run reports with text and JSON renderings.

A :class:`RunReport` is an ordered mapping of named sections built from
plain values (ints, floats, strings, bools, lists, dicts).  The JSON
rendering prints floats with 17 significant digits and is deterministic;
the text rendering prints the same values with 6.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .acr import AcrReport, ReactantMapCheck
from .diagnostics import DeficiencyBoundCheck, KernelSupportCheck
from .kinetics import KineticsClassification, PowerLawKineticSystem, t_matrix
from .network import ReactionNetwork, StructuralReport, conservation_laws


def _plain(x: Any) -> Any:
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, np.ndarray):
        return [_plain(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return x


def _json_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def _json(x: Any, indent: int, level: int) -> str:
    import json

    pad, inner = " " * (indent * level), " " * (indent * (level + 1))
    if x is None:
        return "null"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return _json_float(x)
    if isinstance(x, str):
        return json.dumps(x, ensure_ascii=False)
    if isinstance(x, dict):
        if not x:
            return "{}"
        items = [f"{inner}{json.dumps(k, ensure_ascii=False)}: {_json(v, indent, level + 1)}"
                 for k, v in x.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(x, list):
        if not x:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in x):
            return "[" + ", ".join(_json(v, indent, level + 1) for v in x) + "]"
        items = [inner + _json(v, indent, level + 1) for v in x]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(x).__name__}")


def fmt6(x) -> str:
    """Human formatting: 6 significant digits."""
    if isinstance(x, float):
        return format(x, ".6g")
    return str(x)


def sci(x: float, digits: int = 1) -> str:
    """Compact scientific notation: ``0.0e0``, ``1.5e-7``."""
    mant, exp = format(x, f".{digits}e").split("e")
    return f"{mant}e{int(exp)}"


@dataclass
class RunReport:
    command: str
    sections: dict[str, Any] = field(default_factory=dict)
    text_lines: list[str] = field(default_factory=list)

    def add(self, name: str, data: Any, lines: Optional[list[str]] = None) -> None:
        self.sections[name] = _plain(data)
        if lines:
            self.text_lines.extend(lines)

    def to_dict(self) -> dict:
        return {"command": self.command, **self.sections}

    def to_json(self) -> str:
        return _json(self.to_dict(), 2, 0) + "\n"

    def to_text(self) -> str:
        return "\n".join(self.text_lines) + "\n"


# -- section builders --------------------------------------------------------

def _label_set(net: ReactionNetwork, idx) -> str:
    return "{" + ", ".join(net.complex_label(i) for i in idx) + "}"


def structure_section(net: ReactionNetwork, rep: StructuralReport):
    label = net.complex_label
    data = {
        "species": list(net.species_names),
        "complexes": [label(i) for i in range(net.n)],
        "reactions": [
            {"label": net.reaction_label(j), "reactant": label(rx.reactant),
             "product": label(rx.product)}
            for j, rx in enumerate(net.reactions)
        ],
        "n": rep.n, "r": rep.r, "m": rep.m,
        "linkage_classes": rep.ell,
        "strong_linkage_classes": rep.sl,
        "terminal_classes": rep.t,
        "s": rep.s,
        "deficiency": rep.delta,
        "n_r": rep.n_r, "q": rep.q,
        "reactant_deficiency": rep.delta_rho,
        "linkage_class_members": [[label(i) for i in c] for c in rep.linkage_classes],
        "terminal_class_members": [[label(i) for i in c] for c in rep.terminal_slcs],
        "nonterminal": [label(i) for i in rep.nonterminal_complexes],
        "conservation_laws": [list(w) for w in conservation_laws(net)],
    }
    lines = [
        f"n={rep.n} ℓ={rep.ell} s={rep.s} δ={rep.delta} t={rep.t} sℓ={rep.sl} "
        f"r={rep.r} m={rep.m} n_r={rep.n_r} q={rep.q} δρ={rep.delta_rho}",
        "nonterminal: " + (", ".join(data["nonterminal"]) or "(none)"),
        "terminal classes: " + ", ".join(_label_set(net, c) for c in rep.terminal_slcs),
    ]
    if data["conservation_laws"]:
        names = net.species_names
        laws = []
        for w in data["conservation_laws"]:
            laws.append(" + ".join(
                (f"{v}*{names[i]}" if v != 1 else names[i]) for i, v in enumerate(w) if v))
        lines.append("conserved: " + "; ".join(laws))
    return data, lines


def kinetics_section(sys: PowerLawKineticSystem, cls: KineticsClassification):
    net = sys.net
    data = {
        "is_mass_action": cls.is_mass_action,
        "is_pl_rdk": cls.is_pl_rdk,
        "is_pl_rlk": cls.is_pl_rlk,
        "rate_constants": {net.reaction_label(j): float(k) for j, k in enumerate(sys.k)},
        "t_matrix": None,
    }
    kinds = [name for name, flag in (("MAK", cls.is_mass_action), ("PL-RDK", cls.is_pl_rdk),
                                     ("PL-RLK", cls.is_pl_rlk)) if flag]
    lines = ["kinetics: " + (", ".join(kinds) if kinds else "power law, not reactant-determined")]
    if cls.is_pl_rdk:
        T = t_matrix(sys)
        cols = [net.complex_label(y) for y in T.reactant_complexes]
        data["t_matrix"] = {
            "columns": cols,
            "rows": {net.species_names[i]: T.entries[i] for i in range(net.m)},
        }
        lines.append("T-matrix (columns " + ", ".join(cols) + "):")
        for i, name in enumerate(net.species_names):
            lines.append(f"  {name}: " + "  ".join(fmt6(float(v)) for v in T.entries[i]))
    else:
        a, b = cls.rdk_violation
        lines.append(f"  reactions {net.reaction_label(a)} and {net.reaction_label(b)} "
                     "share a reactant with different orders")
    return data, lines


def acr_section(sys: PowerLawKineticSystem, rep: AcrReport, rel_tol: float):
    net = sys.net
    label = net.complex_label
    data = {
        "verdict": rep.verdict,
        "deficiency": rep.deficiency,
        "equilibrium_status": rep.equilibrium_status,
        "acr_species": list(rep.acr_species),
        "candidates": [
            {"y": label(p.y), "y_prime": label(p.y_prime),
             "species": net.species_names[p.species], "order_difference": p.delta_order}
            for p in rep.candidates
        ],
        "detail": rep.detail,
        "equilibria_found": None if rep.equilibria is None else len(rep.equilibria),
        "equilibria": None if rep.equilibria is None else rep.equilibria.points,
        "numeric": [
            {"species": c.species, "passed": c.passed, "spread": c.spread, "count": c.count,
             "minimum": c.minimum, "maximum": c.maximum, "rel_tol": c.rel_tol,
             "low_confidence": c.low_confidence}
            for c in rep.numeric_confirmation
        ],
    }
    if rep.verdict == "acr":
        head = "ACR in " + ", ".join(rep.acr_species)
        for c in rep.numeric_confirmation:
            rel = "≤" if c.passed else ">"
            head += f"; numeric spread {sci(c.spread)} {rel} {sci(rel_tol, 0)}"
            if c.low_confidence:
                head += " (single equilibrium, low confidence)"
        lines = [head]
        if rep.equilibrium_status == "assumed":
            lines.append("(positive equilibrium assumed, not verified)")
    elif rep.verdict == "inapplicable":
        lines = [f"criterion inapplicable: {rep.detail}"]
    else:
        lines = [f"hypothesis failed: {rep.detail}"]
    for p in rep.candidates:
        lines.append(f"  pair {label(p.y)} / {label(p.y_prime)} differs in "
                     f"{net.species_names[p.species]} by {fmt6(p.delta_order)}")
    if rep.equilibria is not None and len(rep.equilibria):
        lines.append(f"  {len(rep.equilibria)} distinct equilibria from "
                     f"{rep.equilibria.n_starts} starts")
    return data, lines


def reactant_map_section(sys: PowerLawKineticSystem, chk: ReactantMapCheck):
    data = {
        "applicable": chk.applicable,
        "reason": chk.reason,
        "reactant_deficiency": chk.delta_rho,
        "is_diagonal": chk.is_diagonal,
        "is_pl_rlk": chk.is_pl_rlk,
        "species": chk.species,
        "y_hat": chk.y_hat,
    }
    if not chk.applicable:
        lines = [f"reactant-map check: not applicable ({chk.reason})"]
    elif chk.confirmed:
        lines = [f"reactant-map check: diagonal, PL-RLK, ACR in {chk.species}"]
    else:
        lines = [f"reactant-map check: inconclusive ({chk.reason})"]
    return data, lines


def stlk_section(net: ReactionNetwork, chk: KernelSupportCheck, bound: DeficiencyBoundCheck):
    data = {
        "stlk": {
            "passed": chk.passed, "nullity": chk.nullity, "t": chk.t,
            "supports": [[net.complex_label(i) for i in s] for s in chk.supports],
            "max_off_support": chk.max_off_support, "detail": chk.detail,
        },
        "deficiency_bound": {
            "passed": bound.passed, "nullity": bound.nullity, "bound": bound.bound,
        },
    }
    mark = "pass" if chk.passed else "FAIL"
    sup = ", ".join(_label_set(net, s) for s in chk.supports)
    lines = [
        f"STLK: dim Ker A_κ = {chk.nullity} with supports {sup} [{mark}]"
        + (f" ({chk.detail})" if chk.detail else ""),
        f"kernel bound: nullity(YA_κ) = {bound.nullity} ≤ {bound.bound} "
        f"[{'pass' if bound.passed else 'FAIL'}]",
    ]
    return data, lines


def residual_pairs(rep: StructuralReport):
    return list(itertools.combinations(rep.nonterminal_complexes, 2))
