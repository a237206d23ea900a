"""Text formats: ``.crn`` networks, flat parameter files and ``.flux`` models.

``.crn`` is line oriented, ``#`` starts a comment::

    species X1 X2
    reaction R1: X2 -> X1 rate 1 orders { X2: 0.8 }
    reaction R2: X1 + X2 -> 2 X2 rate 2 orders { X1: 0.5, X2: 0.8 }

A complex is ``0`` or ``term (+ term)*`` with ``term := [coefficient]
species``; coefficients are non-negative rationals (``2``, ``3/2``).
Species missing from ``orders`` have order 0.  Either every reaction
carries ``rate`` and ``orders`` (a kinetic system) or none does (a bare
network).
"""

from __future__ import annotations

import ast
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union

import numpy as np

from .approx import Flux, FluxModel
from .errors import CrnSemanticError, CrnSyntaxError, NetworkError
from .kinetics import PowerLawKineticSystem, attach
from .network import Complex, ReactionNetwork, build_network, format_complex

KEYWORDS = {"species", "reaction", "rate", "orders"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?(?:/\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[+\-:{},=])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    col: int  # 1-based


def _tokenize(line: str, lineno: int) -> list[_Tok]:
    toks, pos = [], 0
    while pos < len(line):
        m = _TOKEN_RE.match(line, pos)
        if m is None:
            raise CrnSyntaxError(f"unexpected character {line[pos]!r}", lineno, pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            text = m.group()
            toks.append(_Tok(text if kind in ("arrow", "punct") else kind, text, pos + 1))
        pos = m.end()
    return toks


class _Line:
    def __init__(self, toks: list[_Tok], lineno: int, width: int):
        self.toks, self.i, self.lineno, self.width = toks, 0, lineno, width

    def peek(self) -> Optional[_Tok]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def col(self) -> int:
        t = self.peek()
        return t.col if t else self.width + 1

    def expect(self, kind: str, what: str) -> _Tok:
        t = self.peek()
        if t is None or t.kind != kind:
            found = repr(t.text) if t else "end of line"
            raise CrnSyntaxError(f"found {found}", self.lineno, self.col(), what)
        self.i += 1
        return t

    def accept(self, kind: str, text: Optional[str] = None) -> Optional[_Tok]:
        t = self.peek()
        if t is not None and t.kind == kind and (text is None or t.text == text):
            self.i += 1
            return t
        return None

    def at_end(self) -> bool:
        return self.i >= len(self.toks)

    def float_(self, what: str) -> float:
        sign = -1.0 if self.accept("-") else 1.0
        if sign > 0:
            self.accept("+")
        tok = self.expect("number", what)
        if "/" in tok.text:
            return sign * float(Fraction(tok.text))
        return sign * float(tok.text)


def _parse_complex(ln: _Line, index: dict[str, int]) -> dict[int, Fraction]:
    t = ln.peek()
    if t is not None and t.kind == "number" and t.text == "0":
        nxt = ln.toks[ln.i + 1] if ln.i + 1 < len(ln.toks) else None
        if nxt is None or nxt.kind != "ident" or nxt.text in KEYWORDS:
            ln.i += 1
            return {}
    coeffs: dict[int, Fraction] = {}
    while True:
        if ln.accept("-"):
            raise CrnSemanticError("negative stoichiometric coefficient", ln.lineno)
        coef = Fraction(1)
        num = ln.accept("number")
        if num is not None:
            try:
                coef = Fraction(num.text)
            except (ValueError, ZeroDivisionError):
                raise CrnSyntaxError(f"bad coefficient {num.text!r}", ln.lineno, num.col)
        name = ln.expect("ident", "species name")
        if name.text in KEYWORDS:
            raise CrnSyntaxError(f"keyword {name.text!r} where a species was expected",
                                 ln.lineno, name.col, "species name")
        if name.text not in index:
            raise CrnSemanticError(f"unknown species {name.text!r}", ln.lineno)
        i = index[name.text]
        coeffs[i] = coeffs.get(i, Fraction(0)) + coef
        if not ln.accept("+"):
            return coeffs


def parse_crn(text: str) -> tuple[ReactionNetwork, Optional[PowerLawKineticSystem]]:
    """Parse ``.crn`` text into a network and, if present, its kinetics.

    Raises :class:`CrnSyntaxError` (with line and column) for malformed
    text and :class:`CrnSemanticError` for well-formed but invalid content.
    """
    species: list[str] = []
    index: dict[str, int] = {}
    complexes: list[Complex] = []
    arcs: list[tuple[int, int, str]] = []
    kin: list[tuple[Optional[float], Optional[dict[int, float]], int]] = []
    labels: set[str] = set()
    seen_any = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = _tokenize(line, lineno)
        if not toks:
            continue
        ln = _Line(toks, lineno, len(line))
        head = ln.expect("ident", "'species' or 'reaction'")
        if head.text == "species":
            if arcs:
                raise CrnSemanticError("species must be declared before reactions", lineno)
            if ln.at_end():
                raise CrnSyntaxError("empty species list", lineno, ln.col(), "species name")
            while not ln.at_end():
                name = ln.expect("ident", "species name")
                if name.text in KEYWORDS:
                    raise CrnSyntaxError(f"reserved word {name.text!r}", lineno, name.col,
                                         "species name")
                if name.text in index:
                    raise CrnSemanticError(f"species {name.text!r} declared twice", lineno)
                index[name.text] = len(species)
                species.append(name.text)
            seen_any = True
        elif head.text == "reaction":
            if not species:
                raise CrnSemanticError("reaction before any species declaration", lineno)
            label = ln.expect("ident", "reaction label").text
            ln.expect(":", "':'")
            if label in labels:
                raise CrnSemanticError(f"duplicate reaction label {label!r}", lineno)
            labels.add(label)
            lhs = Complex.from_mapping(_parse_complex(ln, index))
            ln.expect("->", "'->'")
            rhs = Complex.from_mapping(_parse_complex(ln, index))
            rate, orders = None, None
            while not ln.at_end():
                kw = ln.expect("ident", "'rate', 'orders' or end of line")
                if kw.text == "rate" and rate is None:
                    rate = ln.float_("rate constant")
                elif kw.text == "orders" and orders is None:
                    orders = {}
                    ln.expect("{", "'{'")
                    if not ln.accept("}"):
                        while True:
                            name = ln.expect("ident", "species name")
                            ln.expect(":", "':'")
                            val = ln.float_("kinetic order")
                            if name.text not in index:
                                raise CrnSemanticError(f"unknown species {name.text!r}", lineno)
                            if index[name.text] in orders:
                                raise CrnSemanticError(
                                    f"order for {name.text!r} given twice", lineno)
                            orders[index[name.text]] = val
                            if ln.accept("}"):
                                break
                            ln.expect(",", "',' or '}'")
                else:
                    raise CrnSyntaxError(f"unexpected {kw.text!r}", lineno, kw.col,
                                         "'rate', 'orders' or end of line")
            if lhs == rhs:
                raise CrnSemanticError(f"reaction {label}: self-loop", lineno)
            if (rate is None) != (orders is None):
                raise CrnSemanticError(
                    f"reaction {label}: 'rate' and 'orders' must be given together", lineno)
            if rate is not None and not (rate > 0 and math.isfinite(rate)):
                raise CrnSemanticError(f"reaction {label}: rate must be positive", lineno)
            for c in (lhs, rhs):
                if c not in complexes:
                    complexes.append(c)
            arc = (complexes.index(lhs), complexes.index(rhs))
            if any(a[:2] == arc for a in arcs):
                raise CrnSemanticError(f"reaction {label} repeats an earlier reaction", lineno)
            arcs.append((*arc, label))
            kin.append((rate, orders, lineno))
            seen_any = True
        else:
            raise CrnSyntaxError(f"unknown statement {head.text!r}", lineno, head.col,
                                 "'species' or 'reaction'")

    if not seen_any:
        raise CrnSyntaxError("no content", 1, 1, "'species' declaration")
    if not arcs:
        raise CrnSemanticError("no reactions")
    try:
        net = build_network(species, complexes, arcs)
    except NetworkError as exc:
        raise CrnSemanticError(str(exc)) from exc

    with_kin = [r is not None for r, _, _ in kin]
    if not any(with_kin):
        return net, None
    if not all(with_kin):
        bad = next(ln for (r, _, ln) in kin if r is None)
        raise CrnSemanticError("kinetics given for some reactions but not all", bad)
    F = np.zeros((net.r, net.m))
    for j, (_, orders, _) in enumerate(kin):
        for i, v in orders.items():
            F[j, i] = v
    return net, attach(net, F, [r for r, _, _ in kin])


def _fmt(x: float) -> str:
    x = float(x)
    return "0" if x == 0 else format(x, ".17g")


def emit_crn(obj: Union[ReactionNetwork, PowerLawKineticSystem], header: str = "") -> str:
    """Render a network or kinetic system as ``.crn`` text (floats at 17
    significant digits, so the text parses back to identical values)."""
    sys = obj if isinstance(obj, PowerLawKineticSystem) else None
    net = sys.net if sys is not None else obj
    names = net.species_names
    out = [f"# {h}" if h else "#" for h in header.splitlines()] if header else []
    out.append("species " + " ".join(names))
    for j, rx in enumerate(net.reactions):
        line = (
            f"reaction {net.reaction_label(j)}: "
            f"{format_complex(net.complexes[rx.reactant], names)} -> "
            f"{format_complex(net.complexes[rx.product], names)}"
        )
        if sys is not None:
            orders = ", ".join(
                f"{names[i]}: {_fmt(v)}" for i, v in enumerate(sys.F[j]) if v != 0
            )
            line += f" rate {_fmt(sys.k[j])} orders {{ {orders} }}" if orders else \
                f" rate {_fmt(sys.k[j])} orders {{ }}"
        out.append(line)
    return "\n".join(out) + "\n"


def canonical_form(obj: Union[ReactionNetwork, PowerLawKineticSystem]):
    """Hashable summary independent of complex numbering; two objects with the
    same canonical form describe the same network (and kinetics)."""
    sys = obj if isinstance(obj, PowerLawKineticSystem) else None
    net = sys.net if sys is not None else obj
    rxs = tuple(
        (net.reaction_label(j), net.complexes[rx.reactant], net.complexes[rx.product])
        for j, rx in enumerate(net.reactions)
    )
    kin = None
    if sys is not None:
        kin = (tuple(map(tuple, sys.F.tolist())), tuple(sys.k.tolist()))
    return (net.species_names, rxs, kin)


# -- parameter files ----------------------------------------------------------

def read_params(text: str) -> dict[str, float]:
    """Flat ``key = value`` lines; ``#`` comments; values are numbers."""
    out: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key = key.strip()
        if not sep or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", key):
            raise CrnSyntaxError("expected 'key = value'", lineno, 1, "key = value")
        if key in out:
            raise CrnSemanticError(f"parameter {key!r} given twice", lineno)
        try:
            out[key] = float(val.strip())
        except ValueError:
            raise CrnSyntaxError(f"bad number {val.strip()!r}", lineno,
                                 raw.index("=") + 2, "number") from None
    return out


def check_param_keys(params: dict, allowed) -> None:
    unknown = sorted(set(params) - set(allowed))
    if unknown:
        raise CrnSemanticError(f"unknown parameter(s): {', '.join(unknown)}")


# -- flux-model files ---------------------------------------------------------

_FUNCS = {"exp": np.exp, "log": np.log, "sqrt": np.sqrt}
_ALLOWED_NODES = (
    ast.Expression, ast.BinOp, ast.UnaryOp, ast.Constant, ast.Name, ast.Load, ast.Call,
    ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd,
)


def _compile_expr(src: str, known: set[str], lineno: int):
    try:
        tree = ast.parse(src.strip(), mode="eval")
    except SyntaxError as exc:
        raise CrnSyntaxError(f"bad expression: {exc.msg}", lineno, None, "arithmetic expression")
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise CrnSyntaxError(f"{type(node).__name__} not allowed in expressions", lineno)
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
            raise CrnSyntaxError("only numeric constants allowed", lineno)
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCS or node.keywords:
                raise CrnSyntaxError("only exp, log and sqrt may be called", lineno)
        if isinstance(node, ast.Name) and node.id not in known and node.id not in _FUNCS:
            raise CrnSemanticError(f"unknown name {node.id!r}", lineno)
    return compile(tree, "<flux>", "eval")


def parse_flux_model(text: str, overrides: Optional[dict] = None) -> FluxModel:
    """Parse a ``.flux`` model::

        pools A B
        param k = 0.7
        let L = A * (1 - A / k)
        flux F1: A -> B = 2 * L

    ``let`` names are evaluated in order and may use pools, params and
    earlier lets.  ``overrides`` replaces declared params (unknown keys are
    an error).  Rates are evaluated numerically; no symbolic derivatives.
    """
    pools: list[str] = []
    params: dict[str, float] = {}
    lets: list[tuple[str, object]] = []
    fluxes: list[tuple[str, str, str, object]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        known = set(pools) | set(params) | {n for n, _ in lets}
        if head == "pools":
            for name in rest.split():
                if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name) or name in known:
                    raise CrnSemanticError(f"bad or repeated pool name {name!r}", lineno)
                pools.append(name)
        elif head in ("param", "let"):
            name, sep, expr = rest.partition("=")
            name = name.strip()
            if not sep or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
                raise CrnSyntaxError(f"expected '{head} name = value'", lineno, 1)
            if name in known or name in _FUNCS:
                raise CrnSemanticError(f"name {name!r} already defined", lineno)
            if head == "param":
                try:
                    params[name] = float(expr)
                except ValueError:
                    raise CrnSyntaxError(f"bad number {expr.strip()!r}", lineno, None, "number")
            else:
                lets.append((name, _compile_expr(expr, known, lineno)))
        elif head == "flux":
            m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)\s*:\s*(.+?)\s*->\s*(.+?)\s*=\s*(.+)", rest)
            if m is None:
                raise CrnSyntaxError("expected 'flux label: complex -> complex = expr'", lineno)
            label, lhs, rhs, expr = m.groups()
            fluxes.append((label, lhs, rhs, _compile_expr(expr, known, lineno)))
        else:
            raise CrnSyntaxError(f"unknown statement {head!r}", lineno, 1,
                                 "'pools', 'param', 'let' or 'flux'")
    if not pools or not fluxes:
        raise CrnSemanticError("a flux model needs pools and at least one flux")
    if overrides:
        check_param_keys(overrides, params)
        params.update({k: float(v) for k, v in overrides.items()})

    def make_rate(code) -> Callable[[np.ndarray], float]:
        def rate(x):
            env = {"__builtins__": {}, **_FUNCS, **params}
            env.update(zip(pools, (float(v) for v in x)))
            for name, c in lets:
                env[name] = eval(c, env)
            return float(eval(code, env))
        return rate

    return FluxModel(
        pools=tuple(pools),
        fluxes=tuple(Flux(label, lhs, rhs, make_rate(code)) for label, lhs, rhs, code in fluxes),
        params=dict(params),
    )
