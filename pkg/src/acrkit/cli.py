"""``acrkit`` command line.

Exit codes: 0 ok, 2 parse or usage error, 3 validation error, 4 no
equilibrium found, 5 integration failure, 6 approximation error.
Reports go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import logging
import sys as _sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import models
from .acr import log_constraint_residual, reactant_map_check, shinar_feinberg_acr
from .approx import approximate_flux_model
from .crnfile import check_param_keys, emit_crn, parse_crn, parse_flux_model, read_params
from .diagnostics import deficiency_bound_check, stlk_check
from .equilibria import METHODS, integrate, sample_equilibria
from .errors import (
    AcrkitError,
    ApproximationError,
    CrnSemanticError,
    CrnSyntaxError,
    IntegrationError,
    KineticsError,
    NetworkError,
)
from .kinetics import classify, mass_action
from .random_networks import random_network
from .report import (
    RunReport,
    acr_section,
    kinetics_section,
    reactant_map_section,
    residual_pairs,
    stlk_section,
    structure_section,
)
from .network import structural_report

EXIT_OK, EXIT_PARSE, EXIT_INVALID, EXIT_NO_EQ, EXIT_INTEGRATION, EXIT_APPROX = 0, 2, 3, 4, 5, 6

log = logging.getLogger("acrkit")


class _Exit(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


# -- argument types ----------------------------------------------------------

def _floats(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("expected at least one number")
    return vals


def _pair(text: str) -> tuple[float, float]:
    vals = _floats(text)
    if len(vals) != 2 or not (0 < vals[0] <= vals[1]):
        raise argparse.ArgumentTypeError(f"expected 'lo,hi' with 0 < lo <= hi, got {text!r}")
    return vals[0], vals[1]


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text!r}")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {text!r}")
    return v


# -- helpers -----------------------------------------------------------------

def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise _Exit(EXIT_PARSE, f"cannot read {path}: {exc.strerror}")


def _load(path: str, mass_action_k=None, need_kinetics: bool = False):
    net, sys = parse_crn(_read(path))
    if mass_action_k is not None:
        if sys is not None:
            raise _Exit(EXIT_INVALID, "--mass-action given but the file already has kinetics")
        sys = mass_action(net, mass_action_k)
    if need_kinetics and sys is None:
        raise _Exit(EXIT_INVALID,
                    f"{path} is a bare network; give rates and orders or --mass-action")
    return net, sys


def _emit(report: RunReport, as_json: bool, out) -> None:
    out.write(report.to_json() if as_json else report.to_text())


# -- commands ----------------------------------------------------------------

def cmd_analyze(args, out) -> int:
    net, sys = _load(args.path, args.mass_action)
    rep = structural_report(net)
    report = RunReport("analyze")
    report.add("structure", *structure_section(net, rep))
    if sys is not None:
        cls = classify(sys)
        report.add("kinetics", *kinetics_section(sys, cls))
        if cls.is_pl_rdk:
            report.add("reactant_map", *reactant_map_section(sys, reactant_map_check(sys)))
    _emit(report, args.json, out)
    return EXIT_OK


def _sample_kwargs(args) -> dict:
    kw = {"box": args.box}
    if args.totals is not None:
        kw["totals"] = args.totals
    elif args.total_range is not None:
        kw["total_range"] = args.total_range
    return kw


def cmd_acr(args, out) -> int:
    net, sys = _load(args.path, args.mass_action, need_kinetics=True)
    mode = "verify" if args.verify else "assume"
    res = shinar_feinberg_acr(sys, mode=mode, n_starts=args.starts, seed=args.seed,
                              rel_tol=args.tol, **_sample_kwargs(args))
    report = RunReport("acr")
    report.add("acr", *acr_section(sys, res, args.tol))
    _emit(report, args.json, out)
    if mode == "verify" and res.equilibrium_status == "not_found":
        print(f"acrkit: no positive equilibrium found from {args.starts} starts",
              file=_sys.stderr)
        return EXIT_NO_EQ
    return EXIT_OK


def cmd_simulate(args, out) -> int:
    net, sys = _load(args.path, args.mass_action, need_kinetics=True)
    if len(args.init) != net.m:
        raise _Exit(EXIT_INVALID, f"--init has {len(args.init)} values, network has {net.m} species")
    traj = integrate(sys, args.init, args.t_end, method=args.method, rtol=args.rtol,
                     atol=args.atol, step=args.step)
    if args.out:
        Path(args.out).write_text(traj.to_csv())
        final = ", ".join(f"{n}={v:.6g}" for n, v in zip(net.species_names, traj.final))
        out.write(f"t={traj.times[-1]:.6g} {final}\n")
    else:
        out.write(traj.to_csv())
    return EXIT_OK


def _builtin_model(name: str, params: Optional[dict]):
    if name == "toy":
        if params:
            check_param_keys(params, ("k1", "k2"))
        return models.toy_model(**(params or {}))
    if params is None:
        raise _Exit(EXIT_APPROX, "the carbon model needs --params (see anderies.toml)")
    check_param_keys(params, models.CARBON_PARAM_NAMES)
    return models.carbon_preindustrial(params)


def cmd_approximate(args, out, parser) -> int:
    if (args.model is None) == (args.builtin is None):
        parser.error("give exactly one of MODEL or --builtin")
    params = read_params(_read(args.params)) if args.params else None
    if args.builtin:
        model = _builtin_model(args.builtin, params)
    else:
        model = parse_flux_model(_read(args.model), overrides=params)
    at = args.at
    if at is None:
        if args.builtin != "toy":
            parser.error("--at is required (the toy built-in defaults to all ones)")
        at = [1.0] * len(model.pools)
    if len(at) != len(model.pools):
        raise _Exit(EXIT_INVALID, f"--at has {len(at)} values, model has {len(model.pools)} pools")
    gma = approximate_flux_model(model, at, mode=args.mode, h_rel=args.h_rel)
    text = emit_crn(gma.system)
    if args.out:
        Path(args.out).write_text(text)
    else:
        out.write(text)
    return EXIT_OK


def _kappas(args, net, rng):
    if args.kappa == "auto":
        return [np.exp(rng.uniform(np.log(0.1), np.log(10.0), size=net.r))
                for _ in range(args.trials)]
    text = _read(args.kappa) if Path(args.kappa).is_file() else args.kappa
    try:
        vals = np.array(_floats(text))
    except argparse.ArgumentTypeError as exc:
        raise _Exit(EXIT_PARSE, f"--kappa: {exc}")
    if vals.size != net.r:
        raise _Exit(EXIT_INVALID, f"--kappa has {vals.size} values, network has {net.r} reactions")
    if np.any(vals <= 0):
        raise _Exit(EXIT_INVALID, "--kappa values must be positive")
    return [vals]


def cmd_verify(args, out, parser) -> int:
    rng = np.random.default_rng(args.seed)
    report = RunReport("verify")
    if args.random is not None:
        if args.path:
            parser.error("give either PATH or --random, not both")
        n_pass = n_bound = 0
        failures = []
        for i in range(args.random):
            net = random_network(rng)
            kappa = 1.0 - rng.uniform(0.0, 1.0, size=net.r)
            chk, bnd = stlk_check(net, kappa), deficiency_bound_check(net, kappa)
            n_pass += chk.passed
            n_bound += bnd.passed
            if not (chk.passed and bnd.passed):
                failures.append(i)
        report.add("random_batch", {
            "instances": args.random, "seed": args.seed, "stlk_passed": n_pass,
            "deficiency_bound_passed": n_bound, "failures": failures,
        }, [f"STLK: {n_pass}/{args.random} pass",
            f"kernel bound: {n_bound}/{args.random} pass"])
        _emit(report, args.json, out)
        return EXIT_OK
    if not args.path:
        parser.error("PATH or --random is required")

    net, sys = _load(args.path, args.mass_action)
    trials = []
    for kappa in _kappas(args, net, rng):
        chk, bnd = stlk_check(net, kappa), deficiency_bound_check(net, kappa)
        data, lines = stlk_section(net, chk, bnd)
        data["kappa"] = kappa
        trials.append((data, lines))
    if len(trials) == 1:
        report.add("laplacian", *trials[0])
    else:
        n_ok = sum(d["stlk"]["passed"] and d["deficiency_bound"]["passed"] for d, _ in trials)
        report.add("laplacian", {"trials": [d for d, _ in trials], "passed": n_ok},
                   trials[0][1] + [f"({n_ok}/{len(trials)} κ trials pass both checks)"])

    rep = structural_report(net)
    if sys is None or rep.delta != 1 or not classify(sys).is_pl_rdk:
        report.add("log_residual", {"checked": False, "reason": "needs a deficiency-one PL-RDK system"},
                   ["log-constraint residual: skipped (needs a deficiency-one PL-RDK system)"])
    else:
        eqs = sample_equilibria(sys, args.starts, seed=args.seed)
        pairs = residual_pairs(rep)
        worst = 0.0
        for a in range(len(eqs)):
            for b in range(a + 1, len(eqs)):
                for pr in pairs:
                    r = abs(log_constraint_residual(sys, eqs.points[a], eqs.points[b], pr))
                    worst = max(worst, r)
        checked = len(eqs) >= 2 and bool(pairs)
        passed = worst < args.residual_tol
        data = {"checked": checked, "equilibria": len(eqs), "pairs": len(pairs),
                "max_abs_residual": worst, "tolerance": args.residual_tol,
                "passed": passed if checked else None}
        if checked:
            line = (f"log-constraint residual: max {worst:.3g} over {len(eqs)} equilibria "
                    f"[{'pass' if passed else 'FAIL'} < {args.residual_tol:g}]")
        else:
            line = f"log-constraint residual: skipped ({len(eqs)} equilibria found)"
        report.add("log_residual", data, [line])
    _emit(report, args.json, out)
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="acrkit", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, kinetics=True):
        sp.add_argument("--json", action="store_true", help="JSON instead of text")
        if kinetics:
            sp.add_argument("--mass-action", type=_floats, metavar="K1,K2,...",
                            help="attach mass-action kinetics to a bare network")

    a = sub.add_parser("analyze", help="structural indices and kinetics class")
    a.add_argument("path")
    common(a)

    c = sub.add_parser("acr", help="deficiency-one ACR test")
    c.add_argument("path")
    common(c)
    g = c.add_mutually_exclusive_group()
    g.add_argument("--assume-equilibrium", action="store_true",
                   help="take a positive equilibrium on trust (default)")
    g.add_argument("--verify", action="store_true", help="search for equilibria numerically")
    c.add_argument("--starts", type=_positive_int, default=20)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--tol", type=_positive_float, default=1e-5,
                   help="relative spread below which a species counts as robust")
    c.add_argument("--box", type=_pair, default=(0.1, 2.0), metavar="LO,HI",
                   help="range for random start concentrations")
    c.add_argument("--total-range", type=_pair, metavar="LO,HI",
                   help="draw conserved totals per start from this range")
    c.add_argument("--totals", type=_floats, metavar="W1,...",
                   help="fix the conserved totals for all starts")

    s = sub.add_parser("simulate", help="integrate the ODE and write a CSV trajectory")
    s.add_argument("path")
    s.add_argument("--mass-action", type=_floats, metavar="K1,K2,...")
    s.add_argument("--init", type=_floats, required=True, metavar="C1,C2,...")
    s.add_argument("--t-end", type=_positive_float, required=True)
    s.add_argument("--method", choices=METHODS, default="rk45")
    s.add_argument("--rtol", type=_positive_float, default=1e-8)
    s.add_argument("--atol", type=_positive_float, default=1e-10)
    s.add_argument("--step", type=_positive_float, help="fixed step for rk4")
    s.add_argument("--out", help="CSV path (default: stdout)")

    x = sub.add_parser("approximate", help="GMA power-law approximation of a flux model")
    x.add_argument("model", nargs="?", help=".flux model file")
    x.add_argument("--builtin", choices=("toy", "carbon"))
    x.add_argument("--at", type=_floats, metavar="X1,X2,...", help="operating point")
    x.add_argument("--params", help="key = value parameter file")
    x.add_argument("--mode", choices=("auto", "analytic", "finite_difference"), default="auto")
    x.add_argument("--h-rel", type=_positive_float, default=1e-6)
    x.add_argument("--out", help=".crn output path (default: stdout)")

    v = sub.add_parser("verify", help="Laplacian kernel, deficiency bound and residual checks")
    v.add_argument("path", nargs="?")
    common(v)
    v.add_argument("--kappa", default="auto",
                   help="'auto' (random), a comma list, or a file of reaction weights")
    v.add_argument("--trials", type=_positive_int, default=1)
    v.add_argument("--random", type=_positive_int, metavar="N",
                   help="check N random networks instead of a file")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--starts", type=_positive_int, default=10)
    v.add_argument("--residual-tol", type=_positive_float, default=1e-6)
    return p


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or _sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="acrkit: %(message)s", stream=_sys.stderr)
    try:
        if args.command == "analyze":
            return cmd_analyze(args, out)
        if args.command == "acr":
            return cmd_acr(args, out)
        if args.command == "simulate":
            return cmd_simulate(args, out)
        if args.command == "approximate":
            return cmd_approximate(args, out, parser)
        return cmd_verify(args, out, parser)
    except SystemExit as exc:
        return int(exc.code or 0)
    except _Exit as exc:
        print(f"acrkit: {exc}", file=_sys.stderr)
        return exc.code
    except CrnSyntaxError as exc:
        print(f"acrkit: syntax error: {exc}", file=_sys.stderr)
        return EXIT_PARSE
    except (CrnSemanticError, NetworkError, KineticsError) as exc:
        print(f"acrkit: invalid input: {exc}", file=_sys.stderr)
        return EXIT_INVALID
    except IntegrationError as exc:
        print(f"acrkit: integration failed: {exc}", file=_sys.stderr)
        return EXIT_INTEGRATION
    except ApproximationError as exc:
        print(f"acrkit: approximation failed: {exc}", file=_sys.stderr)
        return EXIT_APPROX
    except AcrkitError as exc:
        print(f"acrkit: {exc}", file=_sys.stderr)
        return EXIT_INVALID


def main_entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    main_entry()
