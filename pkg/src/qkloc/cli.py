"""Command-line front end.

Exit codes: ``0`` success, ``1`` a verification failed, ``2`` usage, parse or
domain errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from math import lcm
from typing import Callable, Optional, Sequence

from .algebra import AlgebraContext
from .errors import DomainError, QKLocError
from .jfunction import j_coeff, j_in_p_basis, j_series
from .localization import (
    LegSpec,
    ReferenceOracle,
    c_coeff,
    lefschetz_residue_form,
    lefschetz_trace,
    reconstruct,
    tangent_eigenvalues,
    verify_degree2_example,
    verify_recursion,
)
from .parser import SessionConfig, parse_value
from .qfunc import PoleLocus, QFunction, qf_partial_fractions, qf_residue, qf_split_kpm
from .serialize import render

log = logging.getLogger(__name__)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Outcome:
    def __init__(self, result, checks: Optional[list] = None):
        self.result = result
        self.checks = checks or []

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)


def _check(name: str, ok: bool) -> dict:
    return {"check": name, "pass": bool(ok)}


def _session(args) -> SessionConfig:
    d = getattr(args, "max_degree", 0) or 0
    m = args.root_order
    if m is None:
        # smallest order that holds every root the command will take
        m = lcm(*range(1, d + 1), getattr(args, "m", 1))
        if args.command == "verify-degree2":
            m = lcm(m, 2)
    return SessionConfig(args.n, d, m, args.format)


def _qfunction(text: str, ctx: AlgebraContext) -> QFunction:
    return parse_value(text, ctx, "qfunction")


# -- commands ----------------------------------------------------------------

def cmd_j(args, ctx):
    s = j_series(ctx, args.max_degree)
    if args.fixed_point is None:
        return _Outcome(s)
    if not 0 <= args.fixed_point <= args.n:
        raise DomainError(f"fixed point {args.fixed_point} out of range 0..{args.n}")
    return _Outcome(s.components[args.fixed_point])


def cmd_j_pform(args, ctx):
    forms = [j_in_p_basis(ctx, d) for d in range(args.max_degree + 1)]
    checks = [
        _check(f"restriction d={d} i={i}", f.restrict(i) == j_coeff(ctx, i, d))
        for d, f in enumerate(forms)
        for i in range(ctx.nvars)
    ]
    return _Outcome(forms, checks)


def cmd_partial_fractions(args, ctx):
    f = _qfunction(args.expr, ctx)
    pf = qf_partial_fractions(f)
    return _Outcome(pf, [_check("recombination", pf.recombine() == f)])


def cmd_split_kpm(args, ctx):
    f = _qfunction(args.expr, ctx)
    kp, km = qf_split_kpm(f)
    return _Outcome({"kplus": kp, "kminus": km}, [_check("kplus + kminus", kp + km == f)])


def cmd_residue(args, ctx):
    f = _qfunction(args.expr, ctx)
    mu = parse_value(args.mu, ctx, "monomial")
    ctx.require_divisible(args.m)
    base = PoleLocus.principal(args.m, mu)
    locus = PoleLocus(args.branch * (ctx.root_order // args.m), base.root)
    return _Outcome(qf_residue(f, locus))


def _leg(args, ctx) -> LegSpec:
    leg = LegSpec(args.i, args.j, args.m)
    leg.validate(ctx)
    return leg


def cmd_c_coeff(args, ctx):
    leg = _leg(args, ctx)
    if args.method != "both":
        return _Outcome(c_coeff(ctx, leg, args.method))
    prod, tang = c_coeff(ctx, leg, "product"), c_coeff(ctx, leg, "tangent")
    return _Outcome({"product": prod, "tangent": tang}, [_check("product == tangent", prod == tang)])


def cmd_tangent_eigenvalues(args, ctx):
    return _Outcome(tangent_eigenvalues(ctx, _leg(args, ctx)))


def cmd_verify_recursion(args, ctx):
    leg = _leg(args, ctx)
    report = verify_recursion(ctx, leg.i, leg.j, leg.m, j_series(ctx, args.max_degree))
    return _Outcome(report, [_check(f"recursion i={leg.i} j={leg.j} m={leg.m}", report.passed)])


def cmd_verify_degree2(args, ctx):
    ok = verify_degree2_example(perturb=args.perturb)
    return _Outcome(ok, [_check("degree-2 elementary fractions", ok)])


def cmd_lefschetz(args, ctx):
    trace, form = lefschetz_trace(ctx, args.k), lefschetz_residue_form(ctx, args.k)
    return _Outcome({"trace": trace, "residue_form": form}, [_check("trace == residue form", trace == form)])


def cmd_reconstruct(args, ctx):
    rebuilt = reconstruct(ctx, args.max_degree, ReferenceOracle(ctx))
    checks = [
        _check("degree 0 is 1 - q", all(rebuilt.coeff(i, 0) == QFunction.dilaton(ctx) for i in range(ctx.nvars))),
        _check("matches closed form", rebuilt == j_series(ctx, args.max_degree)),
    ]
    return _Outcome(rebuilt, checks)


def cmd_parse(args, ctx):
    return _Outcome(parse_value(args.expr, ctx, args.kind))


# -- argument parsing ----------------------------------------------------------

def _common(p: argparse.ArgumentParser, degree: bool = False, leg: bool = False) -> None:
    p.add_argument("--n", type=int, default=1, help="projective dimension N")
    p.add_argument("--root-order", type=int, default=None, help="root order M (default lcm(1..D))")
    p.add_argument("--format", choices=("text", "json", "latex"), default="text")
    p.add_argument("--out", default=None, help="write the report to this file")
    p.add_argument("-v", "--verbose", action="store_true")
    if degree:
        p.add_argument("--max-degree", type=int, default=2, help="Novikov truncation D")
    if leg:
        p.add_argument("--i", type=int, default=0)
        p.add_argument("--j", type=int, default=1)
        p.add_argument("--m", type=int, default=1)


COMMANDS: dict[str, tuple[Callable, str]] = {
    "j": (cmd_j, "closed-form J-function in the fixed-point basis"),
    "j-pform": (cmd_j_pform, "J-function in the Hopf-bundle presentation"),
    "partial-fractions": (cmd_partial_fractions, "partial fractions of a q-rational expression"),
    "split-kpm": (cmd_split_kpm, "K+ / K- decomposition"),
    "residue": (cmd_residue, "residue of f dq/q at a root of 1 - q^m mu"),
    "c-coeff": (cmd_c_coeff, "leg denominator C_ij(m)"),
    "tangent-eigenvalues": (cmd_tangent_eigenvalues, "tangent weights of the two-pointed leg"),
    "verify-recursion": (cmd_verify_recursion, "check the residue recursion on the closed form"),
    "verify-degree2": (cmd_verify_degree2, "five-term degree-2 identity on CP^1"),
    "lefschetz": (cmd_lefschetz, "holomorphic Lefschetz trace of P^k"),
    "reconstruct": (cmd_reconstruct, "rebuild the J-function from the recursion"),
    "parse": (cmd_parse, "parse and print an expression"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qkloc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        _common(
            p,
            degree=name in ("j", "j-pform", "verify-recursion", "reconstruct"),
            leg=name in ("c-coeff", "tangent-eigenvalues", "verify-recursion"),
        )
        if name == "j":
            p.add_argument("--fixed-point", type=int, default=None)
        if name == "c-coeff":
            p.add_argument("--method", choices=("product", "tangent", "both"), default="product")
        if name in ("partial-fractions", "split-kpm", "residue", "parse"):
            p.add_argument("expr", help="expression, e.g. '1/(1 - q*L0/L1)'")
        if name == "residue":
            p.add_argument("--mu", required=True, help="monomial mu of the factor 1 - q^m mu")
            p.add_argument("--m", type=int, default=1)
            p.add_argument("--branch", type=int, default=0, help="which m-th root (0 is principal)")
        if name == "parse":
            p.add_argument("--kind", choices=("auto", "monomial", "scalar", "qfunction", "ppoly"), default="auto")
        if name == "verify-degree2":
            p.add_argument("--perturb", type=int, choices=range(5), default=None,
                           help="add 1 to one coefficient (the check must then fail)")
        if name == "lefschetz":
            p.add_argument("--k", type=int, default=0)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        config = _session(args)
        ctx = config.context()
        outcome = COMMANDS[args.command][0](args, ctx)
    except QKLocError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    session = {"n": config.n, "d": config.d, "m": config.m}
    text = render(outcome.result, args.format, session, outcome.checks)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK if outcome.passed else EXIT_FAIL


def main_entry() -> None:
    sys.exit(main())
