"""Deterministic text, LaTeX and JSON renderings of every result type.

Text output uses the expression grammar of :mod:`qkloc.parser` (``L0``, ``q``,
``^`` with integer powers), so values with integer exponents and rational
coefficients read back unchanged.  Fractional exponents print as ``L0^(1/2)``
and the root of unity ``zeta_M`` prints as ``zM``; neither parses.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .algebra import Cyclotomic, LaurentPolynomial, Monomial, TorusScalar

__all__ = [
    "cyclotomic_text",
    "laurent_text",
    "monomial_text",
    "qfunction_text",
    "render",
    "scalar_text",
    "to_json",
]


# ---------------------------------------------------------------------------
# text
# ---------------------------------------------------------------------------

def _exp_text(e: Fraction) -> str:
    if e.denominator == 1:
        return str(e.numerator)
    return f"({e.numerator}/{e.denominator})"


def monomial_text(m: Monomial) -> str:
    parts = []
    for i, e in enumerate(m.exponents):
        if e == 1:
            parts.append(f"L{i}")
        elif e:
            parts.append(f"L{i}^{_exp_text(e)}")
    return "*".join(parts) if parts else "1"


def _rational_text(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def cyclotomic_text(c: Cyclotomic) -> str:
    if c.is_rational():
        return _rational_text(c.coeffs[0])
    parts = []
    for k, v in enumerate(c.coeffs):
        if not v:
            continue
        z = "" if k == 0 else (f"z{c.order}" if k == 1 else f"z{c.order}^{k}")
        if not z:
            body = _rational_text(abs(v))
        elif abs(v) == 1:
            body = z
        else:
            body = f"{_rational_text(abs(v))}*{z}"
        parts.append(("-" if v < 0 else "+", body))
    return _join_signed(parts)


def _join_signed(parts: list[tuple[str, str]]) -> str:
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def laurent_text(p: LaurentPolynomial) -> str:
    parts = []
    for mono, coeff in p.terms():
        mt = monomial_text(mono)
        if coeff.is_rational():
            c = coeff.coeffs[0]
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if mt == "1":
                body = _rational_text(a)
            elif a == 1:
                body = mt
            else:
                body = f"{_rational_text(a)}*{mt}"
        else:
            sign = "+"
            body = f"({cyclotomic_text(coeff)})" + ("" if mt == "1" else f"*{mt}")
        parts.append((sign, body))
    return _join_signed(parts)


def _binomial_text(x: Monomial, zeta: int = 0, q_power: int = 0) -> str:
    bits = []
    sign = "-"
    if zeta and 2 * zeta == x.ctx.root_order:
        sign = "+"
    elif zeta:
        bits.append(f"z{x.ctx.root_order}" + (f"^{zeta}" if zeta != 1 else ""))
    if q_power:
        bits.append("q" if q_power == 1 else f"q^{q_power}")
    if not x.is_identity() or not bits:
        bits.append(monomial_text(x))
    return f"(1 {sign} {'*'.join(bits)})"


def _den_text(factors: list[tuple[str, int]]) -> str:
    return "*".join(b if k == 1 else f"{b}^{k}" for b, k in factors)


def scalar_text(s: TorusScalar) -> str:
    num = laurent_text(s.num)
    if not s.den:
        return num
    den = _den_text([(_binomial_text(x), k) for x, k in s.den_factors])
    return f"({num})/({den})"


def _qpoly_text(num: dict) -> str:
    parts = []
    for k in sorted(num):
        st = scalar_text(num[k])
        qs = "" if k == 0 else ("q" if k == 1 else f"q^{k}")
        if not qs:
            body = st if not num[k].den and " " not in st else f"({st})"
        elif st == "1":
            body = qs
        elif st == "-1":
            body = f"-{qs}"
        else:
            body = f"({st})*{qs}"
        parts.append(body)
    if not parts:
        return "0"
    return _join_signed([("-", b[1:]) if b.startswith("-") else ("+", b) for b in parts])


def qfunction_text(f) -> str:
    num = _qpoly_text(f.num)
    if not f.den:
        return num
    den = _den_text([(_binomial_text(fa.mu, fa.zeta, fa.a), fa.multiplicity) for fa in f.den])
    return f"({num})/({den})"


# ---------------------------------------------------------------------------
# LaTeX
# ---------------------------------------------------------------------------

def _latex_exp(e: Fraction) -> str:
    return str(e.numerator) if e.denominator == 1 else f"{e.numerator}/{e.denominator}"


def monomial_latex(m: Monomial) -> str:
    parts = []
    for i, e in enumerate(m.exponents):
        if e == 1:
            parts.append(f"\\Lambda_{{{i}}}")
        elif e:
            parts.append(f"\\Lambda_{{{i}}}^{{{_latex_exp(e)}}}")
    return "".join(parts) if parts else "1"


def _rational_latex(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"\\frac{{{c.numerator}}}{{{c.denominator}}}"


def cyclotomic_latex(c: Cyclotomic) -> str:
    if c.is_rational():
        return _rational_latex(c.coeffs[0])
    parts = []
    for k, v in enumerate(c.coeffs):
        if not v:
            continue
        z = "" if k == 0 else (f"\\zeta_{{{c.order}}}" + (f"^{{{k}}}" if k > 1 else ""))
        a = abs(v)
        body = _rational_latex(a) if not z else (z if a == 1 else f"{_rational_latex(a)}{z}")
        parts.append(("-" if v < 0 else "+", body))
    return _join_signed(parts)


def laurent_latex(p: LaurentPolynomial) -> str:
    parts = []
    for mono, coeff in p.terms():
        mt = monomial_latex(mono)
        if coeff.is_rational():
            c = coeff.coeffs[0]
            a = abs(c)
            body = _rational_latex(a) if mt == "1" else (mt if a == 1 else f"{_rational_latex(a)}{mt}")
            parts.append(("-" if c < 0 else "+", body))
        else:
            parts.append(("+", f"\\left({cyclotomic_latex(coeff)}\\right)" + ("" if mt == "1" else mt)))
    return _join_signed(parts)


def _binomial_latex(x: Monomial, zeta: int = 0, q_power: int = 0) -> str:
    bits = []
    sign = "-"
    if zeta and 2 * zeta == x.ctx.root_order:
        sign = "+"
    elif zeta:
        bits.append(f"\\zeta_{{{x.ctx.root_order}}}" + (f"^{{{zeta}}}" if zeta != 1 else ""))
    if q_power:
        bits.append("q" if q_power == 1 else f"q^{{{q_power}}}")
    if not x.is_identity() or not bits:
        bits.append(monomial_latex(x))
    return f"(1{sign}{''.join(bits)})"


def scalar_latex(s: TorusScalar) -> str:
    num = laurent_latex(s.num)
    if not s.den:
        return num
    den = "".join(_binomial_latex(x) + (f"^{{{k}}}" if k > 1 else "") for x, k in s.den_factors)
    return f"\\frac{{{num}}}{{{den}}}"


def qfunction_latex(f) -> str:
    parts = []
    for k in sorted(f.num):
        st = scalar_latex(f.num[k])
        qs = "" if k == 0 else ("q" if k == 1 else f"q^{{{k}}}")
        parts.append(st if not qs else f"\\left({st}\\right){qs}")
    num = " + ".join(parts) if parts else "0"
    if not f.den:
        return num
    den = "".join(
        _binomial_latex(fa.mu, fa.zeta, fa.a) + (f"^{{{fa.multiplicity}}}" if fa.multiplicity > 1 else "")
        for fa in f.den
    )
    return f"\\frac{{{num}}}{{{den}}}"


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def _rat(c) -> str:
    c = Fraction(c)
    return f"{c.numerator}/{c.denominator}"


def _exps_json(m: Monomial) -> list[str]:
    return [_rat(e) for e in m.exponents]


def to_json(obj: Any) -> Any:
    """Convert a result value into JSON-ready data; every number becomes a string."""
    from .kring import KClass, PPolynomial
    from .jfunction import JBundle, NovikovSeries, PForm
    from .localization import DegreeCheck, LegSpec, PoleTerm, RecursionReport
    from .qfunc import FractionTerm, PartialFractionForm, PoleLocus, QFactor, QFunction

    if isinstance(obj, (int, Fraction)) and not isinstance(obj, bool):
        return _rat(obj)
    if isinstance(obj, Cyclotomic):
        return {"order": str(obj.order), "coeffs": [_rat(c) for c in obj.coeffs]}
    if isinstance(obj, Monomial):
        return _exps_json(obj)
    if isinstance(obj, LaurentPolynomial):
        return [[_exps_json(m), to_json(c)] for m, c in obj.terms()]
    if isinstance(obj, TorusScalar):
        return {
            "num": to_json(obj.num),
            "den": [{"mu": _exps_json(x), "mult": str(k)} for x, k in obj.den_factors],
        }
    if isinstance(obj, QFactor):
        out = {"a": str(obj.a), "mu": _exps_json(obj.mu), "mult": str(obj.multiplicity)}
        if obj.zeta:
            out["zeta"] = str(obj.zeta)
        return out
    if isinstance(obj, QFunction):
        return {
            "num": [[str(k), to_json(obj.num[k])] for k in sorted(obj.num)],
            "den": [to_json(f) for f in obj.den],
        }
    if isinstance(obj, PoleLocus):
        return {"zeta_exp": str(obj.zeta_exp), "root": _exps_json(obj.root)}
    if isinstance(obj, FractionTerm):
        return {"locus": to_json(obj.locus), "order": str(obj.order), "coeff": to_json(obj.coeff)}
    if isinstance(obj, PartialFractionForm):
        return {
            "laurent_part": to_json(obj.laurent_part),
            "fraction_terms": [to_json(t) for t in obj.fraction_terms],
        }
    if isinstance(obj, NovikovSeries):
        return {"truncation": str(obj.truncation), "coeffs": [to_json(c) for c in obj.coeffs]}
    if isinstance(obj, JBundle):
        return {
            "n": str(obj.n),
            "truncation": str(obj.truncation),
            "components": [to_json(c) for c in obj.components],
        }
    if isinstance(obj, PPolynomial):
        return [to_json(c) for c in obj.coeffs]
    if isinstance(obj, PForm):
        return {
            "num": [[str(k), to_json(obj.num[k])] for k in sorted(obj.num)],
            "den": [to_json(f) for f in obj.den],
        }
    if isinstance(obj, KClass):
        return [to_json(c) for c in obj.components]
    if isinstance(obj, LegSpec):
        return {"i": str(obj.i), "j": str(obj.j), "m": str(obj.m)}
    if isinstance(obj, DegreeCheck):
        return {"d": str(obj.d), "lhs": to_json(obj.lhs), "rhs": to_json(obj.rhs), "pass": obj.passed,
                "note": obj.note}
    if isinstance(obj, RecursionReport):
        return {"leg": to_json(obj.leg), "checks": [to_json(c) for c in obj.checks], "pass": obj.passed}
    if isinstance(obj, PoleTerm):
        return {"leg": to_json(obj.leg), "fraction": to_json(obj.fraction)}
    if isinstance(obj, dict):
        return {str(k): to_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_json(v) for v in obj]
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _text(obj: Any) -> str:
    from .kring import KClass, PPolynomial
    from .jfunction import JBundle, NovikovSeries, PForm
    from .localization import DegreeCheck, RecursionReport
    from .qfunc import FractionTerm, PartialFractionForm, QFunction

    if isinstance(obj, Cyclotomic):
        return cyclotomic_text(obj)
    if isinstance(obj, Monomial):
        return monomial_text(obj)
    if isinstance(obj, LaurentPolynomial):
        return laurent_text(obj)
    if isinstance(obj, TorusScalar):
        return scalar_text(obj)
    if isinstance(obj, QFunction):
        return qfunction_text(obj)
    if isinstance(obj, FractionTerm):
        loc = _binomial_text(obj.locus.root, obj.locus.zeta_exp, 1)
        return f"({scalar_text(obj.coeff)})/{loc}" + (f"^{obj.order}" if obj.order > 1 else "")
    if isinstance(obj, PartialFractionForm):
        lines = [f"laurent part: {qfunction_text(obj.laurent_part)}"]
        lines += [f"  + {_text(t)}" for t in obj.fraction_terms]
        return "\n".join(lines)
    if isinstance(obj, NovikovSeries):
        return "\n".join(f"Q^{d}: {qfunction_text(c)}" for d, c in enumerate(obj.coeffs))
    if isinstance(obj, JBundle):
        return "\n".join(f"[fixed point {i}]\n{_text(c)}" for i, c in enumerate(obj.components))
    if isinstance(obj, PPolynomial):
        return " + ".join(f"({scalar_text(c)})*P^{k}" for k, c in enumerate(obj.coeffs))
    if isinstance(obj, PForm):
        num = " + ".join(f"[{_text(obj.num[k])}]*q^{k}" for k in sorted(obj.num)) or "0"
        den = _den_text([(_binomial_text(fa.mu, fa.zeta, fa.a), fa.multiplicity) for fa in obj.den])
        return f"({num})/({den})" if den else num
    if isinstance(obj, KClass):
        return "(" + ", ".join(scalar_text(c) for c in obj.components) + ")"
    if isinstance(obj, DegreeCheck):
        verdict = "PASS" if obj.passed else "FAIL"
        return f"d={obj.d}: {verdict}  lhs={_text(obj.lhs)}  rhs={_text(obj.rhs)}" + (
            f"  ({obj.note})" if obj.note else ""
        )
    if isinstance(obj, RecursionReport):
        head = f"leg i={obj.leg.i} j={obj.leg.j} m={obj.leg.m}: {'PASS' if obj.passed else 'FAIL'}"
        return "\n".join([head] + ["  " + _text(c) for c in obj.checks])
    if isinstance(obj, dict):
        if set(obj) == {"check", "pass"}:
            return f"[{'PASS' if obj['pass'] else 'FAIL'}] {obj['check']}"
        return "\n".join(f"{k}: {_text(v)}" for k, v in obj.items())
    if isinstance(obj, (list, tuple)):
        return "\n".join(_text(v) for v in obj)
    if obj is None:
        return "none"
    return str(obj)


def _latex(obj: Any) -> str:
    from .qfunc import FractionTerm, PartialFractionForm, QFunction

    if isinstance(obj, Cyclotomic):
        return cyclotomic_latex(obj)
    if isinstance(obj, Monomial):
        return monomial_latex(obj)
    if isinstance(obj, LaurentPolynomial):
        return laurent_latex(obj)
    if isinstance(obj, TorusScalar):
        return scalar_latex(obj)
    if isinstance(obj, QFunction):
        return qfunction_latex(obj)
    if isinstance(obj, FractionTerm):
        den = _binomial_latex(obj.locus.root, obj.locus.zeta_exp, 1)
        if obj.order > 1:
            den += f"^{{{obj.order}}}"
        return f"\\frac{{{scalar_latex(obj.coeff)}}}{{{den}}}"
    if isinstance(obj, PartialFractionForm):
        parts = [qfunction_latex(obj.laurent_part)] if not obj.laurent_part.is_zero() else []
        parts += [_latex(t) for t in obj.fraction_terms]
        return " + ".join(parts) if parts else "0"
    if isinstance(obj, dict):
        return "\n".join(f"% {k}\n{_latex(v)}" for k, v in obj.items())
    if isinstance(obj, (list, tuple)):
        return "\n".join(_latex(v) for v in obj)
    return _text(obj)


def render(result: Any, fmt: str = "text", session: dict | None = None, checks: list | None = None) -> str:
    """Render a command result in ``text``, ``json`` or ``latex``."""
    if fmt == "json":
        payload = {
            "session": {k: str(v) for k, v in (session or {}).items()},
            "result": to_json(result),
            "checks": to_json(checks or []),
        }
        return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False)
    if fmt == "latex":
        return _latex(result)
    body = _text(result)
    if checks:
        body += "\n" + "\n".join(_text(c) for c in checks)
    return body
