"""Expression parser and typed lowering.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := ('-' | '+') factor | atom ('^' signed-int)?
    atom   := int | 'q' | 'P' | 'L' int | '(' expr ')'

Parsing produces an :class:`ExprAst`; :func:`lower` turns it into a
:class:`Monomial`, :class:`TorusScalar`, :class:`QFunction` or
:class:`PPolynomial`.  Division is inverted structurally (products, quotients
and powers are inverted factor by factor), and whatever remains must be a unit
times a binomial ``1 - c q^a x`` with ``c`` a signed root of unity.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterator, Optional, Union

from .algebra import AlgebraContext, LaurentPolynomial, Monomial, TorusScalar
from .errors import (
    ConfigurationError,
    ExprSyntaxError,
    LoweringError,
    NotInvertible,
    PowerNotInteger,
    UnknownVariable,
)
from .kring import PPolynomial
from .qfunc import QFactor, QFunction

__all__ = ["ExprAst", "SessionConfig", "lower", "parse_expr", "parse_value"]

KINDS = ("auto", "monomial", "scalar", "qfunction", "ppoly")


@dataclass(frozen=True)
class SessionConfig:
    """Dimension ``n``, Novikov truncation ``d``, root order ``m`` and output format."""

    n: int
    d: int = 0
    m: Optional[int] = None
    fmt: str = "text"

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ConfigurationError(f"n must be >= 1, got {self.n}")
        if self.d < 0:
            raise ConfigurationError(f"max degree must be >= 0, got {self.d}")
        if self.fmt not in ("text", "json", "latex"):
            raise ConfigurationError(f"unknown format {self.fmt!r}")
        need = lcm(*range(1, self.d + 1)) if self.d else 1
        if self.m is None:
            object.__setattr__(self, "m", need)
        elif self.m < 1 or self.m % need:
            raise ConfigurationError(f"root order {self.m} is not divisible by every m <= {self.d}")

    def context(self) -> AlgebraContext:
        return AlgebraContext(self.n, self.m)


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExprAst:
    """One node: ``kind`` is ``int``, ``q``, ``P``, ``L``, ``neg``, ``+``, ``-``, ``*``, ``/`` or ``^``."""

    kind: str
    children: tuple["ExprAst", ...] = ()
    value: int = 0
    pos: int = field(default=0, compare=False)

    def variables(self) -> set[str]:
        if self.kind in ("q", "P"):
            return {self.kind}
        if self.kind == "L":
            return {f"L{self.value}"}
        out: set[str] = set()
        for c in self.children:
            out |= c.variables()
        return out


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> Iterator[_Tok]:
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m.group(0).strip() == "":
            break
        start = m.start(m.lastindex)
        if m.group(1):
            yield _Tok("int", m.group(1), start)
        elif m.group(2):
            yield _Tok("name", m.group(2), start)
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ExprSyntaxError(f"unexpected character {ch!r}", start)
            yield _Tok(ch, ch, start)
        pos = m.end()
    yield _Tok("end", "", len(text))


class _Parser:
    # binding powers for the infix operators
    INFIX = {"+": 10, "-": 10, "*": 20, "/": 20}
    PREFIX_BP = 30

    def __init__(self, text: str, n: int):
        self.toks = list(_tokenize(text))
        self.i = 0
        self.n = n

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> _Tok:
        tok = self.peek()
        if tok.kind != kind:
            where = "end of input" if tok.kind == "end" else repr(tok.text)
            raise ExprSyntaxError(f"expected {kind!r}, found {where}", tok.pos)
        return self.take()

    def parse(self) -> ExprAst:
        node = self.expr(0)
        tok = self.peek()
        if tok.kind != "end":
            raise ExprSyntaxError(f"unexpected {tok.text!r}", tok.pos)
        return node

    def expr(self, min_bp: int) -> ExprAst:
        left = self.prefix()
        while True:
            tok = self.peek()
            bp = self.INFIX.get(tok.kind)
            if bp is None or bp <= min_bp:
                return left
            self.take()
            right = self.expr(bp)
            left = ExprAst(tok.kind, (left, right), pos=tok.pos)

    def prefix(self) -> ExprAst:
        tok = self.peek()
        if tok.kind in ("-", "+"):
            self.take()
            operand = self.expr(self.PREFIX_BP)
            return ExprAst("neg", (operand,), pos=tok.pos) if tok.kind == "-" else operand
        base = self.atom()
        if self.peek().kind == "^":
            caret = self.take()
            base = ExprAst("^", (base,), value=self.exponent(caret.pos), pos=caret.pos)
        return base

    def exponent(self, caret_pos: int) -> int:
        sign = 1
        tok = self.peek()
        if tok.kind in ("-", "+"):
            self.take()
            sign = -1 if tok.kind == "-" else 1
            tok = self.peek()
        if tok.kind == "int":
            self.take()
            return sign * int(tok.text)
        if tok.kind == "end":
            raise ExprSyntaxError("missing exponent", tok.pos)
        raise PowerNotInteger(f"exponent at position {tok.pos} is not an integer literal")

    def atom(self) -> ExprAst:
        tok = self.take()
        if tok.kind == "int":
            return ExprAst("int", value=int(tok.text), pos=tok.pos)
        if tok.kind == "name":
            return self.variable(tok)
        if tok.kind == "(":
            inner = self.expr(0)
            self.expect(")")
            return inner
        where = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ExprSyntaxError(f"unexpected {where}", tok.pos)

    def variable(self, tok: _Tok) -> ExprAst:
        name = tok.text
        if name in ("q", "P"):
            return ExprAst(name, pos=tok.pos)
        m = re.fullmatch(r"L(\d+)", name)
        if m:
            idx = int(m.group(1))
            if idx > self.n:
                raise UnknownVariable(f"{name} at position {tok.pos}: index exceeds N = {self.n}")
            return ExprAst("L", value=idx, pos=tok.pos)
        if name == "L" and self.peek().kind == "int":
            # 'L 0' written with a space
            idx_tok = self.take()
            return self.variable(_Tok("name", f"L{idx_tok.text}", tok.pos))
        raise UnknownVariable(f"unknown variable {name!r} at position {tok.pos}")


def parse_expr(text: str, config: Union[SessionConfig, AlgebraContext]) -> ExprAst:
    return _Parser(text, config.n).parse()


# ---------------------------------------------------------------------------
# lowering
# ---------------------------------------------------------------------------

def _invert(f: QFunction) -> QFunction:
    """``1/f`` when the numerator of ``f`` is ``s q^k`` or ``s q^k (1 - c q^a x)``."""
    ctx = f.ctx
    if f.is_zero():
        raise NotInvertible("division by zero")
    num = f.num
    den = f.den_poly()
    powers = sorted(num)
    s1 = num[powers[0]]
    try:
        s1_inv = s1.inverse()
    except NotInvertible:
        if len(powers) == 1:
            raise
        raise LoweringError("leading q-coefficient of a denominator must be a unit") from None
    shift = {k - powers[0]: c * s1_inv for k, c in den.items()}
    if len(powers) == 1:
        return QFunction(ctx, shift)
    if len(powers) > 2:
        raise LoweringError("denominator is not a product of binomials in q")
    a = powers[1] - powers[0]
    r = -(num[powers[1]] * s1_inv)
    parts = r.unit_parts()
    if parts is None or parts[3] != 1:
        raise LoweringError("denominator binomial must be 1 - c*q^a*x with c a signed root of unity")
    sign, t, x, _ = parts
    M = ctx.root_order
    if sign > 0:
        return QFunction(ctx, shift, [QFactor(a, x, 1, t)])
    if M % 2 == 0:
        return QFunction(ctx, shift, [QFactor(a, x, 1, t + M // 2)])
    # 1/(1 + y) = (1 - y)/(1 - y^2)
    y = QFunction(ctx, {0: 1, a: TorusScalar.unit(ctx, t, x, -1)})
    return QFunction(ctx, shift, [QFactor(2 * a, x ** 2, 1, 2 * t)]) * y


class _Lowering:
    def __init__(self, ctx: AlgebraContext):
        self.ctx = ctx

    def value(self, node: ExprAst) -> QFunction:
        ctx, k = self.ctx, node.kind
        if k == "int":
            return QFunction.const(ctx, node.value)
        if k == "q":
            return QFunction.q_power(ctx, 1)
        if k == "L":
            return QFunction.const(ctx, TorusScalar.unit(ctx, 0, Monomial.var(ctx, node.value)))
        if k == "P":
            raise LoweringError(f"P at position {node.pos} is only allowed in a K-ring expression")
        if k == "neg":
            return -self.value(node.children[0])
        if k in "+-*":
            a, b = (self.value(c) for c in node.children)
            return a + b if k == "+" else (a - b if k == "-" else a * b)
        if k == "/":
            return self.value(node.children[0]) * self.inverse(node.children[1])
        if k == "^":
            if node.value >= 0:
                return self.value(node.children[0]) ** node.value
            return self.inverse(node.children[0]) ** (-node.value)
        raise AssertionError(k)

    def inverse(self, node: ExprAst) -> QFunction:
        k = node.kind
        if k == "*":
            return self.inverse(node.children[0]) * self.inverse(node.children[1])
        if k == "/":
            return self.value(node.children[1]) * self.inverse(node.children[0])
        if k == "neg":
            return -self.inverse(node.children[0])
        if k == "^":
            if node.value >= 0:
                return self.inverse(node.children[0]) ** node.value
            return self.value(node.children[0]) ** (-node.value)
        return _invert(self.value(node))

    def scalar(self, node: ExprAst) -> TorusScalar:
        if "q" in node.variables():
            raise LoweringError("q appears where a torus scalar is expected")
        f = self.value(node)
        if f.den:
            raise LoweringError("expression is not a torus scalar")
        return f.coefficient(0)

    def ppoly(self, node: ExprAst) -> PPolynomial:
        ctx, k = self.ctx, node.kind
        if "P" not in node.variables():
            return PPolynomial(ctx, [self.scalar(node)])
        if k == "P":
            return PPolynomial.P(ctx)
        if k == "neg":
            return -self.ppoly(node.children[0])
        if k in "+-*":
            a, b = (self.ppoly(c) for c in node.children)
            return a + b if k == "+" else (a - b if k == "-" else a * b)
        if k == "/":
            if "P" in node.children[1].variables():
                raise LoweringError("division by a class involving P is not supported")
            return self.ppoly(node.children[0]) * self.scalar(node.children[1]).inverse()
        if k == "^":
            if node.value < 0:
                raise LoweringError("negative powers of P are not supported")
            out = PPolynomial(ctx, [1])
            base = self.ppoly(node.children[0])
            for _ in range(node.value):
                out = out * base
            return out
        raise AssertionError(k)


def _as_monomial(s: TorusScalar) -> Optional[Monomial]:
    parts = s.unit_parts()
    if parts is None:
        return None
    sign, t, x, c = parts
    return x if (sign, t, c) == (1, 0, 1) else None


def lower(node: ExprAst, ctx: AlgebraContext, kind: str = "auto"):
    """Evaluate ``node``; ``kind='auto'`` picks the narrowest of monomial, scalar, qfunction, ppoly."""
    if kind not in KINDS:
        raise LoweringError(f"unknown kind {kind!r}")
    low = _Lowering(ctx)
    names = node.variables()
    if kind == "ppoly" or (kind == "auto" and "P" in names):
        if "q" in names:
            raise LoweringError("q appears in a K-ring expression")
        return low.ppoly(node)
    if kind == "qfunction":
        return low.value(node)
    if kind == "auto" and "q" in names:
        return low.value(node)
    s = low.scalar(node)
    if kind == "scalar":
        return s
    mono = _as_monomial(s)
    if kind == "monomial":
        if mono is None:
            raise LoweringError("expression is not a monomial")
        return mono
    return mono if mono is not None else s


def parse_value(text: str, ctx: AlgebraContext, kind: str = "auto"):
    return lower(parse_expr(text, ctx), ctx, kind)
