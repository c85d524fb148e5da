"""Exact arithmetic substrate.

Everything lives inside an :class:`AlgebraContext`, which fixes the number of
torus variables ``Lambda_0 .. Lambda_N`` and a root order ``M``.  The context
determines two things at once:

* the cyclotomic field ``Q(zeta_M)`` used for coefficients, and
* the exponent lattice ``(1/M) Z`` for the torus variables, so that roots such
  as ``(Lambda_0 / Lambda_1)^(1/m)`` are ordinary monomials whenever ``m | M``.

Exponents are stored internally as integers counted in units of ``1/M``; the
public :attr:`Monomial.exponents` view returns them as exact fractions.

Laurent polynomials keep their terms in a flat dict keyed by
``(exponent_tuple, zeta_power)`` with rational coefficients, where the zeta
power is already reduced below ``phi(M)``.  Multiplying two such polynomials is
then just exponent addition followed by a table lookup for the overflowing
powers of zeta.

Torus scalars are fractions whose denominators are products of binomials
``(1 - x)`` for monomials ``x``.  No multivariate gcd is ever taken: a binomial
factor is cancelled only when it divides the numerator exactly, and equality
falls back to cross-multiplication.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from operator import add as _add
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

from .errors import ConfigurationError, DomainError, NotInvertible, RootOrderExceeded

Rational = Union[int, Fraction]
Exps = tuple  # tuple[int, ...] in units of 1/M

__all__ = [
    "AlgebraContext",
    "Cyclotomic",
    "LaurentPolynomial",
    "Monomial",
    "Rational",
    "TorusScalar",
    "binomial_try_div",
    "cyc_reduce",
    "cyclotomic_polynomial",
    "inv_one_minus",
    "scalar_eq",
]


# ---------------------------------------------------------------------------
# cyclotomic polynomials
# ---------------------------------------------------------------------------

def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _int_poly_divexact(num: list[int], den: Sequence[int]) -> list[int]:
    # den is monic with integer coefficients, lowest degree first
    num = list(num)
    dd = len(den) - 1
    out = [0] * (len(num) - dd)
    for k in range(len(num) - 1, dd - 1, -1):
        c = num[k]
        if c:
            out[k - dd] = c
            for i, v in enumerate(den):
                num[k - dd + i] -= c * v
    if any(num[:dd]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(order: int) -> tuple[int, ...]:
    """Integer coefficients of the ``order``-th cyclotomic polynomial, lowest degree first."""
    if order < 1:
        raise DomainError(f"cyclotomic order must be positive, got {order}")
    poly = [-1] + [0] * (order - 1) + [1]
    for d in _divisors(order)[:-1]:
        poly = _int_poly_divexact(poly, cyclotomic_polynomial(d))
    return tuple(poly)


@lru_cache(maxsize=None)
def _zeta_table(order: int) -> tuple[tuple[int, ...], ...]:
    """Row ``t`` holds the coordinates of ``zeta^t`` in the power basis of ``Q(zeta)``."""
    phi = cyclotomic_polynomial(order)
    deg = len(phi) - 1
    rows = []
    vec = [1] + [0] * (deg - 1)
    for _ in range(order):
        rows.append(tuple(vec))
        top = vec[-1]
        vec = [0] + vec[:-1]
        if top:
            for k in range(deg):
                vec[k] -= top * phi[k]
    return tuple(rows)


# ---------------------------------------------------------------------------
# context
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AlgebraContext:
    """Session parameters: target ``CP^n`` (so ``n + 1`` torus variables) and root order ``M``."""

    n: int
    root_order: int = 1

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ConfigurationError(f"n must be non-negative, got {self.n}")
        if self.root_order < 1:
            raise ConfigurationError(f"root order must be positive, got {self.root_order}")

    @property
    def nvars(self) -> int:
        return self.n + 1

    @property
    def degree(self) -> int:
        """Degree of ``Q(zeta_M)`` over ``Q``."""
        return len(cyclotomic_polynomial(self.root_order)) - 1

    @property
    def zeta_table(self) -> tuple[tuple[int, ...], ...]:
        return _zeta_table(self.root_order)

    def check(self, other: "AlgebraContext") -> None:
        if other is not self and other != self:
            raise ConfigurationError(f"mismatched algebra contexts: {self} vs {other}")

    def require_divisible(self, m: int) -> None:
        if self.root_order % m:
            raise RootOrderExceeded(f"root order {self.root_order} is not divisible by {m}")

    # convenience constructors
    def var(self, i: int) -> "Monomial":
        return Monomial.var(self, i)

    def one(self) -> "TorusScalar":
        return TorusScalar.const(self, 1)


def _check_ctx(a, b) -> None:
    if a.ctx is not b.ctx and a.ctx != b.ctx:
        raise ConfigurationError(f"mismatched algebra contexts: {a.ctx} vs {b.ctx}")


# ---------------------------------------------------------------------------
# cyclotomic numbers
# ---------------------------------------------------------------------------

def _poly_trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(a: list, b: list) -> tuple[list, list]:
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = Fraction(b[-1])
    while len(a) >= len(b) and a:
        c = a[-1] / lead
        shift = len(a) - len(b)
        q[shift] = c
        for i, v in enumerate(b):
            a[shift + i] -= c * v
        a.pop()
        _poly_trim(a)
    return q, a


def _poly_mul(a: list, b: list) -> list:
    out = [Fraction(0)] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_sub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]
    return _poly_trim(out)


class Cyclotomic:
    """An element of ``Q(zeta_M)`` in the power basis ``1, zeta, ..., zeta^(phi(M)-1)``."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Sequence[Rational]):
        deg = len(cyclotomic_polynomial(order)) - 1
        if len(coeffs) != deg:
            raise DomainError(f"expected {deg} coefficients for order {order}, got {len(coeffs)}")
        self.order = order
        self.coeffs = tuple(Fraction(c) for c in coeffs)

    @classmethod
    def rational(cls, order: int, value: Rational) -> "Cyclotomic":
        deg = len(cyclotomic_polynomial(order)) - 1
        return cls(order, [value] + [0] * (deg - 1))

    @classmethod
    def zeta(cls, order: int, power: int = 1) -> "Cyclotomic":
        return cls(order, _zeta_table(order)[power % order])

    def _coerce(self, other) -> "Cyclotomic":
        if isinstance(other, Cyclotomic):
            if other.order != self.order:
                raise ConfigurationError(f"cyclotomic orders differ: {self.order} vs {other.order}")
            return other
        if isinstance(other, (int, Fraction)):
            return Cyclotomic.rational(self.order, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Cyclotomic(self.order, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self) -> "Cyclotomic":
        return Cyclotomic(self.order, [-a for a in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Cyclotomic(self.order, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        raw: dict[int, Fraction] = {}
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        raw[i + j] = raw.get(i + j, 0) + a * b
        return cyc_reduce(raw.items(), self.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int) -> "Cyclotomic":
        if k < 0:
            return self.inverse() ** (-k)
        out = Cyclotomic.rational(self.order, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def inverse(self) -> "Cyclotomic":
        if self.is_zero():
            raise NotInvertible("inverse of zero cyclotomic number")
        # extended Euclid in Q[x] against Phi_M
        r0 = [Fraction(c) for c in cyclotomic_polynomial(self.order)]
        r1 = _poly_trim(list(self.coeffs))
        s0: list = []
        s1: list = [Fraction(1)]
        while len(r1) > 1:
            q, r = _poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        c = r1[0]
        return cyc_reduce(((k, v / c) for k, v in enumerate(s1)), self.order)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise DomainError(f"{self!r} is not rational")
        return self.coeffs[0]

    def root_of_unity(self) -> Optional[tuple[int, int]]:
        """Return ``(sign, t)`` with ``self == sign * zeta^t`` if such a pair exists."""
        table = _zeta_table(self.order)
        for t, row in enumerate(table):
            if all(a == b for a, b in zip(self.coeffs, row)):
                return 1, t
            if all(a == -b for a, b in zip(self.coeffs, row)):
                return -1, t
        return None

    def to_modular(self, prime: int, root: int) -> int:
        """Image under ``zeta -> root`` in ``Z/prime``; ``root`` must be a primitive M-th root mod ``prime``."""
        acc = 0
        for k, c in enumerate(self.coeffs):
            if c:
                acc += c.numerator * pow(c.denominator, -1, prime) * pow(root, k, prime)
        return acc % prime

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        if isinstance(other, Cyclotomic):
            return self.order == other.order and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash((self.order, self.coeffs))

    def __repr__(self) -> str:
        return f"Cyclotomic({self.order}, {[str(c) for c in self.coeffs]})"


def cyc_reduce(raw: Iterable[tuple[int, Rational]], order: int) -> Cyclotomic:
    """Canonical element of ``Q(zeta_order)`` for ``sum(coeff * zeta^power)``."""
    if order < 1:
        raise DomainError(f"order must be positive, got {order}")
    table = _zeta_table(order)
    deg = len(table[0])
    out = [Fraction(0)] * deg
    for power, coeff in raw:
        if not coeff:
            continue
        for k, v in enumerate(table[power % order]):
            if v:
                out[k] += coeff * v
    return Cyclotomic(order, out)


# ---------------------------------------------------------------------------
# monomials
# ---------------------------------------------------------------------------

class Monomial:
    """``prod Lambda_a^e_a`` with exponents in ``(1/M) Z``."""

    __slots__ = ("ctx", "exps")

    def __init__(self, ctx: AlgebraContext, exponents: Iterable[Rational]):
        exps = []
        for e in exponents:
            scaled = Fraction(e) * ctx.root_order
            if scaled.denominator != 1:
                raise RootOrderExceeded(
                    f"exponent {e} needs a denominator not dividing root order {ctx.root_order}"
                )
            exps.append(int(scaled))
        if len(exps) != ctx.nvars:
            raise ConfigurationError(f"expected {ctx.nvars} exponents, got {len(exps)}")
        self.ctx = ctx
        self.exps = tuple(exps)

    @classmethod
    def _raw(cls, ctx: AlgebraContext, exps: Exps) -> "Monomial":
        obj = cls.__new__(cls)
        obj.ctx = ctx
        obj.exps = exps
        return obj

    @classmethod
    def identity(cls, ctx: AlgebraContext) -> "Monomial":
        return cls._raw(ctx, (0,) * ctx.nvars)

    @classmethod
    def var(cls, ctx: AlgebraContext, i: int) -> "Monomial":
        if not 0 <= i < ctx.nvars:
            raise DomainError(f"variable index {i} out of range 0..{ctx.n}")
        exps = [0] * ctx.nvars
        exps[i] = ctx.root_order
        return cls._raw(ctx, tuple(exps))

    @classmethod
    def ratio(cls, ctx: AlgebraContext, i: int, j: int) -> "Monomial":
        """``Lambda_i / Lambda_j``."""
        return cls.var(ctx, i) / cls.var(ctx, j)

    @property
    def exponents(self) -> tuple[Fraction, ...]:
        M = self.ctx.root_order
        return tuple(Fraction(e, M) for e in self.exps)

    def is_identity(self) -> bool:
        return not any(self.exps)

    def is_oriented(self) -> bool:
        """True when the first nonzero exponent is positive."""
        for e in self.exps:
            if e:
                return e > 0
        return True

    def __mul__(self, other: "Monomial") -> "Monomial":
        if not isinstance(other, Monomial):
            return NotImplemented
        _check_ctx(self, other)
        return Monomial._raw(self.ctx, tuple(map(_add, self.exps, other.exps)))

    def __truediv__(self, other: "Monomial") -> "Monomial":
        if not isinstance(other, Monomial):
            return NotImplemented
        _check_ctx(self, other)
        return Monomial._raw(self.ctx, tuple(a - b for a, b in zip(self.exps, other.exps)))

    def inverse(self) -> "Monomial":
        return Monomial._raw(self.ctx, tuple(-e for e in self.exps))

    def __pow__(self, k: Rational) -> "Monomial":
        k = Fraction(k)
        out = []
        for e in self.exps:
            v = e * k
            if v.denominator != 1:
                raise RootOrderExceeded(
                    f"power {k} of {self} leaves the exponent lattice of order {self.ctx.root_order}"
                )
            out.append(int(v))
        return Monomial._raw(self.ctx, tuple(out))

    def root(self, a: int) -> "Monomial":
        """Principal ``a``-th root: every exponent divided by ``a``."""
        return self ** Fraction(1, a)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Monomial):
            return NotImplemented
        return self.exps == other.exps and self.ctx == other.ctx

    def __hash__(self) -> int:
        return hash(self.exps)

    def __lt__(self, other: "Monomial") -> bool:
        return self.exps < other.exps

    def __repr__(self) -> str:
        return f"Monomial({[str(e) for e in self.exponents]})"


# ---------------------------------------------------------------------------
# Laurent polynomials over Q(zeta_M)
# ---------------------------------------------------------------------------

def _canon(ctx: AlgebraContext, raw: Mapping) -> dict:
    deg = ctx.degree
    M = ctx.root_order
    table = None
    out: dict = {}
    for (e, t), c in raw.items():
        if not c:
            continue
        if 0 <= t < deg:
            out[(e, t)] = out.get((e, t), 0) + c
            continue
        if table is None:
            table = ctx.zeta_table
        for k, v in enumerate(table[t % M]):
            if v:
                out[(e, k)] = out.get((e, k), 0) + c * v
    return {k: v for k, v in out.items() if v}


def _as_coeff_terms(ctx: AlgebraContext, value) -> list[tuple[int, Fraction]]:
    if isinstance(value, Cyclotomic):
        if value.order != ctx.root_order:
            raise ConfigurationError(f"cyclotomic order {value.order} != root order {ctx.root_order}")
        return [(t, c) for t, c in enumerate(value.coeffs) if c]
    return [(0, value)] if value else []


class LaurentPolynomial:
    """Finite sum of ``coefficient * monomial`` with coefficients in ``Q(zeta_M)``."""

    __slots__ = ("ctx", "_terms")

    def __init__(self, ctx: AlgebraContext, terms: Optional[Mapping[Monomial, object]] = None):
        raw: dict = {}
        for mono, coeff in (terms or {}).items():
            if mono.ctx != ctx:
                raise ConfigurationError("monomial from another context")
            for t, c in _as_coeff_terms(ctx, coeff):
                key = (mono.exps, t)
                raw[key] = raw.get(key, 0) + c
        self.ctx = ctx
        self._terms = _canon(ctx, raw)

    @classmethod
    def _from_raw(cls, ctx: AlgebraContext, raw: Mapping, canonical: bool = False) -> "LaurentPolynomial":
        obj = cls.__new__(cls)
        obj.ctx = ctx
        obj._terms = dict(raw) if canonical else _canon(ctx, raw)
        return obj

    @classmethod
    def zero(cls, ctx: AlgebraContext) -> "LaurentPolynomial":
        return cls._from_raw(ctx, {}, canonical=True)

    @classmethod
    def const(cls, ctx: AlgebraContext, value) -> "LaurentPolynomial":
        return cls(ctx, {Monomial.identity(ctx): value})

    @classmethod
    def monomial(cls, mono: Monomial, coeff=1) -> "LaurentPolynomial":
        return cls(mono.ctx, {mono: coeff})

    @classmethod
    def unit(cls, ctx: AlgebraContext, zeta: int, mono: Monomial, coeff: Rational = 1) -> "LaurentPolynomial":
        """``coeff * zeta^zeta * mono``."""
        return cls._from_raw(ctx, {(mono.exps, zeta % ctx.root_order): coeff})

    @classmethod
    def binomial_product(cls, ctx: AlgebraContext, factors: Iterable[tuple[Exps, int]]) -> "LaurentPolynomial":
        """Expand ``prod (1 - x)^k`` over raw exponent tuples ``x``."""
        terms = {((0,) * ctx.nvars, 0): 1}
        for e, k in factors:
            for _ in range(k):
                terms = _times_one_minus(terms, e, 0)
        return cls._from_raw(ctx, terms, canonical=True)

    # -- views ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self.monomials())

    def monomials(self) -> list[Monomial]:
        seen = sorted({e for e, _ in self._terms})
        return [Monomial._raw(self.ctx, e) for e in seen]

    def coefficient(self, mono: Monomial) -> Cyclotomic:
        vec = [0] * self.ctx.degree
        for t in range(self.ctx.degree):
            vec[t] = self._terms.get((mono.exps, t), 0)
        return Cyclotomic(self.ctx.root_order, vec)

    def terms(self) -> list[tuple[Monomial, Cyclotomic]]:
        """``(monomial, coefficient)`` pairs in lexicographic exponent order."""
        return [(m, self.coefficient(m)) for m in self.monomials()]

    def single_term(self) -> Optional[tuple[Monomial, Cyclotomic]]:
        monos = {e for e, _ in self._terms}
        if len(monos) != 1:
            return None
        m = Monomial._raw(self.ctx, monos.pop())
        return m, self.coefficient(m)

    def is_constant(self) -> bool:
        zero = (0,) * self.ctx.nvars
        return all(e == zero for e, _ in self._terms)

    def is_rational_constant(self) -> bool:
        zero = (0,) * self.ctx.nvars
        return all(e == zero and t == 0 for e, t in self._terms)

    def is_integral(self) -> bool:
        """True when every exponent is an integer and every coefficient is rational."""
        M = self.ctx.root_order
        return all(t == 0 and all(x % M == 0 for x in e) for e, t in self._terms)

    # -- arithmetic ----------------------------------------------------
    def _coerce(self, other) -> "LaurentPolynomial":
        if isinstance(other, LaurentPolynomial):
            _check_ctx(self, other)
            return other
        if isinstance(other, (int, Fraction, Cyclotomic)):
            return LaurentPolynomial.const(self.ctx, other)
        if isinstance(other, Monomial):
            return LaurentPolynomial.monomial(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other._terms:
            return self
        out = dict(self._terms)
        for k, c in other._terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return LaurentPolynomial._from_raw(self.ctx, out, canonical=True)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPolynomial":
        return LaurentPolynomial._from_raw(self.ctx, {k: -c for k, c in self._terms.items()}, canonical=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Rational) -> "LaurentPolynomial":
        if not c:
            return LaurentPolynomial.zero(self.ctx)
        return LaurentPolynomial._from_raw(self.ctx, {k: v * c for k, v in self._terms.items()}, canonical=True)

    def shift(self, exps: Exps, zeta: int = 0) -> "LaurentPolynomial":
        """Multiply by ``zeta^zeta * x`` where ``x`` has raw exponents ``exps``."""
        if zeta % self.ctx.root_order == 0:
            return LaurentPolynomial._from_raw(
                self.ctx, {(tuple(map(_add, e, exps)), t): c for (e, t), c in self._terms.items()}, canonical=True
            )
        return LaurentPolynomial._from_raw(
            self.ctx, {(tuple(map(_add, e, exps)), t + zeta): c for (e, t), c in self._terms.items()}
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, Monomial):
            _check_ctx(self, other)
            return self.shift(other.exps)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._terms, other._terms
        if not a or not b:
            return LaurentPolynomial.zero(self.ctx)
        if len(a) < len(b):
            a, b = b, a
        out: dict = {}
        get = out.get
        for (e2, t2), c2 in b.items():
            for (e1, t1), c1 in a.items():
                key = (tuple(map(_add, e1, e2)), t1 + t2)
                out[key] = get(key, 0) + c1 * c2
        return LaurentPolynomial._from_raw(self.ctx, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "LaurentPolynomial":
        if k < 0:
            raise DomainError("negative power of a Laurent polynomial")
        out = LaurentPolynomial.const(self.ctx, 1)
        for _ in range(k):
            out = out * self
        return out

    def times_one_minus(self, exps: Exps, zeta: int = 0) -> "LaurentPolynomial":
        """Multiply by ``(1 - zeta^zeta * x)``."""
        raw = _times_one_minus(self._terms, exps, zeta)
        if zeta % self.ctx.root_order:
            return LaurentPolynomial._from_raw(self.ctx, raw)
        return LaurentPolynomial._from_raw(self.ctx, raw, canonical=True)

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        from .serialize import laurent_text

        return f"LaurentPolynomial({laurent_text(self)})"


def _times_one_minus(terms: Mapping, exps: Exps, zeta: int) -> dict:
    out = dict(terms)
    for (e, t), c in terms.items():
        key = (tuple(map(_add, e, exps)), t + zeta)
        v = out.get(key, 0) - c
        if v:
            out[key] = v
        else:
            out.pop(key, None)
    return out


def binomial_try_div(p: LaurentPolynomial, factor: Monomial) -> Optional[LaurentPolynomial]:
    """Quotient of ``p`` by ``(1 - factor)``, or ``None`` when the division is not exact.

    Terms are grouped into chains ``base * factor^k``; along a chain the quotient
    coefficients are partial sums, and exact divisibility means every chain sums
    to zero.
    """
    _check_ctx(p, factor)
    if factor.is_identity():
        raise DomainError("division by (1 - 1)")
    v = factor.exps
    pivot = next(k for k, x in enumerate(v) if x)
    vp = v[pivot]
    chains: dict = {}
    for (e, t), c in p._terms.items():
        k = e[pivot] // vp
        base = tuple(a - k * b for a, b in zip(e, v))
        chains.setdefault((base, t), {})[k] = c
    out: dict = {}
    for (base, t), chain in chains.items():
        if sum(chain.values()) != 0:
            return None
        lo, hi = min(chain), max(chain)
        s = 0
        for k in range(lo, hi):
            s += chain.get(k, 0)
            if s:
                out[(tuple(a + k * b for a, b in zip(base, v)), t)] = s
    return LaurentPolynomial._from_raw(p.ctx, out, canonical=True)


# ---------------------------------------------------------------------------
# torus scalars
# ---------------------------------------------------------------------------

def _orient(exps: Exps) -> bool:
    for e in exps:
        if e:
            return e > 0
    raise DomainError("binomial factor (1 - 1) is zero")


class TorusScalar:
    """``num / prod (1 - x)^k`` with ``num`` a Laurent polynomial and ``x`` monomials.

    Each denominator monomial is oriented (first nonzero exponent positive),
    using ``1 / (1 - x) = -x^-1 / (1 - x^-1)``.  A monomial denominator unit is
    absorbed into the numerator at construction, since monomials are units of
    the Laurent ring.
    """

    __slots__ = ("ctx", "num", "den")

    def __init__(
        self,
        num: LaurentPolynomial,
        den_factors: Iterable = (),
        den_unit: Optional[Monomial] = None,
        *,
        cancel: bool = True,
    ):
        ctx = num.ctx
        den: dict = {}
        for item in den_factors:
            mono, mult = item if isinstance(item, tuple) else (item, 1)
            _check_ctx(num, mono)
            if mult < 0:
                raise DomainError("negative multiplicity")
            if mult:
                den[mono.exps] = den.get(mono.exps, 0) + mult
        if den_unit is not None:
            _check_ctx(num, den_unit)
            num = num.shift(den_unit.inverse().exps)
        obj = TorusScalar._build(ctx, num, den, cancel=cancel)
        self.ctx, self.num, self.den = obj.ctx, obj.num, obj.den

    @classmethod
    def _build(cls, ctx: AlgebraContext, num: LaurentPolynomial, den: Mapping, cancel: bool = True) -> "TorusScalar":
        oriented: dict = {}
        for e, k in den.items():
            if not k:
                continue
            if not _orient(e):
                inv = tuple(-x for x in e)
                for _ in range(k):
                    num = -num.shift(inv)
                e = inv
            oriented[e] = oriented.get(e, 0) + k
        return cls._raw(ctx, num, oriented, cancel)

    @classmethod
    def _raw(cls, ctx: AlgebraContext, num: LaurentPolynomial, den: Mapping, cancel: bool = True) -> "TorusScalar":
        obj = cls.__new__(cls)
        obj.ctx = ctx
        if num.is_zero():
            obj.num, obj.den = num, ()
            return obj
        den = {e: k for e, k in den.items() if k}
        if cancel and den:
            for e in sorted(den):
                x = Monomial._raw(ctx, e)
                while den[e]:
                    q = binomial_try_div(num, x)
                    if q is None:
                        break
                    num = q
                    den[e] -= 1
            den = {e: k for e, k in den.items() if k}
        obj.num = num
        obj.den = tuple(sorted(den.items()))
        return obj

    # -- constructors ----------------------------------------------------
    @classmethod
    def const(cls, ctx: AlgebraContext, value) -> "TorusScalar":
        return cls._raw(ctx, LaurentPolynomial.const(ctx, value), {})

    @classmethod
    def zero(cls, ctx: AlgebraContext) -> "TorusScalar":
        return cls._raw(ctx, LaurentPolynomial.zero(ctx), {})

    @classmethod
    def unit(cls, ctx: AlgebraContext, zeta: int, mono: Monomial, coeff: Rational = 1) -> "TorusScalar":
        return cls._raw(ctx, LaurentPolynomial.unit(ctx, zeta, mono, coeff), {})

    @classmethod
    def from_laurent(cls, num: LaurentPolynomial) -> "TorusScalar":
        return cls._raw(num.ctx, num, {})

    @classmethod
    def binomial(cls, mono: Monomial, zeta: int = 0) -> "TorusScalar":
        """``1 - zeta^zeta * mono``."""
        ctx = mono.ctx
        return cls._raw(ctx, LaurentPolynomial.const(ctx, 1).times_one_minus(mono.exps, zeta), {})

    @classmethod
    def inverse_binomials(cls, ctx: AlgebraContext, factors: Iterable[Monomial]) -> "TorusScalar":
        """``1 / prod (1 - x)`` for the given monomials."""
        den: dict = {}
        for x in factors:
            den[x.exps] = den.get(x.exps, 0) + 1
        return cls._build(ctx, LaurentPolynomial.const(ctx, 1), den, cancel=False)

    # -- views -----------------------------------------------------------
    @property
    def den_factors(self) -> tuple[tuple[Monomial, int], ...]:
        return tuple((Monomial._raw(self.ctx, e), k) for e, k in self.den)

    @property
    def den_unit(self) -> Monomial:
        return Monomial.identity(self.ctx)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_laurent(self) -> bool:
        return not self.den

    def as_laurent(self) -> LaurentPolynomial:
        if self.den:
            raise DomainError("scalar has a nontrivial denominator")
        return self.num

    def den_poly(self) -> LaurentPolynomial:
        return LaurentPolynomial.binomial_product(self.ctx, self.den)

    def unit_parts(self) -> Optional[tuple[int, int, Monomial, Fraction]]:
        """If the scalar is ``c * zeta^t * x`` with ``c`` rational, return ``(sign, t, x, |c|)``.

        Only cyclotomic coefficients of the form ``r * (+-zeta^t)`` are recognized.
        """
        if self.den:
            return None
        st = self.num.single_term()
        if st is None:
            return None
        mono, coeff = st
        nz = [(t, c) for t, c in enumerate(coeff.coeffs) if c]
        if len(nz) == 1 and nz[0][0] == 0:
            c = nz[0][1]
            return (1 if c > 0 else -1), 0, mono, abs(c)
        # scale to a candidate root of unity using the first nonzero coordinate
        for t, row in enumerate(self.ctx.zeta_table):
            pivot = next(k for k, v in enumerate(row) if v)
            if not coeff.coeffs[pivot]:
                continue
            r = coeff.coeffs[pivot] / row[pivot]
            if all(c == r * v for c, v in zip(coeff.coeffs, row)):
                return (1 if r > 0 else -1), t, mono, abs(r)
        return None

    # -- arithmetic ------------------------------------------------------
    def _coerce(self, other) -> "TorusScalar":
        if isinstance(other, TorusScalar):
            _check_ctx(self, other)
            return other
        if isinstance(other, (int, Fraction, Cyclotomic)):
            return TorusScalar.const(self.ctx, other)
        if isinstance(other, Monomial):
            return TorusScalar._raw(self.ctx, LaurentPolynomial.monomial(other), {})
        if isinstance(other, LaurentPolynomial):
            _check_ctx(self, other)
            return TorusScalar._raw(self.ctx, other, {})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.den == other.den:
            return TorusScalar._raw(self.ctx, self.num + other.num, dict(self.den))
        da, db = dict(self.den), dict(other.den)
        common = dict(da)
        for e, k in db.items():
            common[e] = max(common.get(e, 0), k)
        miss_a = [(e, common[e] - da.get(e, 0)) for e in common]
        miss_b = [(e, common[e] - db.get(e, 0)) for e in common]
        na = _mul_binomials(self.num, miss_a)
        nb = _mul_binomials(other.num, miss_b)
        return TorusScalar._raw(self.ctx, na + nb, common)

    __radd__ = __add__

    def __neg__(self) -> "TorusScalar":
        return TorusScalar._raw(self.ctx, -self.num, dict(self.den), cancel=False)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return TorusScalar.zero(self.ctx)
            return TorusScalar._raw(self.ctx, self.num.scale(other), dict(self.den), cancel=False)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return TorusScalar.zero(self.ctx)
        den = dict(self.den)
        for e, k in other.den:
            den[e] = den.get(e, 0) + k
        num = self.num * other.num
        return TorusScalar._raw(self.ctx, num, den, cancel=bool(den) and len(num._terms) > 1)

    __rmul__ = __mul__

    def mul_unit(self, zeta: int, exps: Exps, coeff: Rational = 1) -> "TorusScalar":
        """Multiply by ``coeff * zeta^zeta * x`` (cheap: no cancellation needed)."""
        num = self.num.shift(exps, zeta)
        if coeff != 1:
            num = num.scale(coeff)
        return TorusScalar._raw(self.ctx, num, dict(self.den), cancel=False)

    def inverse(self) -> "TorusScalar":
        """Inverse when the numerator is a unit or a unit times one binomial; else :class:`NotInvertible`."""
        ctx = self.ctx
        if self.is_zero():
            raise NotInvertible("inverse of zero")
        base = TorusScalar._raw(ctx, self.den_poly(), {}, cancel=False)
        st = self.num.single_term()
        if st is not None:
            mono, coeff = st
            inv = LaurentPolynomial._from_raw(
                ctx, {(mono.inverse().exps, t): c for t, c in enumerate(coeff.inverse().coeffs) if c}
            )
            return TorusScalar._raw(ctx, base.num * inv, {}, cancel=False)
        monos = self.num.monomials()
        if len(monos) == 2:
            m1, m2 = monos
            c1, c2 = self.num.coefficient(m1), self.num.coefficient(m2)
            ratio = -(c2 / c1)
            rou = ratio.root_of_unity()
            if rou is not None:
                sign, t = rou
                x = m2 / m1
                lead = TorusScalar._raw(
                    ctx,
                    LaurentPolynomial._from_raw(
                        ctx, {(m1.inverse().exps, k): c for k, c in enumerate(c1.inverse().coeffs) if c}
                    ),
                    {},
                    cancel=False,
                )
                if sign > 0:
                    tail = inv_one_minus(ctx, t, x)
                else:
                    # 1/(1 + w) = (1 - w)/(1 - w^2)
                    tail = TorusScalar.binomial(x, t) * inv_one_minus(ctx, 2 * t, x ** 2)
                return base * lead * tail
        raise NotInvertible("numerator is not a unit times a binomial")

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int) -> "TorusScalar":
        if k < 0:
            return self.inverse() ** (-k)
        out = TorusScalar.const(self.ctx, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return scalar_eq(self, other)

    __hash__ = None  # equality is semantic, not structural

    def __repr__(self) -> str:
        from .serialize import scalar_text

        return f"TorusScalar({scalar_text(self)})"


def _mul_binomials(p: LaurentPolynomial, factors: Iterable[tuple[Exps, int]]) -> LaurentPolynomial:
    terms = p._terms
    for e, k in factors:
        for _ in range(k):
            terms = _times_one_minus(terms, e, 0)
    return LaurentPolynomial._from_raw(p.ctx, terms, canonical=True)


def scalar_eq(a: TorusScalar, b: TorusScalar) -> bool:
    """Equality by cross-multiplication after removing shared denominator factors."""
    _check_ctx(a, b)
    if a.den == b.den:
        return a.num == b.num
    da, db = dict(a.den), dict(b.den)
    only_a, only_b = [], []
    for e in set(da) | set(db):
        k = da.get(e, 0) - db.get(e, 0)
        if k > 0:
            only_a.append((e, k))
        elif k < 0:
            only_b.append((e, -k))
    return _mul_binomials(a.num, only_b) == _mul_binomials(b.num, only_a)


def inv_one_minus(ctx: AlgebraContext, zeta: int, x: Monomial) -> TorusScalar:
    """``1 / (1 - zeta^zeta * x)`` with a binomial-only denominator.

    For a nontrivial root of unity ``w`` of order ``o`` this uses
    ``prod_{k<o} (1 - w^k x) = 1 - x^o`` to move the twist into the numerator.
    """
    M = ctx.root_order
    zeta %= M
    if zeta == 0:
        if x.is_identity():
            raise NotInvertible("1 - 1 is zero")
        return TorusScalar._build(ctx, LaurentPolynomial.const(ctx, 1), {x.exps: 1}, cancel=False)
    if x.is_identity():
        c = Cyclotomic.rational(M, 1) - Cyclotomic.zeta(M, zeta)
        return TorusScalar.const(ctx, c.inverse())
    o = M // math.gcd(zeta, M)
    num = {((0,) * ctx.nvars, 0): 1}
    for k in range(o):
        if k != 1:
            num = _times_one_minus(num, x.exps, zeta * k)
    numer = LaurentPolynomial._from_raw(ctx, num)
    return TorusScalar._build(ctx, numer, {(x ** o).exps: 1}, cancel=False)
