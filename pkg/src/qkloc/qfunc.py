"""Rational functions of the quantization variable ``q``.

A :class:`QFunction` is ``N(q) / prod (1 - zeta^t q^a mu)^k`` where ``N`` is a
Laurent polynomial in ``q`` with :class:`TorusScalar` coefficients.  The
denominator is never expanded into a single polynomial except transiently
(cross-multiplication, K+/K- splitting); its factors carry the pole structure
that residues and partial fractions need.

The twist ``zeta^t`` on a factor is zero for everything the J-function
produces.  It is present so that elementary fractions ``1/(1 - q nu)`` at any
root ``nu`` of ``(1 - q^a mu)`` can be written down and recombined exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Iterable, Mapping, Optional, Union

from .algebra import (
    AlgebraContext,
    Cyclotomic,
    LaurentPolynomial,
    Monomial,
    TorusScalar,
    inv_one_minus,
    scalar_eq,
)
from .errors import ConfigurationError, DomainError, NotAPole, PoleHit, RootOrderExceeded, UnsupportedOrder

__all__ = [
    "FractionTerm",
    "PartialFractionForm",
    "PoleLocus",
    "QFactor",
    "QFunction",
    "QPoint",
    "qf_arith",
    "qf_eval",
    "qf_partial_fractions",
    "qf_residue",
    "qf_split_kpm",
]

QPoly = dict  # dict[int, TorusScalar]


@dataclass(frozen=True)
class QFactor:
    """``(1 - zeta^zeta * q^a * mu) ** multiplicity``."""

    a: int
    mu: Monomial
    multiplicity: int = 1
    zeta: int = 0

    def __post_init__(self) -> None:
        if self.a < 1:
            raise DomainError(f"q-power of a denominator factor must be >= 1, got {self.a}")
        if self.multiplicity < 1:
            raise DomainError("multiplicity must be >= 1")
        object.__setattr__(self, "zeta", self.zeta % self.mu.ctx.root_order)

    @property
    def key(self) -> tuple:
        return (self.a, self.zeta, self.mu.exps)

    def vanishes_at(self, point: "QPoint") -> bool:
        M = self.mu.ctx.root_order
        return (self.zeta + point.zeta * self.a) % M == 0 and (point.mono ** self.a * self.mu).is_identity()


@dataclass(frozen=True)
class QPoint:
    """The evaluation point ``q = zeta^zeta * mono``."""

    zeta: int
    mono: Monomial

    def __post_init__(self) -> None:
        object.__setattr__(self, "zeta", self.zeta % self.mono.ctx.root_order)

    @classmethod
    def of(cls, mono: Monomial) -> "QPoint":
        return cls(0, mono)


@dataclass(frozen=True)
class PoleLocus:
    """Linear pole base ``nu = zeta^zeta_exp * root``; ``1/(1 - q nu)`` has its pole at ``q = 1/nu``."""

    zeta_exp: int
    root: Monomial

    def __post_init__(self) -> None:
        object.__setattr__(self, "zeta_exp", self.zeta_exp % self.root.ctx.root_order)

    @classmethod
    def principal(cls, a: int, mu: Monomial) -> "PoleLocus":
        """Canonical root of ``1 - q^a mu``: no twist, exponents of ``mu`` divided by ``a``."""
        mu.ctx.require_divisible(a)
        return cls(0, mu.root(a))

    def pole(self) -> QPoint:
        return QPoint(-self.zeta_exp, self.root.inverse())

    def is_root_of_unity(self) -> bool:
        return self.root.is_identity()

    @property
    def key(self) -> tuple:
        return (self.root.exps, self.zeta_exp)


# ---------------------------------------------------------------------------
# q-polynomial helpers (dict power -> TorusScalar)
# ---------------------------------------------------------------------------

def _clean(p: Mapping[int, TorusScalar]) -> QPoly:
    return {k: v for k, v in p.items() if not v.is_zero()}


def _qp_add(p: QPoly, r: QPoly) -> QPoly:
    out = dict(p)
    for k, v in r.items():
        out[k] = out[k] + v if k in out else v
    return _clean(out)


def _qp_neg(p: QPoly) -> QPoly:
    return {k: -v for k, v in p.items()}


def _qp_mul(p: QPoly, r: QPoly) -> QPoly:
    out: dict = {}
    for i, a in p.items():
        for j, b in r.items():
            out[i + j] = out[i + j] + a * b if i + j in out else a * b
    return _clean(out)


def _qp_times_factor(p: QPoly, a: int, zeta: int, exps: tuple, k: int = 1) -> QPoly:
    for _ in range(k):
        out = dict(p)
        for e, v in p.items():
            shifted = v.mul_unit(zeta, exps, -1)
            out[e + a] = out[e + a] + shifted if e + a in out else shifted
        p = _clean(out)
    return p


def _qp_try_div(p: QPoly, a: int, zeta: int, exps: tuple) -> Optional[QPoly]:
    """Quotient of ``p`` by ``(1 - zeta^zeta q^a x)`` or ``None``."""
    if not p:
        return {}
    lo, hi = min(p), max(p)
    if hi - lo < a:
        return None
    s: dict = {}
    for k in range(lo, hi - a + 1):
        v = p.get(k)
        prev = s.get(k - a)
        if prev is not None:
            carry = prev.mul_unit(zeta, exps)
            v = carry if v is None else v + carry
        if v is not None and not v.is_zero():
            s[k] = v
    for k in range(hi - a + 1, hi + 1):
        v = p.get(k)
        prev = s.get(k - a)
        carry = prev.mul_unit(zeta, exps) if prev is not None else None
        total = v if carry is None else (carry if v is None else v + carry)
        if total is not None and not total.is_zero():
            return None
    return s


def _scalar(ctx: AlgebraContext, value) -> TorusScalar:
    if isinstance(value, TorusScalar):
        return value
    if isinstance(value, LaurentPolynomial):
        return TorusScalar.from_laurent(value)
    if isinstance(value, Monomial):
        return TorusScalar.from_laurent(LaurentPolynomial.monomial(value))
    return TorusScalar.const(ctx, value)


# ---------------------------------------------------------------------------
# QFunction
# ---------------------------------------------------------------------------

class QFunction:
    """``num(q) / prod QFactor`` with torus-scalar coefficients."""

    __slots__ = ("ctx", "_num", "_den")

    def __init__(
        self,
        ctx: AlgebraContext,
        num: Optional[Mapping[int, object]] = None,
        den: Iterable[QFactor] = (),
        *,
        cancel: bool = True,
    ):
        poly = _clean({k: _scalar(ctx, v) for k, v in (num or {}).items()})
        dd: dict = {}
        for f in den:
            if f.mu.ctx != ctx:
                raise ConfigurationError("denominator factor from another context")
            dd[f.key] = dd.get(f.key, 0) + f.multiplicity
        self.ctx = ctx
        self._num, self._den = _normalize(ctx, poly, dd, cancel)

    @classmethod
    def _raw(cls, ctx: AlgebraContext, num: QPoly, den: Mapping, cancel: bool = True) -> "QFunction":
        obj = cls.__new__(cls)
        obj.ctx = ctx
        obj._num, obj._den = _normalize(ctx, num, den, cancel)
        return obj

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, ctx: AlgebraContext) -> "QFunction":
        return cls._raw(ctx, {}, {})

    @classmethod
    def const(cls, ctx: AlgebraContext, value) -> "QFunction":
        return cls._raw(ctx, _clean({0: _scalar(ctx, value)}), {})

    @classmethod
    def q_power(cls, ctx: AlgebraContext, k: int, coeff=1) -> "QFunction":
        return cls._raw(ctx, _clean({k: _scalar(ctx, coeff)}), {})

    @classmethod
    def dilaton(cls, ctx: AlgebraContext) -> "QFunction":
        """``1 - q``."""
        return cls(ctx, {0: 1, 1: -1})

    @classmethod
    def inverse_factor(cls, factor: QFactor, coeff=1) -> "QFunction":
        ctx = factor.mu.ctx
        return cls._raw(ctx, _clean({0: _scalar(ctx, coeff)}), {factor.key: factor.multiplicity}, cancel=False)

    @classmethod
    def from_polynomial(cls, ctx: AlgebraContext, num: Mapping[int, object]) -> "QFunction":
        return cls(ctx, num)

    # -- views ----------------------------------------------------------------
    @property
    def num(self) -> dict[int, TorusScalar]:
        return dict(self._num)

    @property
    def den(self) -> tuple[QFactor, ...]:
        return tuple(
            QFactor(a, Monomial._raw(self.ctx, e), k, z) for (a, z, e), k in sorted(self._den.items())
        )

    def is_zero(self) -> bool:
        return not self._num

    def is_laurent(self) -> bool:
        return not self._den

    def coefficient(self, k: int) -> TorusScalar:
        """Coefficient of ``q^k`` in the numerator."""
        return self._num.get(k, TorusScalar.zero(self.ctx))

    def den_degree(self) -> int:
        return sum(a * k for (a, _, _), k in self._den.items())

    def den_poly(self) -> QPoly:
        p: QPoly = {0: TorusScalar.const(self.ctx, 1)}
        for (a, z, e), k in sorted(self._den.items()):
            p = _qp_times_factor(p, a, z, e, k)
        return p

    # -- arithmetic -----------------------------------------------------------
    def _coerce(self, other) -> "QFunction":
        if isinstance(other, QFunction):
            if other.ctx != self.ctx:
                raise ConfigurationError("mismatched algebra contexts")
            return other
        if isinstance(other, (int, Fraction, Cyclotomic, TorusScalar, LaurentPolynomial, Monomial)):
            return QFunction.const(self.ctx, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self._den == other._den:
            return QFunction._raw(self.ctx, _qp_add(self._num, other._num), self._den)
        common = dict(self._den)
        for key, k in other._den.items():
            common[key] = max(common.get(key, 0), k)
        na = self._num
        nb = other._num
        for key, k in common.items():
            a, z, e = key
            ka = k - self._den.get(key, 0)
            kb = k - other._den.get(key, 0)
            if ka:
                na = _qp_times_factor(na, a, z, e, ka)
            if kb:
                nb = _qp_times_factor(nb, a, z, e, kb)
        return QFunction._raw(self.ctx, _qp_add(na, nb), common)

    __radd__ = __add__

    def __neg__(self) -> "QFunction":
        return QFunction._raw(self.ctx, _qp_neg(self._num), self._den, cancel=False)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Cyclotomic, TorusScalar, LaurentPolynomial, Monomial)):
            s = _scalar(self.ctx, other)
            return QFunction._raw(self.ctx, _clean({k: v * s for k, v in self._num.items()}), self._den,
                                  cancel=False)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        den = dict(self._den)
        for key, k in other._den.items():
            den[key] = den.get(key, 0) + k
        return QFunction._raw(self.ctx, _qp_mul(self._num, other._num), den)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "QFunction":
        if k < 0:
            raise DomainError("negative powers of a QFunction are not supported")
        out = QFunction.const(self.ctx, 1)
        for _ in range(k):
            out = out * self
        return out

    def times_factor(self, factor: QFactor) -> "QFunction":
        """Multiply by ``(1 - zeta^t q^a mu)^k`` (removing it from the denominator when present)."""
        den = dict(self._den)
        have = den.get(factor.key, 0)
        use = min(have, factor.multiplicity)
        if use:
            den[factor.key] = have - use
        num = self._num
        if factor.multiplicity - use:
            num = _qp_times_factor(num, factor.a, factor.zeta, factor.mu.exps, factor.multiplicity - use)
        return QFunction._raw(self.ctx, num, den, cancel=False)

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return qf_equal(self, other)

    __hash__ = None

    def __repr__(self) -> str:
        from .serialize import qfunction_text

        return f"QFunction({qfunction_text(self)})"


def _normalize(ctx: AlgebraContext, num: QPoly, den: Mapping, cancel: bool) -> tuple[QPoly, dict]:
    den = {key: k for key, k in den.items() if k}
    if not num:
        return {}, {}
    if cancel and den:
        for key in sorted(den):
            a, z, e = key
            while den[key]:
                quot = _qp_try_div(num, a, z, e)
                if quot is None:
                    break
                num = quot
                den[key] -= 1
        den = {key: k for key, k in den.items() if k}
    return num, den


def qf_equal(f: QFunction, g: QFunction) -> bool:
    """Cross-multiplication equality after dropping shared denominator factors."""
    if f.ctx != g.ctx:
        raise ConfigurationError("mismatched algebra contexts")
    na, nb = f._num, g._num
    for key in set(f._den) | set(g._den):
        a, z, e = key
        diff = f._den.get(key, 0) - g._den.get(key, 0)
        if diff > 0:
            nb = _qp_times_factor(nb, a, z, e, diff)
        elif diff < 0:
            na = _qp_times_factor(na, a, z, e, -diff)
    if set(na) != set(nb):
        return False
    return all(scalar_eq(na[k], nb[k]) for k in na)


def qf_arith(f: QFunction, g: QFunction, op: str) -> QFunction:
    """``op`` is ``"add"`` or ``"mul"``."""
    if op == "add":
        return f + g
    if op == "mul":
        return f * g
    raise DomainError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# evaluation and residues
# ---------------------------------------------------------------------------

def _as_point(ctx: AlgebraContext, point) -> QPoint:
    if isinstance(point, QPoint):
        return point
    if isinstance(point, Monomial):
        return QPoint(0, point)
    raise DomainError(f"cannot evaluate at {point!r}")


def qf_eval(f: QFunction, point: Union[QPoint, Monomial]) -> TorusScalar:
    """Substitute ``q = point``; raises :class:`PoleHit` on a vanishing denominator factor."""
    ctx = f.ctx
    point = _as_point(ctx, point)
    M = ctx.root_order
    acc = TorusScalar.zero(ctx)
    for k, s in f._num.items():
        acc = acc + s.mul_unit(point.zeta * k, (point.mono ** k).exps)
    plain: dict = {}
    twisted = []
    for (a, z, e), k in f._den.items():
        zt = (z + point.zeta * a) % M
        x = point.mono ** a * Monomial._raw(ctx, e)
        if zt == 0:
            if x.is_identity():
                raise PoleHit(f"denominator factor vanishes at q = {point}")
            plain[x.exps] = plain.get(x.exps, 0) + k
        else:
            twisted.append((zt, x, k))
    if plain:
        acc = acc * TorusScalar._build(ctx, LaurentPolynomial.const(ctx, 1), plain, cancel=False)
    for zt, x, k in twisted:
        acc = acc * inv_one_minus(ctx, zt, x) ** k
    return acc


def qf_residue(f: QFunction, at: PoleLocus) -> TorusScalar:
    """``Res_{q = 1/nu} f dq/q`` at a simple pole.

    With ``g = (1 - q^a mu) f`` for the unique vanishing factor, the residue is
    ``-g(q0) / a``.
    """
    q0 = at.pole()
    hits = [f_ for f_ in f.den if f_.vanishes_at(q0)]
    order = sum(h.multiplicity for h in hits)
    if order == 0:
        raise NotAPole(f"no denominator factor vanishes at {q0}")
    if order > 1:
        raise UnsupportedOrder(f"pole of order {order} at {q0}")
    hit = hits[0]
    g = f.times_factor(QFactor(hit.a, hit.mu, 1, hit.zeta))
    return qf_eval(g, q0) * Fraction(-1, hit.a)


# ---------------------------------------------------------------------------
# partial fractions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FractionTerm:
    """``coeff / (1 - q nu)^order`` with ``nu`` given by ``locus``."""

    locus: PoleLocus
    order: int
    coeff: TorusScalar

    def as_qfunction(self) -> QFunction:
        factor = QFactor(1, self.locus.root, self.order, self.locus.zeta_exp)
        return QFunction.inverse_factor(factor, self.coeff)


@dataclass
class PartialFractionForm:
    laurent_part: QFunction
    fraction_terms: list[FractionTerm] = field(default_factory=list)

    def recombine(self) -> QFunction:
        out = self.laurent_part
        for term in self.fraction_terms:
            out = out + term.as_qfunction()
        return out

    def terms_at(self, predicate: Callable[[PoleLocus], bool]) -> list[FractionTerm]:
        return [t for t in self.fraction_terms if predicate(t.locus)]


def linear_loci(f: QFunction) -> dict[tuple, int]:
    """Split every factor into linear pieces ``(1 - q nu)``; returns ``{(zeta_exp, root_exps): multiplicity}``."""
    ctx = f.ctx
    M = ctx.root_order
    out: dict = {}
    for (a, z, e), k in f._den.items():
        if M % a:
            raise RootOrderExceeded(f"factor with q^{a} needs root order divisible by {a}")
        if z % a:
            raise RootOrderExceeded(f"twist zeta^{z} has no {a}-th root of order {M}")
        root = Monomial._raw(ctx, e).root(a)
        for l in range(a):
            u = ((z + l * M) // a) % M
            key = (u, root.exps)
            out[key] = out.get(key, 0) + k
    return out


def _series_mul(A: list, B: list, n: int) -> list:
    out = []
    for j in range(n):
        acc = None
        for i in range(j + 1):
            if i < len(A) and j - i < len(B):
                t = A[i] * B[j - i]
                acc = t if acc is None else acc + t
        out.append(acc)
    return out


def _series_inv(A: list, inv0: TorusScalar, n: int) -> list:
    B = [inv0]
    for j in range(1, n):
        acc = TorusScalar.zero(inv0.ctx)
        for i in range(1, j + 1):
            if i < len(A):
                acc = acc + A[i] * B[j - i]
        B.append(-(inv0 * acc))
    return B


def _series_pow(A: list, k: int, n: int) -> list:
    out = [TorusScalar.const(A[0].ctx, 1)] + [TorusScalar.zero(A[0].ctx)] * (n - 1)
    for _ in range(k):
        out = _series_mul(out, A, n)
    return out


def _binom_gen(k: int, j: int) -> Fraction:
    """Generalized binomial coefficient ``C(k, j)`` for any integer ``k``."""
    out = Fraction(1)
    for i in range(j):
        out = out * (k - i) / (i + 1)
    return out


def _taylor_at(f: QFunction, nu_zeta: int, nu_root: Monomial, n: int) -> list:
    """First ``n`` Taylor coefficients of ``(1 - q nu)^n f`` in ``u = 1 - q nu``."""
    ctx = f.ctx
    M = ctx.root_order
    q0 = QPoint(-nu_zeta, nu_root.inverse())
    zero = TorusScalar.zero(ctx)
    # numerator: q^k = nu^-k (1 - u)^k
    G = [zero] * n
    for k, s in f._num.items():
        base = s.mul_unit(q0.zeta * k, (q0.mono ** k).exps)
        for j in range(n):
            c = _binom_gen(k, j) * (-1) ** j
            if c:
                G[j] = G[j] + base * c
    for (a, z, e), k in f._den.items():
        factor = QFactor(a, Monomial._raw(ctx, e), k, z)
        if factor.vanishes_at(q0):
            # (1 - (q nu)^a) / (1 - q nu) = sum_{i<a} (1 - u)^i, rational coefficients
            S = [TorusScalar.const(ctx, sum(_binom_gen(i, j) * (-1) ** j for i in range(a))) for j in range(n)]
            inv0 = TorusScalar.const(ctx, Fraction(1, a))
        else:
            # 1 - w (1 - u)^a with w = zeta^z mu q0^a
            wz = (z + q0.zeta * a) % M
            wx = q0.mono ** a * factor.mu
            w = TorusScalar.unit(ctx, wz, wx)
            S = [TorusScalar.const(ctx, 1) - w] + [w * (-_binom_gen(a, j) * (-1) ** j) for j in range(1, n)]
            inv0 = inv_one_minus(ctx, wz, wx)
        Sinv = _series_inv(S, inv0, n) if n > 1 else [inv0]
        G = _series_mul(G, _series_pow(Sinv, k, n), n)
    return G


def _laurent_part(f: QFunction) -> QFunction:
    """Negative powers from the expansion at ``q = 0``, non-negative ones from ``q = infinity``."""
    ctx = f.ctx
    if not f._den:
        return f
    if not f._num:
        return QFunction.zero(ctx)
    kmin, kmax = min(f._num), max(f._num)
    one = TorusScalar.const(ctx, 1)
    out: dict = {}
    if kmin < 0:
        # 1/Den = prod sum_i c^i q^(a i) near zero
        need = -kmin
        S: QPoly = {0: one}
        for (a, z, e), k in f._den.items():
            geo = {a * i: TorusScalar.unit(ctx, z * i, Monomial._raw(ctx, e) ** i) for i in range(need // a + 1)}
            for _ in range(k):
                S = {p: v for p, v in _qp_mul(S, geo).items() if p < need}
        for j in range(kmin, 0):
            acc = TorusScalar.zero(ctx)
            for k, s in f._num.items():
                if k <= j and (j - k) in S:
                    acc = acc + s * S[j - k]
            if not acc.is_zero():
                out[j] = acc
    Dg = f.den_degree()
    if kmax >= Dg:
        need = kmax - Dg + 1
        # 1/Den = C q^-Dg * T(1/q),  T = prod sum_i c^-i w^(a i)
        lead = TorusScalar.const(ctx, 1)
        T: QPoly = {0: one}
        for (a, z, e), k in f._den.items():
            mu = Monomial._raw(ctx, e)
            lead = lead * TorusScalar.unit(ctx, -z * k, mu.inverse() ** k, (-1) ** k)
            geo = {a * i: TorusScalar.unit(ctx, -z * i, mu.inverse() ** i) for i in range(need // a + 1)}
            for _ in range(k):
                T = {p: v for p, v in _qp_mul(T, geo).items() if p < need}
        for j in range(0, kmax - Dg + 1):
            acc = TorusScalar.zero(ctx)
            for k, s in f._num.items():
                i = k - Dg - j
                if i >= 0 and i in T:
                    acc = acc + s * T[i]
            if not acc.is_zero():
                out[j] = acc * lead
    return QFunction._raw(ctx, out, {})


def qf_partial_fractions(
    f: QFunction, select: Optional[Callable[[PoleLocus], bool]] = None
) -> PartialFractionForm:
    """Decompose into a Laurent polynomial plus elementary fractions ``c / (1 - q nu)^k``.

    ``select`` restricts which loci get their fraction terms computed; the
    Laurent part is always included.  Without it the recombination is exact.
    """
    ctx = f.ctx
    loci = linear_loci(f)
    terms: list[FractionTerm] = []
    for (u, root_exps), n in sorted(loci.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        locus = PoleLocus(u, Monomial._raw(ctx, root_exps))
        if select is not None and not select(locus):
            continue
        G = _taylor_at(f, u, locus.root, n)
        for j, c in enumerate(G):
            if c is not None and not c.is_zero():
                terms.append(FractionTerm(locus, n - j, c))
    terms.sort(key=lambda t: (t.locus.key, t.order))
    return PartialFractionForm(_laurent_part(f), terms)


def qf_split_kpm(f: QFunction) -> tuple[QFunction, QFunction]:
    """``f = kplus + kminus`` with ``kplus`` a Laurent polynomial in ``q`` and ``kminus``
    regular at ``q = 0`` and vanishing at ``q = infinity``."""
    kplus = _laurent_part(f)
    if not f._den:
        return kplus, QFunction.zero(f.ctx)
    num = _qp_add(f._num, _qp_neg(_qp_mul(kplus._num, f.den_poly())))
    kminus = QFunction._raw(f.ctx, num, f._den)
    if kminus._num and (min(kminus._num) < 0 or max(kminus._num) >= kminus.den_degree()):
        raise ArithmeticError("K- part is not proper; Laurent part extraction is inconsistent")
    return kplus, kminus
