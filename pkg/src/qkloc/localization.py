"""Fixed-point localization for ``CP^N``.

Conventions used throughout:

* ``lambda = Lambda_i / Lambda_j`` for a leg from fixed point ``i`` to ``j``;
  the leg of multiplicity ``m`` produces poles of the ``i``-th component at
  the ``m`` roots of ``1 - q^m lambda``, the principal one being
  ``q0 = lambda^(-1/m)``.
* The residue relation checked degree by degree is::

      Res_{q=q0} f_i[d] dq/q = -(1/m) * (phi^i / C_ij(m)) * f_j[d-m](q0)

  with ``phi^i = prod_{a != i} (1 - Lambda_i/Lambda_a)``.
* ``C_ij(m)`` is the Lefschetz denominator of the two-pointed degree-``m`` leg.
  As a function of the branch ``q0`` it is
  ``phi^i phi^j prod_{r=1}^{m-1} prod_a (1 - q0^r Lambda_i / Lambda_a)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Protocol, Sequence

from .algebra import AlgebraContext, LaurentPolynomial, Monomial, TorusScalar, inv_one_minus, scalar_eq
from .errors import DomainError, PoleHit, UnsupportedOrder
from .jfunction import JBundle, NovikovSeries, j_coeff, j_series
from .kring import phi_factors, phi_value
from .qfunc import (
    PoleLocus,
    QFactor,
    QFunction,
    QPoint,
    linear_loci,
    qf_eval,
    qf_partial_fractions,
    qf_residue,
)

log = logging.getLogger(__name__)

__all__ = [
    "DegreeCheck",
    "LegSpec",
    "PoleTerm",
    "RecursionReport",
    "ReferenceOracle",
    "VertexOracle",
    "assert_simple_poles",
    "c_coeff",
    "c_factors",
    "extract_pole_part",
    "lefschetz_residue_form",
    "lefschetz_trace",
    "reconstruct",
    "tangent_eigenvalues",
    "verify_degree2_example",
    "verify_recursion",
]


@dataclass(frozen=True)
class LegSpec:
    """A leg of multiplicity ``m`` from fixed point ``i`` to fixed point ``j``."""

    i: int
    j: int
    m: int

    def __post_init__(self) -> None:
        if self.i == self.j:
            raise DomainError("a leg joins two distinct fixed points")
        if self.m < 1:
            raise DomainError(f"multiplicity must be >= 1, got {self.m}")

    def validate(self, ctx: AlgebraContext) -> None:
        for idx in (self.i, self.j):
            if not 0 <= idx <= ctx.n:
                raise DomainError(f"fixed point index {idx} out of range 0..{ctx.n}")

    def lam(self, ctx: AlgebraContext) -> Monomial:
        return Monomial.ratio(ctx, self.i, self.j)

    def principal_locus(self, ctx: AlgebraContext) -> PoleLocus:
        return PoleLocus.principal(self.m, self.lam(ctx))


# ---------------------------------------------------------------------------
# C_ij(m)
# ---------------------------------------------------------------------------

def tangent_eigenvalues(ctx: AlgebraContext, leg: LegSpec) -> list[Monomial]:
    """Torus weights on the tangent space of the two-pointed moduli space at the leg.

    Sections of the pulled-back ``C^{N+1} (x) O(1)`` have weights
    ``Lambda_a Lambda_i^(-r/m) Lambda_j^(-s/m)`` with ``r + s = m``; the two
    trivial ones, ``(a, r, s) = (i, m, 0)`` and ``(j, 0, m)``, are dropped.
    """
    leg.validate(ctx)
    ctx.require_divisible(leg.m)
    m = leg.m
    li, lj = Monomial.var(ctx, leg.i), Monomial.var(ctx, leg.j)
    out = []
    for a in range(ctx.nvars):
        la = Monomial.var(ctx, a)
        for r in range(m + 1):
            s = m - r
            if (a, r, s) in ((leg.i, m, 0), (leg.j, 0, m)):
                continue
            out.append(la * li ** Fraction(-r, m) * lj ** Fraction(-s, m))
    return sorted(out)


def _product_factors(ctx: AlgebraContext, leg: LegSpec) -> list[Monomial]:
    m = leg.m
    li, lj = Monomial.var(ctx, leg.i), Monomial.var(ctx, leg.j)
    out = phi_factors(ctx, leg.i) + phi_factors(ctx, leg.j)
    for r in range(1, m):
        for a in range(ctx.nvars):
            la = Monomial.var(ctx, a)
            out.append((lj / la) ** Fraction(r, m) * (li / la) ** Fraction(m - r, m))
    return out


def c_factors(ctx: AlgebraContext, leg: LegSpec, method: str = "product") -> list[Monomial]:
    """Monomials ``x`` with ``C_ij(m) = prod (1 - x)``."""
    leg.validate(ctx)
    ctx.require_divisible(leg.m)
    if method == "product":
        return _product_factors(ctx, leg)
    if method == "tangent":
        return [mu.inverse() for mu in tangent_eigenvalues(ctx, leg)]
    raise DomainError(f"unknown method {method!r}; expected 'product' or 'tangent'")


def c_coeff(ctx: AlgebraContext, leg: LegSpec, method: str = "product") -> TorusScalar:
    """``C_ij(m)`` expanded as a Laurent polynomial."""
    facs = c_factors(ctx, leg, method)
    return TorusScalar.from_laurent(LaurentPolynomial.binomial_product(ctx, [(x.exps, 1) for x in facs]))


def _inverse_c_at(ctx: AlgebraContext, leg: LegSpec, q0: QPoint) -> TorusScalar:
    """``1 / C_ij(m)`` at the branch ``q0`` of ``lambda^(-1/m)``."""
    out = TorusScalar.inverse_binomials(ctx, phi_factors(ctx, leg.i) + phi_factors(ctx, leg.j))
    for r in range(1, leg.m):
        for a in range(ctx.nvars):
            x = q0.mono ** r * Monomial.ratio(ctx, leg.i, a)
            out = out * inv_one_minus(ctx, q0.zeta * r, x)
    return out


# ---------------------------------------------------------------------------
# residue recursion
# ---------------------------------------------------------------------------

@dataclass
class DegreeCheck:
    d: int
    lhs: Optional[TorusScalar]
    rhs: Optional[TorusScalar]
    passed: bool
    note: str = ""


@dataclass
class RecursionReport:
    leg: LegSpec
    checks: list[DegreeCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def assert_simple_poles(f: QFunction) -> None:
    """Raise :class:`UnsupportedOrder` if a pole away from the roots of unity is not simple."""
    for (u, root_exps), n in linear_loci(f).items():
        if any(root_exps) and n > 1:
            raise UnsupportedOrder(f"pole of order {n} at a non-unity locus")


def _recursion_rhs(ctx: AlgebraContext, leg: LegSpec, f_j: QFunction, q0: QPoint) -> TorusScalar:
    value = qf_eval(f_j, q0)
    return phi_value(ctx, leg.i) * _inverse_c_at(ctx, leg, q0) * value * Fraction(-1, leg.m)


def verify_recursion(
    ctx: AlgebraContext, i: int, j: int, m: int, series: JBundle, D: Optional[int] = None
) -> RecursionReport:
    """Check the residue relation for the leg ``(i, j, m)`` at every degree ``m <= d <= D``."""
    leg = LegSpec(i, j, m)
    leg.validate(ctx)
    D = series.truncation if D is None else D
    if D > series.truncation:
        raise DomainError(f"series truncated at {series.truncation}, asked for {D}")
    report = RecursionReport(leg)
    if D < m:
        return report
    ctx.require_divisible(m)
    locus = leg.principal_locus(ctx)
    q0 = locus.pole()
    for d in range(m, D + 1):
        f_i = series.coeff(i, d)
        assert_simple_poles(f_i)
        lhs = qf_residue(f_i, locus)
        try:
            rhs = _recursion_rhs(ctx, leg, series.coeff(j, d - m), q0)
        except PoleHit as exc:
            report.checks.append(DegreeCheck(d, lhs, None, False, f"pole hit: {exc}"))
            continue
        ok = scalar_eq(lhs, rhs)
        log.debug("recursion leg=%s d=%d pass=%s", leg, d, ok)
        report.checks.append(DegreeCheck(d, lhs, rhs, ok))
    return report


@dataclass(frozen=True)
class PoleTerm:
    """The rationalized pole part ``c(q) / (1 - q^m lambda)`` contributed by one leg."""

    leg: LegSpec
    fraction: QFunction


def extract_pole_part(ctx: AlgebraContext, series: JBundle, i: int, d: int) -> list[PoleTerm]:
    """Pole parts of ``f_i[d]`` away from ``q = 0, infinity`` and the roots of unity.

    For each ``j != i`` and ``m <= d`` the residue relation fixes the
    coefficient at every branch ``nu_l`` of ``lambda^(1/m)``; the branches are
    summed as ``sum_l c_l / (1 - q nu_l)`` and brought over the common
    denominator ``1 - q^m lambda``.
    """
    if d > series.truncation + 1:
        raise DomainError(f"need components through degree {d - 1}, series stops at {series.truncation}")
    M = ctx.root_order
    out: list[PoleTerm] = []
    for j in range(ctx.nvars):
        if j == i:
            continue
        for m in range(1, d + 1):
            ctx.require_divisible(m)
            leg = LegSpec(i, j, m)
            f_j = series.coeff(j, d - m)
            assert_simple_poles(f_j)
            lam = leg.lam(ctx)
            root = lam.root(m)
            num: dict[int, TorusScalar] = {}
            for l in range(m):
                twist = l * (M // m)
                q_l = QPoint(-twist, root.inverse())
                c_l = _recursion_rhs(ctx, leg, f_j, q_l) * -1
                # c_l / (1 - q nu_l) = c_l * sum_{k<m} (q nu_l)^k / (1 - q^m lambda)
                for k in range(m):
                    term = c_l.mul_unit(twist * k, (root ** k).exps)
                    num[k] = num[k] + term if k in num else term
            frac = QFunction(ctx, num, [QFactor(m, lam)])
            if not frac.is_zero():
                out.append(PoleTerm(leg, frac))
    return out


class VertexOracle(Protocol):
    """Supplies the part of ``f_i[d]`` with poles at roots of unity.

    It stands in for the point-target J-function; with zero input it must
    return ``0`` at degree ``0``.
    """

    def unity_part(self, i: int, d: int, pole_terms: Sequence[PoleTerm], laurent_input: QFunction) -> QFunction:
        ...


class ReferenceOracle:
    """Reads the roots-of-unity parts off the closed-form series by partial fractions."""

    def __init__(self, ctx: AlgebraContext):
        self.ctx = ctx
        self._cache: dict[tuple[int, int], QFunction] = {}

    def unity_part(self, i: int, d: int, pole_terms: Sequence[PoleTerm], laurent_input: QFunction) -> QFunction:
        key = (i, d)
        if key not in self._cache:
            if d == 0:
                self._cache[key] = QFunction.zero(self.ctx)
            else:
                pf = qf_partial_fractions(j_coeff(self.ctx, i, d), select=PoleLocus.is_root_of_unity)
                total = QFunction.zero(self.ctx)
                for term in pf.fraction_terms:
                    total = total + term.as_qfunction()
                self._cache[key] = total
        return self._cache[key]


def reconstruct(ctx: AlgebraContext, D: int, oracle: VertexOracle) -> JBundle:
    """Rebuild the J-function at zero input degree by degree in ``Q``.

    Degree ``d`` of component ``i`` is the sum of the leg pole parts (from
    lower-degree components of the other fixed points) and the oracle's
    roots-of-unity part; the Laurent part is zero for zero input.
    """
    if D < 0:
        raise DomainError(f"truncation must be non-negative, got {D}")
    zero = QFunction.zero(ctx)
    comps = [[QFunction.dilaton(ctx) + oracle.unity_part(i, 0, [], zero)] for i in range(ctx.nvars)]
    for d in range(1, D + 1):
        known = JBundle(ctx.n, d - 1, tuple(NovikovSeries(d - 1, tuple(c)) for c in comps))
        fresh = []
        for i in range(ctx.nvars):
            terms = extract_pole_part(ctx, known, i, d)
            f = oracle.unity_part(i, d, terms, zero)
            for t in terms:
                f = f + t.fraction
            fresh.append(f)
        for i in range(ctx.nvars):
            comps[i].append(fresh[i])
    return JBundle(ctx.n, D, tuple(NovikovSeries(D, tuple(c)) for c in comps))


# ---------------------------------------------------------------------------
# Lefschetz formula
# ---------------------------------------------------------------------------

def lefschetz_trace(ctx: AlgebraContext, k: int) -> TorusScalar:
    """``sum_i Lambda_i^k / prod_{j != i} (1 - Lambda_i / Lambda_j)``: the character of ``H^*(CP^N; P^k)``."""
    total = TorusScalar.zero(ctx)
    for i in range(ctx.nvars):
        term = TorusScalar.inverse_binomials(ctx, phi_factors(ctx, i))
        total = total + term * (Monomial.var(ctx, i) ** k)
    return total


def _geometric_product(ctx: AlgebraContext, monos: Sequence[Monomial], degree: int) -> TorusScalar:
    """Coefficient of ``t^degree`` in ``prod 1/(1 - x t)``."""
    if degree < 0:
        return TorusScalar.zero(ctx)
    series = [LaurentPolynomial.const(ctx, 1)] + [LaurentPolynomial.zero(ctx)] * degree
    for x in monos:
        nxt = []
        for n in range(degree + 1):
            acc = LaurentPolynomial.zero(ctx)
            for p in range(n + 1):
                if series[n - p]:
                    acc = acc + series[n - p] * (x ** p)
            nxt.append(acc)
        series = nxt
    return TorusScalar.from_laurent(series[degree])


def lefschetz_residue_form(ctx: AlgebraContext, k: int) -> TorusScalar:
    """Sum of the residues of ``P^k / prod_a (1 - P/Lambda_a) dP/P`` at ``P = 0`` and ``P = infinity``.

    Near ``0`` the integrand expands in ``prod_a sum_n (P/Lambda_a)^n``.  Near
    infinity, with ``w = 1/P``, it is
    ``(-1)^(N+1) prod Lambda_a * w^(N+1-k) prod_a 1/(1 - w Lambda_a) * (-dw/w)``.
    """
    n1 = ctx.nvars
    lams = [Monomial.var(ctx, a) for a in range(n1)]
    at_zero = _geometric_product(ctx, [x.inverse() for x in lams], -k)
    prod = Monomial.identity(ctx)
    for x in lams:
        prod = prod * x
    w0 = _geometric_product(ctx, lams, k - n1) * TorusScalar.unit(ctx, 0, prod, (-1) ** n1)
    at_infinity = -w0
    return at_zero + at_infinity


# ---------------------------------------------------------------------------
# the degree-2 worked example on CP^1
# ---------------------------------------------------------------------------

def _degree2_sides(ctx: AlgebraContext, bumps: Sequence[int]) -> tuple[QFunction, QFunction]:
    lam = Monomial.ratio(ctx, 0, 1)
    one = Monomial.identity(ctx)
    half = ctx.root_order // 2
    sq = lam.root(2)
    L = lambda m, c=1: TorusScalar.unit(ctx, 0, m, c)  # noqa: E731
    T1 = TorusScalar.const(ctx, 1)
    lhs = QFunction(ctx, {0: 1}, [QFactor(2, one), QFactor(1, lam), QFactor(2, lam)], cancel=False)
    coeffs = [
        # 1 / (2 (1-lambda)^2)   at   1/(1-q)
        TorusScalar.inverse_binomials(ctx, [lam, lam]) * Fraction(1, 2),
        # 1 / (2 (1-lambda^2))   at   1/(1+q)
        TorusScalar.inverse_binomials(ctx, [lam ** 2]) * Fraction(1, 2),
        # lambda^3 / ((1-lambda)(1-lambda^2))   at   1/(1-lambda q)
        L(lam ** 3) * TorusScalar.inverse_binomials(ctx, [lam, lam ** 2]),
        # -lambda / (2 (1-lambda)(1+sqrt(lambda)))   at   1/(1+sqrt(lambda) q)
        L(lam, Fraction(-1, 2)) * TorusScalar.inverse_binomials(ctx, [lam]) * inv_one_minus(ctx, half, sq),
        # -lambda / (2 (1-lambda)(1-sqrt(lambda)))   at   1/(1-sqrt(lambda) q)
        L(lam, Fraction(-1, 2)) * TorusScalar.inverse_binomials(ctx, [lam, sq]),
    ]
    factors = [QFactor(1, one), QFactor(1, one, 1, half), QFactor(1, lam), QFactor(1, sq, 1, half), QFactor(1, sq)]
    rhs = QFunction.zero(ctx)
    for idx, (c, fa) in enumerate(zip(coeffs, factors)):
        rhs = rhs + QFunction.inverse_factor(fa, c + T1 * bumps[idx])
    return lhs, rhs


def _degree2_numeric(lam: Fraction, bumps: Sequence[int]) -> bool:
    """Plain-rational check of the same identity at ``lambda = s^2``; ``lam`` must be a square."""
    s = Fraction(int(lam.numerator ** 0.5), int(lam.denominator ** 0.5))
    if s * s != lam:
        raise DomainError("numeric specialization needs a perfect-square lambda")
    c = [
        1 / (2 * (1 - lam) ** 2),
        1 / (2 * (1 - lam ** 2)),
        lam ** 3 / ((1 - lam) * (1 - lam ** 2)),
        -lam / (2 * (1 - lam) * (1 + s)),
        -lam / (2 * (1 - lam) * (1 - s)),
    ]
    c = [ci + b for ci, b in zip(c, bumps)]
    poles = {Fraction(1), Fraction(-1), 1 / lam, -1 / s, 1 / s}
    points = [Fraction(p, 7) for p in range(-9, 10) if Fraction(p, 7) not in poles][:9]
    for q in points:
        lhs = 1 / ((1 - q ** 2) * (1 - lam * q) * (1 - lam * q ** 2))
        rhs = c[0] / (1 - q) + c[1] / (1 + q) + c[2] / (1 - lam * q) + c[3] / (1 + s * q) + c[4] / (1 - s * q)
        if lhs != rhs:
            return False
    return True


def verify_degree2_example(ctx: Optional[AlgebraContext] = None, perturb: Optional[int] = None) -> bool:
    """Five-term elementary-fraction identity for the degree-2 term on ``CP^1``.

    Checked exactly with ``sqrt(lambda)`` and ``zeta_2 = -1`` in the coefficient
    system, and again at ``lambda = 4`` with plain rationals.  ``perturb`` adds
    ``1`` to the coefficient of the given term (0-based), which must make the
    check fail.
    """
    ctx = ctx or AlgebraContext(1, 2)
    if ctx.n != 1:
        raise DomainError("the degree-2 example lives on CP^1")
    ctx.require_divisible(2)
    bumps = [0] * 5
    if perturb is not None:
        bumps[perturb] = 1
    lhs, rhs = _degree2_sides(ctx, bumps)
    symbolic = lhs == rhs
    numeric = _degree2_numeric(Fraction(4), bumps)
    return symbolic and numeric
