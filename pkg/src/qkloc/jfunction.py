"""The q-hypergeometric small J-function of ``CP^N``, degree by degree.

At fixed point ``i`` the coefficient of ``Q^d`` is::

    (1 - q) / ( prod_{r=1..d} (1 - q^r) * prod_{j != i} prod_{r=1..d} (1 - q^r Lambda_i/Lambda_j) )

with the ``(1 - q)`` cancelled against the ``r = 1`` factor when ``d >= 1``.
The Novikov variable is a grading only: a series is a tuple of QFunctions
indexed by degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import lcm
from typing import Mapping

from .algebra import AlgebraContext, LaurentPolynomial, Monomial, TorusScalar
from .errors import DomainError, RootOrderExceeded
from .kring import PPolynomial
from .qfunc import QFactor, QFunction

__all__ = ["JBundle", "NovikovSeries", "PForm", "j_coeff", "j_in_p_basis", "j_series", "required_root_order"]


@dataclass(frozen=True)
class NovikovSeries:
    """Coefficients of ``Q^0 .. Q^truncation``."""

    truncation: int
    coeffs: tuple[QFunction, ...]

    def __post_init__(self) -> None:
        if len(self.coeffs) != self.truncation + 1:
            raise DomainError("coefficient count does not match truncation")

    def __getitem__(self, d: int) -> QFunction:
        return self.coeffs[d]


@dataclass(frozen=True)
class JBundle:
    """One Novikov series per fixed point: a J-function candidate in the fixed-point basis."""

    n: int
    truncation: int
    components: tuple[NovikovSeries, ...]

    def coeff(self, i: int, d: int) -> QFunction:
        return self.components[i].coeffs[d]

    @property
    def ctx(self) -> AlgebraContext:
        return self.components[0].coeffs[0].ctx

    def __eq__(self, other) -> bool:
        if not isinstance(other, JBundle):
            return NotImplemented
        if (self.n, self.truncation) != (other.n, other.truncation):
            return False
        return all(
            a == b
            for sa, sb in zip(self.components, other.components)
            for a, b in zip(sa.coeffs, sb.coeffs)
        )

    __hash__ = None


def required_root_order(D: int) -> int:
    return lcm(*range(1, D + 1)) if D >= 1 else 1


def j_coeff(ctx: AlgebraContext, i: int, d: int) -> QFunction:
    if d < 0:
        raise DomainError(f"Novikov degree must be non-negative, got {d}")
    if not 0 <= i <= ctx.n:
        raise DomainError(f"fixed point index {i} out of range 0..{ctx.n}")
    if d == 0:
        return QFunction.dilaton(ctx)
    one = Monomial.identity(ctx)
    den = [QFactor(r, one) for r in range(2, d + 1)]
    for j in range(ctx.nvars):
        if j != i:
            lam = Monomial.ratio(ctx, i, j)
            den += [QFactor(r, lam) for r in range(1, d + 1)]
    return QFunction(ctx, {0: 1}, den, cancel=False)


def j_series(ctx: AlgebraContext, D: int) -> JBundle:
    if D < 0:
        raise DomainError(f"truncation must be non-negative, got {D}")
    need = required_root_order(D)
    if ctx.root_order % need:
        raise RootOrderExceeded(f"truncation {D} needs root order divisible by {need}, have {ctx.root_order}")
    comps = tuple(
        NovikovSeries(D, tuple(j_coeff(ctx, i, d) for d in range(D + 1))) for i in range(ctx.nvars)
    )
    return JBundle(ctx.n, D, comps)


# ---------------------------------------------------------------------------
# P-form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PForm:
    """``sum_k q^k num[k](P) / prod den`` with a ``P``-free denominator."""

    ctx: AlgebraContext
    num: Mapping[int, PPolynomial]
    den: tuple[QFactor, ...]

    def restrict(self, i: int) -> QFunction:
        lam = TorusScalar.from_laurent(LaurentPolynomial.monomial(Monomial.var(self.ctx, i)))
        return QFunction(self.ctx, {k: p.evaluate(lam) for k, p in self.num.items()}, self.den)

    def to_phi(self) -> tuple[QFunction, ...]:
        return tuple(self.restrict(i) for i in range(self.ctx.nvars))


def _elementary(ctx: AlgebraContext) -> list[TorusScalar]:
    lams = [Monomial.var(ctx, a) for a in range(ctx.nvars)]
    out = []
    for k in range(ctx.nvars + 1):
        acc = LaurentPolynomial.zero(ctx)
        for combo in combinations(lams, k):
            m = Monomial.identity(ctx)
            for x in combo:
                m = m * x
            acc = acc + LaurentPolynomial.monomial(m)
        out.append(TorusScalar.from_laurent(acc))
    return out


def _inverse_numerator(ctx: AlgebraContext, a: int, r: int, elem: list[TorusScalar]) -> dict[int, PPolynomial]:
    """``X(P)`` with ``(1 - c P) X(P) = prod_b (1 - c Lambda_b)`` in the K-ring, ``c = q^r / Lambda_a``.

    ``X(P) = sum_k (-c)^k sum_{t<=k} (-P)^t e_{k-t}(Lambda)``, returned as ``{q-power: PPolynomial}``.
    """
    N = ctx.n
    inv_a = Monomial.var(ctx, a).inverse()
    out: dict[int, PPolynomial] = {}
    for k in range(N + 1):
        unit = TorusScalar.unit(ctx, 0, inv_a ** k, (-1) ** k)
        coeffs = [elem[k - t] * ((-1) ** t) * unit for t in range(k + 1)]
        out[r * k] = PPolynomial(ctx, coeffs)
    return out


def _pq_mul(x: dict, y: dict) -> dict:
    out: dict = {}
    for i, a in x.items():
        for j, b in y.items():
            prod = a * b
            out[i + j] = out[i + j] + prod if i + j in out else prod
    return {k: v for k, v in out.items() if not v.is_zero()}


def j_in_p_basis(ctx: AlgebraContext, d: int) -> PForm:
    """Degree-``d`` coefficient of ``(1-q) sum_d Q^d / prod_a prod_r (1 - q^r P / Lambda_a)`` in the K-ring.

    Each ``1/(1 - q^r P/Lambda_a)`` is replaced by ``X(P) / prod_b (1 - q^r Lambda_b / Lambda_a)``,
    so the result is computed in the Hopf-bundle presentation without passing
    through the fixed-point components.
    """
    if d < 0:
        raise DomainError(f"Novikov degree must be non-negative, got {d}")
    one = PPolynomial(ctx, [1])
    num: dict = {0: one, 1: -one}
    den: list[QFactor] = []
    elem = _elementary(ctx)
    for a in range(ctx.nvars):
        for r in range(1, d + 1):
            num = _pq_mul(num, _inverse_numerator(ctx, a, r, elem))
            for b in range(ctx.nvars):
                den.append(QFactor(r, Monomial.ratio(ctx, b, a)))
    merged: dict = {}
    for f in den:
        merged[f.key] = merged.get(f.key, 0) + 1
    factors = tuple(QFactor(a, Monomial._raw(ctx, e), k, z) for (a, z, e), k in sorted(merged.items()))
    return PForm(ctx, num, factors)
