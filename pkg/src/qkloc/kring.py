"""Torus-equivariant K-ring of ``CP^N``.

Two presentations are kept: polynomials in the Hopf bundle ``P`` modulo
``prod_a (1 - P / Lambda_a)``, and the fixed-point basis where a class is the
tuple of its restrictions ``P -> Lambda_i``.  The second one is the working
representation; the first exists for input/output and for comparing with
closed forms written in ``P``.

Convention: the class ``phi^i`` restricts to ``prod_{j != i} (1 - Lambda_i/Lambda_j)``
at the ``i``-th fixed point and to zero elsewhere; the delta class ``phi_i`` is
``1`` at ``i`` and ``0`` elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .algebra import AlgebraContext, LaurentPolynomial, Monomial, TorusScalar
from .errors import ConfigurationError, DomainError

__all__ = ["KClass", "PPolynomial", "delta_class", "phi_factors", "phi_to_p", "phi_value", "p_to_phi"]


def phi_factors(ctx: AlgebraContext, i: int) -> list[Monomial]:
    """Monomials ``Lambda_i / Lambda_j`` (``j != i``) whose binomials multiply to ``phi^i``."""
    if not 0 <= i <= ctx.n:
        raise DomainError(f"fixed point index {i} out of range 0..{ctx.n}")
    return [Monomial.ratio(ctx, i, j) for j in range(ctx.nvars) if j != i]


def phi_value(ctx: AlgebraContext, i: int) -> TorusScalar:
    """``prod_{j != i} (1 - Lambda_i / Lambda_j)``."""
    facs = phi_factors(ctx, i)
    return TorusScalar.from_laurent(LaurentPolynomial.binomial_product(ctx, [(x.exps, 1) for x in facs]))


@dataclass(frozen=True)
class KClass:
    """Restrictions of a K-class to the ``N + 1`` fixed points."""

    components: tuple[TorusScalar, ...]

    def __post_init__(self) -> None:
        if not self.components:
            raise DomainError("a K-class needs at least one component")
        ctx = self.components[0].ctx
        if len(self.components) != ctx.nvars:
            raise ConfigurationError(f"expected {ctx.nvars} components, got {len(self.components)}")

    @property
    def ctx(self) -> AlgebraContext:
        return self.components[0].ctx

    def __add__(self, other: "KClass") -> "KClass":
        return KClass(tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "KClass") -> "KClass":
        return KClass(tuple(a - b for a, b in zip(self.components, other.components)))

    def __mul__(self, other: "KClass") -> "KClass":
        return KClass(tuple(a * b for a, b in zip(self.components, other.components)))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __eq__(self, other) -> bool:
        if not isinstance(other, KClass):
            return NotImplemented
        return len(self.components) == len(other.components) and all(
            a == b for a, b in zip(self.components, other.components)
        )

    __hash__ = None


def delta_class(ctx: AlgebraContext, i: int) -> KClass:
    if not 0 <= i <= ctx.n:
        raise DomainError(f"fixed point index {i} out of range 0..{ctx.n}")
    return KClass(tuple(TorusScalar.const(ctx, 1 if a == i else 0) for a in range(ctx.nvars)))


def _relation(ctx: AlgebraContext) -> list[TorusScalar]:
    """Coefficients of ``prod_a (1 - P Lambda_a^-1)``, lowest degree first."""
    coeffs = [TorusScalar.const(ctx, 1)]
    for a in range(ctx.nvars):
        inv = Monomial.var(ctx, a).inverse()
        nxt = [TorusScalar.zero(ctx)] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            nxt[k] = nxt[k] + c
            nxt[k + 1] = nxt[k + 1] - c * inv
        coeffs = nxt
    return coeffs


class PPolynomial:
    """Polynomial in ``P`` of degree at most ``N`` over torus scalars (reduced by the ring relation)."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: AlgebraContext, coeffs: Sequence = ()):
        scal = [c if isinstance(c, TorusScalar) else TorusScalar.const(ctx, c) for c in coeffs]
        self.ctx = ctx
        self.coeffs = tuple(_reduce(ctx, scal))

    @classmethod
    def P(cls, ctx: AlgebraContext) -> "PPolynomial":
        return cls(ctx, [0, 1])

    @classmethod
    def relation(cls, ctx: AlgebraContext) -> list[TorusScalar]:
        return _relation(ctx)

    def __add__(self, other: "PPolynomial") -> "PPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        zero = TorusScalar.zero(self.ctx)
        return PPolynomial(
            self.ctx,
            [(self.coeffs[k] if k < len(self.coeffs) else zero) + (other.coeffs[k] if k < len(other.coeffs) else zero)
             for k in range(n)],
        )

    def __neg__(self) -> "PPolynomial":
        return PPolynomial(self.ctx, [-c for c in self.coeffs])

    def __sub__(self, other: "PPolynomial") -> "PPolynomial":
        return self + (-other)

    def __mul__(self, other) -> "PPolynomial":
        if isinstance(other, TorusScalar):
            return PPolynomial(self.ctx, [c * other for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return PPolynomial(self.ctx, [])
        out = [TorusScalar.zero(self.ctx)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return PPolynomial(self.ctx, out)

    def evaluate(self, value: TorusScalar) -> TorusScalar:
        acc = TorusScalar.zero(self.ctx)
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, PPolynomial):
            return NotImplemented
        return len(self.coeffs) == len(other.coeffs) and all(a == b for a, b in zip(self.coeffs, other.coeffs))

    __hash__ = None

    def __repr__(self) -> str:
        return f"PPolynomial({[repr(c) for c in self.coeffs]})"


def _reduce(ctx: AlgebraContext, coeffs: list[TorusScalar]) -> list[TorusScalar]:
    coeffs = list(coeffs)
    N1 = ctx.nvars
    if len(coeffs) > N1:
        rel = _relation(ctx)
        lead_inv = rel[-1].inverse()
        for top in range(len(coeffs) - 1, N1 - 1, -1):
            c = coeffs[top]
            if c.is_zero():
                continue
            scale = c * lead_inv
            for k in range(N1):
                coeffs[top - N1 + k] = coeffs[top - N1 + k] - scale * rel[k]
            coeffs[top] = TorusScalar.zero(ctx)
        coeffs = coeffs[:N1]
    while coeffs and coeffs[-1].is_zero():
        coeffs.pop()
    return coeffs


def p_to_phi(p: PPolynomial) -> KClass:
    """Restrict to each fixed point (``P -> Lambda_i``)."""
    ctx = p.ctx
    return KClass(tuple(p.evaluate(TorusScalar.from_laurent(LaurentPolynomial.monomial(Monomial.var(ctx, i))))
                        for i in range(ctx.nvars)))


def phi_to_p(k: KClass) -> PPolynomial:
    """Lagrange interpolation through ``(Lambda_i, component_i)``."""
    ctx = k.ctx
    total = PPolynomial(ctx, [])
    for i, comp in enumerate(k.components):
        if comp.is_zero():
            continue
        basis = PPolynomial(ctx, [comp])
        for b in range(ctx.nvars):
            if b == i:
                continue
            lam_b = TorusScalar.from_laurent(LaurentPolynomial.monomial(Monomial.var(ctx, b)))
            # 1/(Lambda_i - Lambda_b) = Lambda_i^-1 / (1 - Lambda_b/Lambda_i)
            inv = TorusScalar(
                LaurentPolynomial.monomial(Monomial.var(ctx, i).inverse()), [Monomial.ratio(ctx, b, i)]
            )
            basis = basis * PPolynomial(ctx, [-lam_b * inv, inv])
        total = total + basis
    return total
