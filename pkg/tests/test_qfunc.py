from fractions import Fraction

import pytest
import sympy
from hypothesis import given

from oracles import ModEval, rand_qfunction, rngs
from qkloc import (
    AlgebraContext,
    Monomial,
    NotAPole,
    PoleHit,
    PoleLocus,
    QFactor,
    QFunction,
    QPoint,
    RootOrderExceeded,
    TorusScalar,
    UnsupportedOrder,
    parse_value,
    qf_eval,
    qf_partial_fractions,
    qf_residue,
    qf_split_kpm,
)

CTX = AlgebraContext(1, 2)
LAM = Monomial.ratio(CTX, 0, 1)


def qf(text, ctx=CTX):
    return parse_value(text, ctx, "qfunction")


def sc(text, ctx=CTX):
    return parse_value(text, ctx, "scalar")


# -- arithmetic ----------------------------------------------------------------

def test_adding_zero():
    f = qf("1/(1 - q*L0/L1)")
    assert f + QFunction.zero(CTX) == f


def test_factor_cancels():
    assert qf("1 - q") * qf("1/(1 - q)") == QFunction.const(CTX, 1)
    assert (qf("1 - q") * qf("1/(1 - q)")).den == ()


def test_sum_of_two_poles():
    lhs = qf("1/(1 - q)") + qf("1/(1 - q*L0/L1)")
    assert lhs == qf("(2 - q*(1 + L0/L1))/((1 - q)*(1 - q*L0/L1))")


@given(rngs())
def test_arithmetic_under_specialization(rng):
    ctx = AlgebraContext(2, 2)
    ev = ModEval(ctx, rng.randrange(1000))
    f, g = rand_qfunction(rng, ctx), rand_qfunction(rng, ctx)
    q = rng.randrange(2, ev.p - 1)
    try:
        vf, vg = ev.qfunction(f, q), ev.qfunction(g, q)
    except ZeroDivisionError:
        return
    assert ev.qfunction(f + g, q) == (vf + vg) % ev.p
    assert ev.qfunction(f * g, q) == vf * vg % ev.p
    assert (f - g) + g == f


# -- evaluation ----------------------------------------------------------------

def test_eval_at_principal_half_root():
    val = qf_eval(qf("1 - q"), QPoint.of(LAM.root(2).inverse()))
    assert val == sc("1") - TorusScalar.unit(CTX, 0, LAM.root(2).inverse())


def test_eval_plain():
    assert qf_eval(qf("1/(1 - q)"), QPoint.of(LAM.inverse())) == sc("1/(1 - L1/L0)")


def test_eval_on_pole():
    with pytest.raises(PoleHit):
        qf_eval(qf("1/(1 - q*L0/L1)"), QPoint.of(LAM.inverse()))


# -- residues ------------------------------------------------------------------

def test_simple_residue():
    assert qf_residue(qf("1/(1 - q*L0/L1)"), PoleLocus.principal(1, LAM)) == TorusScalar.const(CTX, -1)


def test_residue_with_cofactor():
    res = qf_residue(qf("1/((1 - q)*(1 - q*L0/L1))"), PoleLocus.principal(1, LAM))
    assert res == -sc("1/(1 - L1/L0)")


def test_residue_on_square_factor():
    res = qf_residue(qf("1/(1 - q^2*L0/L1)"), PoleLocus.principal(2, LAM))
    assert res == TorusScalar.const(CTX, Fraction(-1, 2))


def test_residue_errors():
    with pytest.raises(NotAPole):
        qf_residue(qf("1/(1 - q)"), PoleLocus.principal(1, LAM))
    with pytest.raises(UnsupportedOrder):
        qf_residue(qf("1/(1 - q*L0/L1)^2"), PoleLocus.principal(1, LAM))


def test_residue_against_sympy_limit():
    # lambda = 9 so that sqrt(lambda) = 3 stays rational
    q = sympy.Symbol("q")
    f_text = "(1 + q)/((1 - q^2*L0/L1)*(1 - q*L1/L0))"
    res = qf_residue(qf(f_text), PoleLocus.principal(2, LAM))
    expr = (1 + q) / ((1 - 9 * q ** 2) * (1 - q / 9))
    q0 = sympy.Rational(1, 3)
    expected = sympy.limit((q - q0) * expr / q, q, q0)
    # specialize Lambda_0 = 9, Lambda_1 = 1, i.e. c = (3, 1) with M = 2
    ev = ModEval(CTX)
    ev.c = [3, 1]
    assert ev.scalar(res) == ev.rat(Fraction(int(expected.p), int(expected.q)))


def _with_simple_pole(rng, ctx, factor, locus):
    while True:
        f = rand_qfunction(rng, ctx, max_factors=2)
        if any(fa.vanishes_at(locus.pole()) for fa in f.den):
            continue
        f = f * QFunction.inverse_factor(factor)
        if any(fa.vanishes_at(locus.pole()) for fa in f.den):
            return f


@given(rngs())
def test_residue_is_additive(rng):
    ctx = AlgebraContext(2, 2)
    mu = Monomial.ratio(ctx, 0, 2)
    a = rng.choice([1, 2])
    locus = PoleLocus.principal(a, mu)
    f = _with_simple_pole(rng, ctx, QFactor(a, mu), locus)
    g = _with_simple_pole(rng, ctx, QFactor(a, mu), locus)
    total = f + g
    if any(fa.vanishes_at(locus.pole()) for fa in total.den):
        rs = qf_residue(total, locus)
    else:
        rs = TorusScalar.zero(ctx)
    assert rs == qf_residue(f, locus) + qf_residue(g, locus)


def test_residue_of_regular_point_is_not_a_pole():
    with pytest.raises(NotAPole):
        qf_residue(qf("1/(1 - q*L0/L1) - 1/(1 - q*L0/L1)"), PoleLocus.principal(1, LAM))


# -- partial fractions --------------------------------------------------------------

def test_two_pole_decomposition():
    pf = qf_partial_fractions(qf("1/((1 - q)*(1 - q*L0/L1))"))
    assert pf.laurent_part.is_zero()
    got = {(t.locus.root.exps, t.locus.zeta_exp): t.coeff for t in pf.fraction_terms}
    assert got[((0, 0), 0)] == sc("1/(1 - L0/L1)")
    assert got[(LAM.exps, 0)] == sc("1/(1 - L1/L0)")


def test_five_term_decomposition():
    f = qf("1/((1 - q^2)*(1 - q*L0/L1)*(1 - q^2*L0/L1))")
    pf = qf_partial_fractions(f)
    assert len(pf.fraction_terms) == 5
    s = LAM.root(2)
    expected = {
        ((0, 0), 0): sc("1/(2*(1 - L0/L1)^2)"),
        ((0, 0), 1): sc("1/(2*(1 - L0^2/L1^2))"),
        (LAM.exps, 0): sc("(L0/L1)^3/((1 - L0/L1)*(1 - L0^2/L1^2))"),
        (s.exps, 0): -TorusScalar.unit(CTX, 0, LAM, Fraction(1, 2))
        * TorusScalar.inverse_binomials(CTX, [LAM, s]),
        (s.exps, 1): -TorusScalar.unit(CTX, 0, LAM, Fraction(1, 2))
        * TorusScalar.inverse_binomials(CTX, [LAM])
        * (TorusScalar.const(CTX, 1) + TorusScalar.unit(CTX, 0, s)).inverse(),
    }
    got = {(t.locus.root.exps, t.locus.zeta_exp): t.coeff for t in pf.fraction_terms}
    assert got.keys() == expected.keys()
    for key, val in expected.items():
        assert got[key] == val, key
    assert pf.recombine() == f


def test_five_term_decomposition_against_sympy_apart():
    q = sympy.Symbol("q")
    expr = 1 / ((1 - q ** 2) * (1 - 4 * q) * (1 - 4 * q ** 2))
    expected = sympy.apart(expr, q)
    pf = qf_partial_fractions(qf("1/((1 - q^2)*(1 - q*L0/L1)*(1 - q^2*L0/L1))"))
    ev = ModEval(CTX)
    ev.c = [2, 1]  # Lambda_0 = 4, Lambda_1 = 1, sqrt(lambda) = 2
    # compare at several rational points through the modular image
    for point in (5, 7, 11, 13):
        want = sympy.Rational(expected.subs(q, point))
        got = sum(ev.qfunction(t.as_qfunction(), point) for t in pf.fraction_terms) % ev.p
        assert got == ev.rat(Fraction(int(want.p), int(want.q)))


def test_single_pole_is_its_own_decomposition():
    pf = qf_partial_fractions(qf("1/(1 - q)"))
    assert pf.laurent_part.is_zero()
    assert len(pf.fraction_terms) == 1 and pf.fraction_terms[0].coeff == TorusScalar.const(CTX, 1)


def test_partial_fractions_need_roots():
    with pytest.raises(RootOrderExceeded):
        qf_partial_fractions(qf("1/(1 - q^2*L0)", AlgebraContext(1, 1)))


@given(rngs())
def test_recombination_is_exact(rng):
    ctx = AlgebraContext(rng.choice([1, 2]), 2)
    f = rand_qfunction(rng, ctx)
    assert qf_partial_fractions(f).recombine() == f


# -- K+ / K- ---------------------------------------------------------------------------

def test_split_examples():
    kp, km = qf_split_kpm(qf("(1 - q) + 1/(1 - q*L0/L1)"))
    assert kp == qf("1 - q") and km == qf("1/(1 - q*L0/L1)")
    kp, km = qf_split_kpm(qf("q^2/(1 - q*L0/L1)"))
    assert kp == qf("-q*L1/L0 - L1^2/L0^2")
    assert km == qf("(L1^2/L0^2)/(1 - q*L0/L1)")
    kp, km = qf_split_kpm(QFunction.const(CTX, 5))
    assert kp == QFunction.const(CTX, 5) and km.is_zero()


def _is_proper(f):
    return f.is_zero() or (min(f.num) >= 0 and max(f.num) < f.den_degree())


@given(rngs())
def test_split_properties(rng):
    ctx = AlgebraContext(rng.choice([1, 2]), 2)
    f = rand_qfunction(rng, ctx)
    kp, km = qf_split_kpm(f)
    assert kp + km == f
    assert kp.is_laurent()
    assert _is_proper(km)
    assert qf_split_kpm(kp) == (kp, QFunction.zero(ctx))
    kp2, km2 = qf_split_kpm(km)
    assert kp2.is_zero() and km2 == km


def test_split_matches_partial_fractions():
    f = qf("(q^3 + q^-1)/((1 - q^2)*(1 - q*L0/L1))")
    kp, km = qf_split_kpm(f)
    pf = qf_partial_fractions(f)
    assert kp == pf.laurent_part
    total = QFunction.zero(CTX)
    for t in pf.fraction_terms:
        total = total + t.as_qfunction()
    assert km == total
