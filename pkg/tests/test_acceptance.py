"""Acceptance gate: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the output even
without ``-s``) or directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import random
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from oracles import ModEval, rand_qfunction, rand_scalar  # noqa: E402
from qkloc import (  # noqa: E402
    AlgebraContext,
    KClass,
    LegSpec,
    Monomial,
    PoleLocus,
    PPolynomial,
    QFactor,
    QFunction,
    QPoint,
    ReferenceOracle,
    TorusScalar,
    c_coeff,
    cyc_reduce,
    j_series,
    lefschetz_residue_form,
    lefschetz_trace,
    p_to_phi,
    parse_value,
    phi_to_p,
    qf_eval,
    qf_partial_fractions,
    qf_residue,
    qf_split_kpm,
    reconstruct,
    verify_degree2_example,
    verify_recursion,
)

SEED = 20240917
CASES = 200


def _report(capsys, number: int, title: str, passed: bool, tolerance: str, elapsed: float, limit: float | None):
    timing = f"{elapsed:.2f}s" + (f" (limit {limit:.0f}s)" if limit is not None else "")
    line = f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}; tolerance: {tolerance}; runtime {timing}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    return line


# -- 1 -----------------------------------------------------------------------------

def criterion_1() -> tuple[bool, float]:
    t0 = time.perf_counter()
    ok = verify_degree2_example()
    return ok, time.perf_counter() - t0


# -- 2 -----------------------------------------------------------------------------

def criterion_2() -> tuple[bool, float]:
    t0 = time.perf_counter()
    ok = True
    for n in (1, 2, 3):
        ctx = AlgebraContext(n, 12)
        for i in range(ctx.nvars):
            for j in range(ctx.nvars):
                if i == j:
                    continue
                for m in (1, 2, 3, 4):
                    leg = LegSpec(i, j, m)
                    ok &= c_coeff(ctx, leg, "product") == c_coeff(ctx, leg, "tangent")
    return ok, time.perf_counter() - t0


# -- 3 -----------------------------------------------------------------------------

def criterion_3() -> tuple[bool, float]:
    t0 = time.perf_counter()
    ok = True
    for n in (1, 2):
        ctx = AlgebraContext(n, 12)
        series = j_series(ctx, 4)
        for i in range(ctx.nvars):
            for j in range(ctx.nvars):
                if i == j:
                    continue
                for m in (1, 2, 3):
                    report = verify_recursion(ctx, i, j, m, series, 4)
                    ok &= report.passed and len(report.checks) == 4 - m + 1
    return ok, time.perf_counter() - t0


# -- 4 -----------------------------------------------------------------------------

def criterion_4() -> tuple[bool, float]:
    t0 = time.perf_counter()
    ctx = AlgebraContext(1, 1)
    report = verify_recursion(ctx, 0, 1, 1, j_series(ctx, 1), 1)
    minus_one = TorusScalar.const(ctx, -1)
    (check,) = report.checks
    ok = check.d == 1 and check.passed and check.lhs == minus_one and check.rhs == minus_one
    return ok, time.perf_counter() - t0


# -- 5 -----------------------------------------------------------------------------

def criterion_5() -> tuple[bool, float]:
    t0 = time.perf_counter()
    ok = True
    for n, D in [(1, 0), (1, 1), (1, 2), (1, 3), (2, 0), (2, 1), (2, 2)]:
        ctx = AlgebraContext(n, {0: 1, 1: 1, 2: 2, 3: 6}[D])
        ok &= reconstruct(ctx, D, ReferenceOracle(ctx)) == j_series(ctx, D)
    return ok, time.perf_counter() - t0


# -- 6 -----------------------------------------------------------------------------

def criterion_6() -> tuple[bool, float]:
    t0 = time.perf_counter()
    ok = True
    for n in (1, 2):
        ctx = AlgebraContext(n, 1)
        for k in range(-4, 5):
            form = lefschetz_residue_form(ctx, k)
            ok &= form.is_laurent() and lefschetz_trace(ctx, k) == form
    ctx = AlgebraContext(1, 1)
    spot = {0: "1", 1: "0", -1: "1/L0 + 1/L1", 2: "-L0*L1"}
    for k, text in spot.items():
        want = parse_value(text, ctx, "scalar")
        ok &= lefschetz_trace(ctx, k) == want and lefschetz_residue_form(ctx, k) == want
    return ok, time.perf_counter() - t0


# -- 7 -----------------------------------------------------------------------------

def _suite_partial_fractions(rng: random.Random) -> bool:
    ctx = AlgebraContext(rng.choice([1, 2]), rng.choice([2, 4]))
    f = rand_qfunction(rng, ctx)
    return qf_partial_fractions(f).recombine() == f


def _suite_split(rng: random.Random) -> bool:
    ctx = AlgebraContext(rng.choice([1, 2]), 2)
    f = rand_qfunction(rng, ctx)
    kp, km = qf_split_kpm(f)
    proper = km.is_zero() or (min(km.num) >= 0 and max(km.num) < km.den_degree())
    zero = QFunction.zero(ctx)
    return (
        kp + km == f
        and kp.is_laurent()
        and proper
        and qf_split_kpm(kp) == (kp, zero)
        and qf_split_kpm(km) == (zero, km)
    )


def _suite_residue_additivity(rng: random.Random) -> bool:
    ctx = AlgebraContext(2, 2)
    a = rng.choice([1, 2])
    mu = Monomial.ratio(ctx, rng.randrange(1, 3), 0)
    locus = PoleLocus.principal(a, mu)
    fs = []
    while len(fs) < 2:
        # keep the chosen pole simple and the cofactors regular there
        f = rand_qfunction(rng, ctx, max_factors=2)
        point = locus.pole()
        if any(fa.vanishes_at(point) for fa in f.den):
            continue
        f = f * QFunction.inverse_factor(QFactor(a, mu))
        if any(fa.vanishes_at(point) for fa in f.den):
            fs.append(f)
    f, g = fs
    c = rand_scalar(rng, ctx, 1)
    total = f + g * c
    if any(fa.vanishes_at(locus.pole()) for fa in total.den):
        lhs = qf_residue(total, locus)
    else:
        # the pole cancelled in the sum; its residue is zero
        lhs = TorusScalar.zero(ctx)
    return lhs == qf_residue(f, locus) + qf_residue(g, locus) * c


def _suite_sum_over_roots(rng: random.Random) -> bool:
    """``p(q)/(1 - q^m mu)`` rebuilt from its ``m`` elementary fractions and from branch residues."""
    ctx = AlgebraContext(rng.choice([1, 2]), 12)
    m = rng.choice([1, 2, 3, 4])
    mu = Monomial._raw(ctx, tuple(12 * rng.randint(-2, 2) for _ in range(ctx.nvars)))
    if mu.is_identity():
        mu = Monomial.var(ctx, 0)
    num = {k: rand_scalar(rng, ctx, 1) for k in range(m) if rng.random() < 0.8}
    f = QFunction(ctx, num, [QFactor(m, mu)])
    pf = qf_partial_fractions(f)
    if f.is_zero():
        return not pf.fraction_terms
    if len(pf.fraction_terms) > m or not pf.laurent_part.is_zero():
        return False
    # rationalize sum_l c_l / (1 - q nu_l) over 1 - q^m mu
    total: dict[int, TorusScalar] = {}
    for term in pf.fraction_terms:
        nu = term.locus
        # c_l = -Res_{q = 1/nu_l} f dq/q
        if term.coeff != -qf_residue(f, nu):
            return False
        for k in range(m):
            piece = term.coeff.mul_unit(nu.zeta_exp * k, (nu.root ** k).exps)
            total[k] = total[k] + piece if k in total else piece
    if QFunction(ctx, total, [QFactor(m, mu)]) != f:
        return False
    # value at a point off the pole agrees with the closed form
    x = QPoint.of(Monomial._raw(ctx, tuple(12 * (5 + 3 * v) for v in range(ctx.nvars))))
    return qf_eval(f, x) == qf_eval(QFunction(ctx, total, [QFactor(m, mu)]), x)


def _suite_basis_round_trip(rng: random.Random) -> bool:
    ctx = AlgebraContext(rng.choice([1, 2]), 1)
    p = PPolynomial(ctx, [rand_scalar(rng, ctx, 1) for _ in range(rng.randint(0, ctx.nvars))])
    k = KClass(tuple(rand_scalar(rng, ctx, 1) for _ in range(ctx.nvars)))
    return phi_to_p(p_to_phi(p)) == p and p_to_phi(phi_to_p(k)) == k


def _suite_cyclotomic_modular(rng: random.Random) -> bool:
    order = rng.choice([3, 4, 5, 6, 7, 8, 9, 10, 12, 15])
    ev = ModEval(AlgebraContext(1, order), rng.randrange(1000))
    a_raw = [(rng.randrange(3 * order), rng.randint(-5, 5)) for _ in range(rng.randint(1, 6))]
    b_raw = [(rng.randrange(3 * order), rng.randint(-5, 5)) for _ in range(rng.randint(1, 6))]
    a, b = cyc_reduce(a_raw, order), cyc_reduce(b_raw, order)
    direct = lambda raw: sum(c * pow(ev.root, t, ev.p) for t, c in raw) % ev.p  # noqa: E731
    ok = ev.cyc(a) == direct(a_raw) and ev.cyc(a * b) == direct(a_raw) * direct(b_raw) % ev.p
    ok &= ev.cyc(a + b) == (direct(a_raw) + direct(b_raw)) % ev.p
    if not a.is_zero():
        ok &= ev.cyc(a.inverse()) * direct(a_raw) % ev.p == 1
    return ok


SUITES = {
    "partial-fraction recombination": _suite_partial_fractions,
    "K+/K- split, resum and idempotence": _suite_split,
    "residue additivity": _suite_residue_additivity,
    "sum-over-roots rationalization": _suite_sum_over_roots,
    "phi/P basis round trip": _suite_basis_round_trip,
    "cyclotomic modular homomorphism": _suite_cyclotomic_modular,
}


def criterion_7() -> tuple[bool, float, dict[str, int]]:
    t0 = time.perf_counter()
    failures = {}
    for offset, (name, suite) in enumerate(SUITES.items()):
        rng = random.Random(SEED + offset)
        failures[name] = sum(not suite(rng) for _ in range(CASES))
    return not any(failures.values()), time.perf_counter() - t0, failures


# -- 8 -----------------------------------------------------------------------------

def criterion_8() -> tuple[bool, float]:
    """Only the oracle contract and the mod-Q triviality are checkable here."""
    t0 = time.perf_counter()
    ok = True
    for n in (1, 2):
        ctx = AlgebraContext(n, 2)
        oracle = ReferenceOracle(ctx)
        zero = QFunction.zero(ctx)
        ok &= all(oracle.unity_part(i, 0, [], zero).is_zero() for i in range(ctx.nvars))
        rebuilt = reconstruct(ctx, 2, oracle)
        ok &= all(rebuilt.coeff(i, 0) == QFunction.dilaton(ctx) for i in range(ctx.nvars))
        ok &= all(j_series(ctx, 2).coeff(i, 0) == QFunction.dilaton(ctx) for i in range(ctx.nvars))
    return ok, time.perf_counter() - t0


# -- pytest entry points ---------------------------------------------------------------

def test_criterion_1_degree2_decomposition(capsys):
    ok, dt = criterion_1()
    _report(capsys, 1, "five-term degree-2 identity", ok, "exact equality", dt, 5)
    assert ok and dt < 5


def test_criterion_2_dual_c_coefficients(capsys):
    ok, dt = criterion_2()
    _report(capsys, 2, "C_ij(m) product == tangent, N<=3, m<=4", ok, "exact equality", dt, 30)
    assert ok and dt < 30


def test_criterion_3_residue_recursion(capsys):
    ok, dt = criterion_3()
    _report(capsys, 3, "residue recursion on closed form, N<=2, m<=3, D=4", ok, "exact degreewise equality", dt, 120)
    assert ok and dt < 120


def test_criterion_4_anchor(capsys):
    ok, dt = criterion_4()
    _report(capsys, 4, "anchor (N=1, i=0, j=1, m=1, d=1): lhs = rhs = -1", ok, "exact equality", dt, None)
    assert ok


def test_criterion_5_reconstruction(capsys):
    ok, dt = criterion_5()
    _report(capsys, 5, "reconstruction == closed form, (N=1, D<=3), (N=2, D<=2)", ok, "exact equality", dt, 120)
    assert ok and dt < 120


def test_criterion_6_lefschetz(capsys):
    ok, dt = criterion_6()
    _report(capsys, 6, "Lefschetz trace == residue form, N<=2, |k|<=4, plus spot values", ok, "exact equality", dt,
            None)
    assert ok


def test_criterion_7_property_suites(capsys):
    ok, dt, failures = criterion_7()
    detail = ", ".join(f"{name}: {CASES - bad}/{CASES}" for name, bad in failures.items())
    _report(capsys, 7, f"property suites, seed {SEED} ({detail})", ok, "exact", dt, 60)
    assert ok and dt < 60


def test_criterion_8_oracle_contract(capsys):
    ok, dt = criterion_8()
    _report(
        capsys, 8,
        "oracle contract and mod-Q triviality (equality with the point J-function is not reproducible here)",
        ok, "exact equality", dt, None,
    )
    assert ok


if __name__ == "__main__":
    results = []
    for number, fn in enumerate(
        [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8], 1
    ):
        out = fn()
        results.append(out[0])
        _report(None, number, fn.__name__, out[0], "exact", out[1], None)
    sys.exit(0 if all(results) else 1)
