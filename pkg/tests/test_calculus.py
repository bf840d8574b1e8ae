import math
from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import assume, given, settings, strategies as st

from swisscheese.calculus import (
    NotFound,
    PoleError,
    RationalMap,
    SamplePlan,
    SupNormEstimate,
    cauchy_bound,
    choose_N,
    dc_chain_verify,
    derivative,
    derivative_estimate_sequence,
    log_k3,
    sup_norm,
    verify_derivative_bound,
)
from swisscheese.cheese import assemble, build_cheese
from swisscheese.geometry import BoundPair, QPoint
from swisscheese.targets import D0Bound, default_segment

from oracles import mp, simple_pole_derivative

SEG = default_segment()
ONE = SupNormEstimate.declared(1)


def bare_disc():
    return assemble(None, [])


def test_eval_examples():
    assert RationalMap.identity().eval(0) == QPoint(0, 0)
    assert RationalMap.pole(QPoint(2, 0)).eval(0) == QPoint(F(-1, 2), 0)
    f = RationalMap.from_quotient([-1, 0, 1], [-1, 1])
    assert f.eval(2) == QPoint(3, 0)
    with pytest.raises(PoleError):
        RationalMap.pole(QPoint(2, 0)).eval(2)


def test_derivative_examples():
    assert derivative(RationalMap.monomial(2), 1).eval(3) == QPoint(6, 0)
    g = RationalMap.pole(QPoint(F(1, 3), F(1, 5))) + RationalMap.monomial(3)
    assert derivative(g, 0) == g


@pytest.mark.parametrize("a", [QPoint(2, 0), QPoint(F(-1, 3), F(3, 4)), QPoint(0, F(5, 7))])
def test_simple_pole_derivatives_closed_form(a):
    f = RationalMap.pole(a)
    z = QPoint(F(1, 10), F(-1, 9))
    for k in range(0, 9):
        exact = complex(derivative(f, k).eval(z))
        ref = simple_pole_derivative(complex(a), k, complex(z))
        assert abs(exact - ref) <= 1e-12 * abs(ref)


def test_sup_norm_examples():
    X = bare_disc()
    s = sup_norm(RationalMap.identity(), X, SamplePlan(outer=32))
    assert s.value.lower == 1
    c = sup_norm(RationalMap.constant(5), X)
    assert c.value.lower == c.value.upper == 5


def test_sup_norm_pole_in_deleted_disc_two_resolutions():
    X = build_cheese(SEG, 1, kmax=6)
    D = X.deleted_discs()[0]
    f = RationalMap.pole(D.center)
    coarse = sup_norm(f, X, SamplePlan(outer=16, per_disc=8))
    fine = sup_norm(f, X, SamplePlan(outer=64, per_disc=64))
    # on the circle around the pole |f| = 1/r, the true supremum over X
    assert abs(coarse.value.lower - fine.value.lower) <= F(1, 10**9) * fine.value.lower
    assert abs(fine.value.lower - 1 / D.radius) <= F(1, 10**9) * fine.value.lower
    assert fine.value.upper >= 1 / D.radius


def test_cauchy_bound_bare_disc():
    X = bare_disc()
    for k in range(0, 8):
        b = cauchy_bound(X, QPoint(0, 0), k, ONE)
        assert b.lower == b.upper == math.factorial(k)


def test_cauchy_bound_three_discs_against_mpmath():
    X = build_cheese(SEG, 1, kmax=6, m_count=3)
    assert len(X.deleted_discs()) == 3
    z = QPoint(F(1, 5), 0)
    b = cauchy_bound(X, z, 2, ONE)
    with mpmath.workdps(50):
        total = 1 / (1 - mpmath.mpf(1) / 5) ** 3
        for D in X.deleted_discs():
            dist = mpmath.sqrt((mp(D.center.re) - mpmath.mpf(1) / 5) ** 2 + mp(D.center.im) ** 2) - mp(D.radius)
            total += mp(D.radius) / dist**3
        ref = 2 * total
        assert mp(b.lower) <= ref <= mp(b.upper)
    assert b.width <= F(1, 10**9) * b.upper


def test_verify_constant_and_equality_case():
    X = bare_disc()
    rep = verify_derivative_bound(X, RationalMap.constant(F(7, 3)), QPoint(0, 0), range(0, 8),
                                  SupNormEstimate.declared(F(7, 3)))
    assert rep.passed
    for k in range(1, 9):
        rep = verify_derivative_bound(X, RationalMap.monomial(k), QPoint(0, 0), [k], ONE)
        (chk,) = rep.checks
        assert chk.passed
        assert chk.value_abs2 == math.factorial(k) ** 2
        assert chk.bound.contains(math.factorial(k)) and chk.bound.width <= F(1, 10**9)


def three_maps(X):
    cs = [g.deleted[0].center for g in X.groups]
    return [
        RationalMap.pole(cs[0]),
        RationalMap.monomial(2, F(1, 2)) + RationalMap.pole(cs[1], F(1, 3), 2),
        RationalMap.pole(cs[0], F(1, 4)) + RationalMap.pole(cs[2], F(-2, 5)) + RationalMap.identity(),
    ]


def test_pole_in_deleted_disc_zero_violations():
    X = build_cheese(SEG, 6, kmax=8)
    f = three_maps(X)[0]
    sup = sup_norm(f, X)
    bad = 0
    for z in SEG.samples(100):
        bad += len(verify_derivative_bound(X, f, z, range(0, 9), sup).violations)
    assert bad == 0


def test_sequence_examples():
    U = log_k3(1).upper
    seq = derivative_estimate_sequence(D0Bound(BoundPair(F(1, 2), F(1, 2))), ONE, range(1, 6))
    assert seq.M(1) == 4 + U
    assert abs(float(U) - math.log(4)) < 1e-15
    big = derivative_estimate_sequence(D0Bound(BoundPair(1, 1)), ONE, range(1, 10))
    for k in range(1, 10):
        assert big.M(k) <= math.factorial(k) * (1 + log_k3(k).upper ** k)
    two = derivative_estimate_sequence(D0Bound(BoundPair(1, 1)), SupNormEstimate.declared(2), range(1, 10))
    assert all(two.M(k) == 2 * big.M(k) for k in range(1, 10))


def test_choose_N_examples():
    assert choose_N(D0Bound(BoundPair(1, 1))) == 1
    assert choose_N(D0Bound(BoundPair(F(1, 2), F(1, 2)))) == 7
    with mpmath.workdps(40):
        assert mpmath.log(9) ** 6 * mpmath.mpf(1) / 2**7 < 1
        assert mpmath.log(10) ** 7 * mpmath.mpf(1) / 2**8 >= 1
        assert mpmath.log(9) < mpmath.mpf(2) ** (mpmath.mpf(7) / 6)
    with pytest.raises(NotFound):
        choose_N(D0Bound(BoundPair(F(1, 10**6), F(1, 10**6))), scan_limit=5)


def test_chain_examples():
    seq = derivative_estimate_sequence(D0Bound(BoundPair(F(1, 2), F(1, 2))), ONE, range(1, 60))
    rep = dc_chain_verify(seq, 7, 50, extra=[1, 3])
    assert rep.passed
    below = [s for s in rep.steps if s.k < 7]
    assert [s.k for s in below] == [1, 3] and not any(s.asserted for s in below)
    assert below[0].step_ii  # (1!)^(1/1) <= 1
    with mpmath.workdps(40):
        ref = mpmath.fsum(1 / (mpmath.root(2, k) * k * mpmath.log(k + 3)) for k in range(7, 58))
    assert mp(rep.partial_sum_lower) <= ref
    assert ref - mp(rep.partial_sum_lower) < mpmath.mpf(10) ** -9


# invariants -----------------------------------------------------------------------

small_q = st.fractions(F(-3, 4), F(3, 4), max_denominator=12)
far_q = st.fractions(F(2), F(4), max_denominator=8)


@st.composite
def maps(draw):
    poly = draw(st.lists(st.builds(QPoint, small_q, small_q), max_size=4))
    f = RationalMap.polynomial(poly)
    for _ in range(draw(st.integers(0, 2))):
        p = QPoint(draw(far_q) * draw(st.sampled_from([1, -1])), draw(small_q))
        f = f + RationalMap.pole(p, draw(st.builds(QPoint, small_q, small_q)), draw(st.integers(1, 3)))
    return f


@settings(max_examples=60, deadline=None)
@given(maps(), st.integers(0, 4))
def test_derivative_composes(f, k):
    assert derivative(derivative(f, k), 1) == derivative(f, k + 1)


@settings(max_examples=60, deadline=None)
@given(maps(), st.builds(QPoint, small_q, small_q))
def test_finite_differences_converge(f, z):
    exact = derivative(f, 1).eval(z)
    errs = []
    for h in (F(1, 100), F(1, 200), F(1, 400)):
        fd = (f.eval(z + QPoint(h, 0)) - f.eval(z - QPoint(h, 0))) / QPoint(2 * h, 0)
        errs.append((fd - exact).abs2())
    assume(errs[0] > 0)
    # central differences: the error falls by about 4 per halving; ask for at least 2
    assert errs[1] * 4 <= errs[0] and errs[2] * 4 <= errs[1]


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2), st.data())
def test_lemma_bound_never_fails(count, which, data):
    X = build_cheese(SEG, max(count, 3), kmax=6)
    f = three_maps(X)[which]
    sup = sup_norm(f, X, SamplePlan(outer=16, per_disc=4))
    i = data.draw(st.integers(0, 40))
    z = SEG.samples(41)[i]
    assert verify_derivative_bound(X, f, z, range(0, 9), sup).passed


@settings(max_examples=25, deadline=None)
@given(st.fractions(F(1, 3), F(3), max_denominator=20))
def test_chain_holds_after_choose_N(d):
    d0 = D0Bound(BoundPair(d, d))
    N = choose_N(d0)
    seq = derivative_estimate_sequence(d0, ONE, range(N, N + 31))
    assert dc_chain_verify(seq, N, 30).passed
