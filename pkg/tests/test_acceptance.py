"""The nine acceptance criteria, one test each.

A line per criterion (PASS or FAIL) is printed in the terminal summary.
"""

import json
import math
import random
import time
from fractions import Fraction as F

import mpmath
import pytest

from swisscheese import persistence
from swisscheese.calculus import (
    RationalMap,
    SupNormEstimate,
    certify_poles,
    choose_N,
    dc_chain_verify,
    derivative_estimate_sequence,
    sup_norm,
    verify_derivative_bound,
)
from swisscheese.cheese import (
    SwissCheese,
    UnitFunctionCandidate,
    build_cheese,
    check_unit_function,
    pole_ring_family,
)
from swisscheese.cli import OK, main
from swisscheese.cyclotomic import Cyclo
from swisscheese.geometry import BoundPair, Disc, QPoint
from swisscheese.measures import build_constraints, check_measure, control_disc_algebra, control_problem, roots_of_unity
from swisscheese.slits import (
    X0,
    check_isolated_point_lemma,
    classify,
    is_interval_system,
    random_system,
    system_from_rule,
)
from swisscheese.simplex import LinearSystem, solve
from swisscheese.targets import CantorProduct, D0Bound, d0_of, default_segment, fat_cantor, svc_limit_length

from oracles import contains, grid_feasible, iv_sqrt, point_level_classify
from test_calculus import three_maps
from test_measures import _random_tu_instance


def test_criterion_1_pipeline_certification(tmp_path):
    out = tmp_path / "ws.json"
    t0 = time.perf_counter()
    assert main(["build", "--target", "segment", "--discs", "100", "--kmax", "10", "--m-count", "4",
                 "--out", str(out)]) == OK
    assert main(["verify", str(out)]) == OK
    elapsed = time.perf_counter() - t0
    ws = persistence.read(out)
    assert len(ws.cheese.groups) == 100
    assert all(len(g.deleted) >= 4 for g in ws.cheese.groups)
    names = {c.name.split("[")[0] for c in ws.cheese.certificates}
    assert {"containment", "disjointness", "epsilon_choice", "epsilon_bound"} <= names
    ks = {c.name for c in ws.cheese.certificates if c.name.startswith("epsilon_bound")}
    assert len(ks) >= 10
    assert all(c.passed for c in ws.cheese.certificates)
    assert elapsed <= 60


def test_criterion_2_derivative_bound_oracle_suite():
    X = build_cheese(default_segment(), 6, kmax=8)
    deleted = X.deleted_discs()
    violations = 0
    for f in three_maps(X):
        refs = certify_poles(f, deleted)
        assert all(r != "exterior" for r in refs)
        sup = sup_norm(f, X)
        for z in default_segment().samples(100):
            violations += len(verify_derivative_bound(X, f, z, range(0, 9), sup).violations)
    assert violations == 0
    bare = SwissCheese(default_segment(), [])
    for k in range(1, 9):
        (chk,) = verify_derivative_bound(bare, RationalMap.monomial(k), QPoint(0, 0), [k],
                                         SupNormEstimate.declared(1)).checks
        assert chk.passed and chk.bound.contains(math.factorial(k))
        assert chk.bound.width <= F(1, 10**9)


def test_criterion_3_denjoy_carleman_chain():
    d0 = D0Bound(BoundPair(F(1, 2), F(1, 2)))
    assert choose_N(d0) == 7
    # scan oracle, independent of the certified logs: log(k+3)^k (1/2)^(k+1) >= 1
    with mpmath.workdps(50):
        ok = [mpmath.log(k + 3) ** k / mpmath.mpf(2) ** (k + 1) >= 1 for k in range(1, 101)]
    assert not ok[5] and all(ok[6:])
    seq = derivative_estimate_sequence(d0, SupNormEstimate.declared(1), range(1, 60))
    rep = dc_chain_verify(seq, 7, 50)
    asserted = [s for s in rep.steps if s.asserted]
    assert [s.k for s in asserted] == list(range(7, 58))
    assert all(s.step_i and s.step_ii and s.step_iii for s in asserted)
    assert rep.passed


def test_criterion_4_fat_cantor_instantiation(tmp_path):
    svc = fat_cantor(6)
    lim = svc_limit_length(svc)
    assert lim.exact and lim.length.lower == lim.length.upper == F(1, 2)
    K = CantorProduct(svc)
    assert K.area().lower == K.area().upper == F(1, 2)
    env = d0_of(K).value
    lo, hi = iv_sqrt(F(1, 2))
    assert contains(env, (1 - hi, 1 - lo)) and env.width <= F(1, 10**6)
    out = tmp_path / "cantor.json"
    assert main(["build", "--target", "cantor", "--discs", "50", "--kmax", "10", "--out", str(out)]) == OK
    assert main(["verify", str(out)]) == OK


def test_criterion_5_slit_model_classification():
    for N in range(2, 11):
        right = system_from_rule(N, "rightward")
        cls = classify(right)
        assert cls.r_points == {X0} and cls.points_of_continuity == set()
        assert point_level_classify(right) == ({X0}, set())
        left = system_from_rule(N, "leftward")
        cls = classify(left)
        assert cls.points_of_continuity == {X0} and cls.r_points == set()
        assert point_level_classify(left) == (set(), {X0})


def test_criterion_6_isolated_point_lemma_search():
    rng = random.Random(20261015)
    counterexamples = 0
    for _ in range(10_000):
        s = random_system(rng, rng.randint(1, 10))
        assert is_interval_system(s)
        counterexamples += len(check_isolated_point_lemma(s).counterexamples)
    assert counterexamples == 0


def test_criterion_7_measures():
    r = control_disc_algebra(8)
    mu = r.measure
    assert r.status == "feasible"
    assert mu.weight_at(Cyclo.rational(8, 0)) == 0
    assert all(mu.weight_at(w) == F(1, 8) for w in roots_of_unity(8))
    p = control_problem(8)
    system = build_constraints(p)
    w = [mu.weight_at(z) for z in p.support]
    for row, res in zip(system.rows, system.residuals(w)):
        if row.sense == "==":
            assert res == 0
    # Jensen rows with certified envelopes
    pj = control_problem(8, "jensen")
    rj = control_disc_algebra(8, "jensen")
    assert rj.status == "feasible" and check_measure(pj, rj.measure)
    rng = random.Random(2024)
    agree = 0
    for _ in range(200):
        A_eq, b_eq, A_ub, b_ub = _random_tu_instance(rng)
        s = LinearSystem(4)
        for row, rhs in zip(A_eq, b_eq):
            s.add(row, "==", F(rhs, 64))
        for row, rhs in zip(A_ub, b_ub):
            s.add(row, "<=", F(rhs, 64))
        s.add([1] * 4, "==", 1)
        agree += (solve(s).status == "feasible") == grid_feasible(A_eq, b_eq, A_ub, b_ub, 4)
    assert agree == 200


def test_criterion_8_unit_function_checker():
    D = Disc(QPoint(0, 0), F(1, 2))
    good = pole_ring_family(D, F(1, 100))
    assert good.plan.size >= 1000
    assert check_unit_function(good).passed
    stray = RationalMap.pole(QPoint(F(1, 10), 0), 1)
    pole_on_X = UnitFunctionCandidate(D, good.deleted, good.sequence[:-1] + [good.sequence[-1] + stray], good.plan)
    rep = check_unit_function(pole_on_X)
    assert not rep.passed and rep.witnesses["poles"] == QPoint(F(1, 10), 0)
    vanishing = UnitFunctionCandidate(D, good.deleted, [f.mul_linear(D.center) for f in good.sequence], good.plan)
    rep = check_unit_function(vanishing)
    assert not rep.passed and rep.witnesses["nonzero_inside"] == D.center
    flip = UnitFunctionCandidate(D, [], [RationalMap.constant((-1) ** n) for n in range(6)], good.plan)
    rep = check_unit_function(flip)
    assert not rep.passed and "convergence" in rep.witnesses


def test_criterion_9_reproducibility(tmp_path):
    flags = ["--target", "segment", "--discs", "20", "--kmax", "8", "--seed", "11"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["build", *flags, "--out", str(a)]) == OK
    assert main(["build", *flags, "--out", str(b)]) == OK
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text(encoding="utf-8")
    assert persistence.canonicalize(text) == text
    assert persistence.dumps(persistence.read(a)) == text
    for what, extra in (("cheese", ["--workspace", str(a)]), ("chain", []), ("block", []), ("empty", [])):
        s1, s2 = tmp_path / f"{what}1.svg", tmp_path / f"{what}2.svg"
        assert main(["render", what, *extra, "--out", str(s1)]) == OK
        assert main(["render", what, *extra, "--out", str(s2)]) == OK
        assert s1.read_bytes() == s2.read_bytes()
