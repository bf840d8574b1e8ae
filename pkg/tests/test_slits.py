import random
import xml.etree.ElementTree as ET
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from swisscheese.cheese import build_cheese
from swisscheese.geometry import QPoint, dist_point_point_sq
from swisscheese.render import PX, to_svg
from swisscheese.slits import (
    X0,
    PropagationSystem,
    Slit,
    SlitChain,
    SlitError,
    build_chain,
    build_slit_block,
    check_isolated_point_lemma,
    classify,
    figure_block,
    hull,
    is_interval_system,
    propagation_from_chain,
    random_system,
    render_svg,
    system_from_rule,
)
from swisscheese.targets import default_segment

from oracles import point_level_classify

SVG = "{http://www.w3.org/2000/svg}"
TRAP = [QPoint(0, 0), QPoint(F(3, 2), 0), QPoint(F(3, 2), 1), QPoint(0, F(7, 4))]


def test_block_three_slits_valid():
    slits = [Slit(F(1, 2), F(1, 4), F(1, 4)), Slit(1, F(3, 8), F(1, 8)), Slit(F(5, 4), F(1, 2), F(1, 16))]
    b = build_slit_block(TRAP, slits, "right")
    assert len(b.slits) == 3


def test_block_equal_widths_rejected():
    slits = [Slit(F(1, 2), F(1, 4), F(1, 4)), Slit(1, F(3, 8), F(1, 4))]
    with pytest.raises(SlitError):
        build_slit_block(TRAP, slits, "right")


def test_block_other_rejections():
    with pytest.raises(SlitError):
        build_slit_block(TRAP, [Slit(F(1, 2), 2, F(1, 4))], "right")  # reaches the bottom
    with pytest.raises(SlitError):
        build_slit_block(TRAP, [Slit(1, F(1, 4), F(1, 4)), Slit(F(1, 2), F(3, 8), F(1, 8))], "right")
    with pytest.raises(SlitError):
        build_slit_block(TRAP, [], "up")


def test_figure_block_and_round_trip():
    b = figure_block()
    assert len(b.slits) == 6
    assert type(b).from_json(b.to_json()) == b
    left = figure_block("left")
    assert [s.x for s in left.slits] == sorted((s.x for s in left.slits), reverse=True)


def test_chain_scaling():
    ch = build_chain(figure_block(), 4)
    r = F(4, 7)
    W = ch.blocks[0].right - ch.blocks[0].left
    for n, b in enumerate(ch.blocks):
        assert b.right - b.left == W * r**n
        assert [s.width for s in b.slits] == [s.width * r**n for s in ch.blocks[0].slits]
    assert ch.x0 == QPoint(F(7, 2), 0)
    assert SlitChain.from_json(ch.to_json()) == ch


def test_chain_minimal_and_invalid():
    assert len(build_chain(figure_block(), 2).blocks) == 2
    with pytest.raises(SlitError):
        build_chain(figure_block(), 1)
    with pytest.raises(SlitError):
        build_chain(figure_block(), 3, ratio=F(3, 2))


def test_chain_converges_to_x0():
    ch = build_chain(figure_block(), 8)
    r = F(4, 7)
    far0 = max(dist_point_point_sq(v, ch.x0) for v in ch.blocks[0].vertices)
    for n, b in enumerate(ch.blocks):
        far = max(dist_point_point_sq(v, ch.x0) for v in b.vertices)
        assert far == far0 * r ** (2 * n)


def test_propagation_examples():
    right = propagation_from_chain(build_chain(figure_block("right"), 4), "right")
    assert hull(right, 2) == {2, 3, 4, X0}
    assert hull(right, 4) == {4, X0}
    assert hull(right, X0) == {X0}
    left = propagation_from_chain(build_chain(figure_block("left"), 4), "left")
    assert hull(left, 3) == {1, 2, 3}
    assert hull(left, 1) == {1}
    none = system_from_rule(4, "none")
    assert all(hull(none, c) == {c} for c in none.cells)
    with pytest.raises(SlitError):
        propagation_from_chain(build_chain(figure_block("right"), 4), "left")


def test_leftward_cell_one_denied_by_continuity_clause():
    left = system_from_rule(4, "leftward")
    cls = classify(left)
    assert 1 not in cls.r_points
    assert point_level_classify(left) == (set(cls.r_points), set(cls.points_of_continuity))


@pytest.mark.parametrize("N", range(2, 11))
def test_classify_rules(N):
    right = classify(system_from_rule(N, "rightward"))
    assert right.r_points == {X0} and right.points_of_continuity == set()
    left = classify(system_from_rule(N, "leftward"))
    assert left.points_of_continuity == {X0} and left.r_points == set()
    none = system_from_rule(N, "none")
    cls = classify(none)
    assert cls.r_points == cls.points_of_continuity == set(none.cells)


def test_lemma_examples():
    none = system_from_rule(5, "none")
    rep = check_isolated_point_lemma(none)
    assert rep.passed and set(classify(none).r_points) == set(none.cells)
    rep = check_isolated_point_lemma(system_from_rule(5, "rightward"))
    assert rep.passed and rep.hypothesis_cells == []


def test_lemma_random_search_and_control():
    rng = random.Random(7)
    found = sum(len(check_isolated_point_lemma(random_system(rng, rng.randint(2, 8))).counterexamples)
                for _ in range(2000))
    assert found == 0
    # the same search over hulls that are not intervals does find counterexamples
    rng = random.Random(7)
    control = sum(len(check_isolated_point_lemma(random_system(rng, rng.randint(2, 8), interval=False)).counterexamples)
                  for _ in range(2000))
    assert control > 0


def test_system_round_trip():
    s = system_from_rule(10, "rightward")
    assert PropagationSystem.from_json(s.to_json()) == s


# invariants -----------------------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(st.integers(2, 15), st.sampled_from(["rightward", "leftward"]))
def test_hulls_are_intervals(N, rule):
    assert is_interval_system(system_from_rule(N, rule))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 9))
def test_classify_deterministic_and_matches_definitions(seed, size):
    s = random_system(random.Random(seed), size)
    a, b = classify(s), classify(s)
    assert a == b
    assert point_level_classify(s) == (set(a.r_points), set(a.points_of_continuity))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 30))
def test_chain_rules_any_N(N):
    r = classify(system_from_rule(N, "rightward"))
    assert len(r.r_points) == 1 and not r.points_of_continuity
    l = classify(system_from_rule(N, "leftward"))
    assert len(l.points_of_continuity) == 1 and not l.r_points


# rendering ------------------------------------------------------------------------

def _slit_widths(svg_text):
    root = ET.fromstring(svg_text)
    out = []
    for poly in root.iter(SVG + "polygon"):
        if poly.get("class") == "slit":
            pts = [tuple(map(float, p.split(","))) for p in poly.get("points").split()]
            out.append((pts[1][0], pts[2][0] - pts[0][0]))
    return out


def test_render_figure_slits_thin_rightward(tmp_path):
    path = render_svg(figure_block(), tmp_path / "block.svg")
    slits = _slit_widths(path.read_text())
    assert len(slits) == 6
    xs = [x for x, _ in slits]
    assert xs == sorted(xs)
    ws = [w for _, w in sorted(slits)]
    assert all(a > b for a, b in zip(ws, ws[1:]))


def test_render_empty_is_minimal_valid(tmp_path):
    path = render_svg(None, tmp_path / "e.svg")
    root = ET.fromstring(path.read_text())
    assert root.tag == SVG + "svg"
    assert not [e for e in root.iter() if e.tag in (SVG + "polygon", SVG + "circle", SVG + "line")]


def test_render_cheese_holes():
    X = build_cheese(default_segment(), 4, kmax=6)
    root = ET.fromstring(to_svg(X))
    holes = [c for c in root.iter(SVG + "circle") if c.get("class") == "hole"]
    assert len(holes) == len(X.deleted_discs())
    for c, D in zip(holes, X.deleted_discs()):
        assert abs(float(c.get("cx")) - float(D.center.re) * PX) <= 1e-6
        assert abs(float(c.get("cy")) + float(D.center.im) * PX) <= 1e-6
        assert abs(float(c.get("r")) - float(D.radius) * PX) <= 1e-6


def test_render_deterministic():
    ch = build_chain(figure_block(), 5)
    assert to_svg(ch) == to_svg(build_chain(figure_block(), 5))
    with pytest.raises(TypeError):
        to_svg(42)
