"""Slit-domain chains and the finite vanishing-propagation model.

A chain is a row of trapezoidal blocks K_1, K_2, ... that touch along vertical
edges and shrink geometrically toward an accumulation point x_0.  Each block
carries V-shaped slits cut down from its top edge, getting thinner and longer
toward one side.

The propagation model abstracts what the analysis says about such chains:
``P(n)`` is the set of cells on which a function is forced to vanish once it
vanishes near a point of cell n.  The rules are taken as axioms; the
definitions of R-point and point of continuity are then evaluated on them.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Optional, Sequence

from .geometry import Q, QPoint, q_str

X0 = "x0"


class SlitError(ValueError):
    pass


@dataclass(frozen=True)
class Slit:
    x: Fraction
    depth: Fraction
    width: Fraction

    def __post_init__(self):
        for name in ("x", "depth", "width"):
            object.__setattr__(self, name, Q(getattr(self, name)))


@dataclass(frozen=True)
class SlitBlock:
    """Trapezoid with horizontal bottom, vertical sides and a sloping top.

    ``vertices`` are bottom-left, bottom-right, top-right, top-left.
    """

    vertices: tuple
    slits: tuple
    side: str

    @property
    def left(self) -> Fraction:
        return self.vertices[0].re

    @property
    def right(self) -> Fraction:
        return self.vertices[1].re

    @property
    def bottom(self) -> Fraction:
        return self.vertices[0].im

    def top(self, x: Fraction) -> Fraction:
        tl, tr = self.vertices[3], self.vertices[2]
        return tl.im + (tr.im - tl.im) * (x - tl.re) / (tr.re - tl.re)

    def slit_polygon(self, s: Slit) -> list[QPoint]:
        a, b = s.x - s.width / 2, s.x + s.width / 2
        return [QPoint(a, self.top(a)), QPoint(s.x, self.top(s.x) - s.depth), QPoint(b, self.top(b))]

    def transformed(self, scale: Fraction, shift: QPoint) -> "SlitBlock":
        verts = tuple(v * scale + shift for v in self.vertices)
        slits = tuple(Slit(s.x * scale + shift.re, s.depth * scale, s.width * scale) for s in self.slits)
        return SlitBlock(verts, slits, self.side)

    def to_json(self):
        return {
            "vertices": [str(v) for v in self.vertices],
            "slits": [[q_str(s.x), q_str(s.depth), q_str(s.width)] for s in self.slits],
            "side": self.side,
        }

    @classmethod
    def from_json(cls, data) -> "SlitBlock":
        return build_slit_block([QPoint.parse(v) for v in data["vertices"]],
                                [Slit(*map(Q, s)) for s in data["slits"]], data["side"])


def build_slit_block(vertices: Sequence[QPoint], slits: Iterable[Slit], side: str) -> SlitBlock:
    """Validate and build a block; slits are listed away from the accumulation side first."""
    if side not in ("left", "right"):
        raise SlitError(f"side must be 'left' or 'right', got {side!r}")
    bl, br, tr, tl = vertices
    if not (bl.im == br.im and bl.re == tl.re and br.re == tr.re and bl.re < br.re):
        raise SlitError("vertices must form a trapezoid with vertical sides and horizontal bottom")
    if not (tl.im > bl.im and tr.im > br.im):
        raise SlitError("trapezoid must have positive height")
    block = SlitBlock(tuple(vertices), tuple(slits), side)
    ss = block.slits
    sign = 1 if side == "right" else -1
    for a, b in zip(ss, ss[1:]):
        if not sign * (b.x - a.x) > 0:
            raise SlitError("slit abscissas must move strictly toward the accumulation side")
        if not b.width < a.width:
            raise SlitError("slit widths must be strictly decreasing")
        if not b.depth > a.depth:
            raise SlitError("slit depths must be strictly increasing")
    spans = sorted((s.x - s.width / 2, s.x + s.width / 2) for s in ss)
    for (_, hi), (lo, _) in zip(spans, spans[1:]):
        if not hi < lo:
            raise SlitError("slits overlap")
    for s in ss:
        if s.width <= 0 or s.depth <= 0:
            raise SlitError("slit width and depth must be positive")
        if not (block.left < s.x - s.width / 2 and s.x + s.width / 2 < block.right):
            raise SlitError("slit leaves the trapezoid sideways")
        if not block.top(s.x) - s.depth > block.bottom:
            raise SlitError("slit reaches the bottom edge")
    return block


def figure_block(side: str = "right", count: int = 6, scale=Fraction(1)) -> SlitBlock:
    """Block shaped like the figures: base 3/2, left height 7/4, right height 1."""
    scale = Q(scale)
    verts = [QPoint(0, 0), QPoint(Fraction(3, 2), 0), QPoint(Fraction(3, 2), 1), QPoint(0, Fraction(7, 4))]
    slits = []
    for i in range(1, count + 1):
        off = Fraction(3, 2) / 2**i
        x = Fraction(3, 2) - off if side == "right" else off
        slits.append(Slit(x, Fraction(3, 4) - Fraction(1, 2 ** (i + 2)), Fraction(1, 2 ** (i + 2))))
    block = build_slit_block(verts, slits, side)
    return block.transformed(scale, QPoint(0, 0)) if scale != 1 else block


@dataclass(frozen=True)
class SlitChain:
    template: SlitBlock
    blocks: tuple
    ratio: Fraction
    x0: QPoint

    @property
    def sides(self) -> set:
        return {b.side for b in self.blocks}

    def polygons(self) -> list[list[QPoint]]:
        return [list(b.vertices) for b in self.blocks]

    def vertices(self) -> list[QPoint]:
        return [v for b in self.blocks for v in b.vertices] + [self.x0]

    def to_json(self):
        return {"template": self.template.to_json(), "N": len(self.blocks),
                "ratio": q_str(self.ratio), "x0": str(self.x0)}

    @classmethod
    def from_json(cls, data) -> "SlitChain":
        return build_chain(SlitBlock.from_json(data["template"]), int(data["N"]),
                           Q(data["ratio"]), QPoint.parse(data["x0"]))


def build_chain(template: SlitBlock, N: int, ratio=Fraction(4, 7), x0: Optional[QPoint] = None) -> SlitChain:
    """``N`` copies of ``template``, each the image of the previous under
    ``z -> x0 + ratio (z - x0)``, laid left to right and touching."""
    ratio = Q(ratio)
    if N < 2:
        raise SlitError("a chain needs at least two blocks")
    if not 0 < ratio < 1:
        raise SlitError("ratio must lie in (0, 1)")
    W = template.right - template.left
    if x0 is None:
        x0 = QPoint(template.left + W / (1 - ratio), template.bottom)
    start = QPoint(x0.re - W / (1 - ratio), x0.im)
    base = template.transformed(Fraction(1), start - QPoint(template.left, template.bottom))
    blocks = []
    for n in range(N):
        s = ratio**n
        blocks.append(base.transformed(s, x0 * (1 - s)))
    for a, b in zip(blocks, blocks[1:]):
        shared = min(a.vertices[2].im, b.vertices[3].im) - max(a.bottom, b.bottom)
        if a.right != b.left or shared <= 0:
            raise SlitError("consecutive blocks do not touch along an edge")
    return SlitChain(template, tuple(blocks), ratio, x0)


# --------------------------------------------------------------------------
# propagation model


@dataclass(frozen=True)
class PropagationSystem:
    """Finite cell model: ``hulls[c]`` is the set of cells forced to vanish.

    ``atomic[c]`` is False for cells that are continua (the slit blocks);
    such a cell contains distinct points that share its hull.
    """

    cells: tuple
    rule: str
    hulls: dict
    atomic: dict

    def neighbours(self, cell) -> list:
        i = self.cells.index(cell)
        return [self.cells[j] for j in (i - 1, i + 1) if 0 <= j < len(self.cells)]

    def to_json(self):
        return {
            "cells": [str(c) for c in self.cells],
            "rule": self.rule,
            "hulls": {str(c): sorted(str(x) for x in self.hulls[c]) for c in self.cells},
            "atomic": {str(c): self.atomic[c] for c in self.cells},
        }

    @classmethod
    def from_json(cls, data) -> "PropagationSystem":
        def parse(s):
            return s if s == X0 else int(s)

        cells = tuple(parse(c) for c in data["cells"])
        hulls = {parse(c): frozenset(parse(x) for x in data["hulls"][c]) for c in data["cells"]}
        atomic = {parse(c): bool(data["atomic"][c]) for c in data["cells"]}
        return cls(cells, data["rule"], hulls, atomic)


def system_from_rule(N: int, rule: str) -> PropagationSystem:
    cells = tuple(range(1, N + 1)) + (X0,)
    if rule == "rightward":
        hulls = {n: frozenset(range(n, N + 1)) | {X0} for n in range(1, N + 1)}
        hulls[X0] = frozenset({X0})
        atomic = {c: c == X0 for c in cells}
    elif rule == "leftward":
        hulls = {n: frozenset(range(1, n + 1)) for n in range(1, N + 1)}
        # every neighbourhood of x0 meets every tail of the chain
        hulls[X0] = frozenset(cells)
        atomic = {c: c == X0 for c in cells}
    elif rule == "none":
        hulls = {c: frozenset({c}) for c in cells}
        atomic = {c: True for c in cells}
    else:
        raise ValueError(f"unknown rule {rule!r}")
    return PropagationSystem(cells, rule, hulls, atomic)


def propagation_from_chain(chain: SlitChain, side: str) -> PropagationSystem:
    sides = chain.sides
    if len(sides) != 1:
        raise SlitError("chain mixes slit sides")
    if side not in sides:
        raise SlitError(f"chain slits accumulate on the {sides.pop()}, not the {side}")
    return system_from_rule(len(chain.blocks), "rightward" if side == "right" else "leftward")


def hull(system: PropagationSystem, cell) -> frozenset:
    return system.hulls[cell]


@dataclass(frozen=True)
class Classification:
    r_points: frozenset
    points_of_continuity: frozenset


def classify(system: PropagationSystem) -> Classification:
    """R-points have hull equal to themselves; points of continuity lie in no
    other point's hull.  A non-atomic cell fails both tests: any two of its
    points lie in each other's hulls."""
    r = {x for x in system.cells if system.atomic[x] and system.hulls[x] == {x}}
    poc = {
        x for x in system.cells
        if system.atomic[x] and all(x not in system.hulls[y] for y in system.cells if y != x)
    }
    return Classification(frozenset(r), frozenset(poc))


@dataclass
class LemmaReport:
    hypothesis_cells: list = field(default_factory=list)
    counterexamples: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.counterexamples


def check_isolated_point_lemma(system: PropagationSystem, cls: Optional[Classification] = None) -> LemmaReport:
    """If every other point near x is a point of continuity, x must be an R-point."""
    cls = cls or classify(system)
    rep = LemmaReport()
    for x in system.cells:
        if not system.atomic[x]:
            continue  # other points of x itself are not points of continuity
        if all(y in cls.points_of_continuity for y in system.neighbours(x)):
            rep.hypothesis_cells.append(x)
            if x not in cls.r_points:
                rep.counterexamples.append(x)
    return rep


def is_interval_system(system: PropagationSystem) -> bool:
    idx = {c: i for i, c in enumerate(system.cells)}
    for h in system.hulls.values():
        pos = sorted(idx[c] for c in h)
        if pos and pos[-1] - pos[0] + 1 != len(pos):
            return False
    return True


def random_system(rng: random.Random, size: int, interval: bool = True) -> PropagationSystem:
    """Random model with each hull containing its own cell.

    ``interval=True`` makes every hull an order interval, the finite analogue
    of connected hulls.
    """
    cells = tuple(range(1, size + 1))
    hulls = {}
    for i, c in enumerate(cells):
        if interval:
            lo = rng.randint(0, i)
            hi = rng.randint(i, size - 1)
            hulls[c] = frozenset(cells[lo:hi + 1])
        else:
            hulls[c] = frozenset({c} | {d for d in cells if rng.random() < 0.3})
    atomic = {c: rng.random() < 0.6 for c in cells}
    return PropagationSystem(cells, "random", hulls, atomic)


def render_svg(geometry, path):
    """Write a block, chain or cheese as SVG; ``None`` gives an empty picture."""
    from .render import render_svg as _render

    return _render(geometry, path)
