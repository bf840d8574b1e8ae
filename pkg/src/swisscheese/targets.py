"""Compact target sets K living inside the open unit disc.

Four variants are supported: non-degenerate segments, products of a fat
(Smith-Volterra-Cantor) set with a vertical interval, slit chains, and finite
unions.  Every variant answers squared-distance queries with a certified
envelope; for Cantor products the query is answered at a finite stage, whose
distance never exceeds the distance to the limit set.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .geometry import (
    BoundPair,
    DomainError,
    Q,
    QPoint,
    dist_point_point_sq,
    q_str,
    sqrt_bounds,
)

Interval = tuple[Fraction, Fraction]


class InvalidSchedule(ValueError):
    pass


class ContainmentError(ValueError):
    """The target could not be certified to lie inside the open unit disc."""


# --------------------------------------------------------------------------
# Smith-Volterra-Cantor sets


@dataclass(frozen=True)
class SVCSet:
    interval: Interval
    schedule: tuple[Fraction, ...]
    stages: tuple[tuple[Interval, ...], ...]
    tail_ratio: Optional[Fraction] = None

    @property
    def stage_count(self) -> int:
        return len(self.stages) - 1

    @property
    def base_length(self) -> Fraction:
        return self.interval[1] - self.interval[0]

    def stage_length(self, s: int) -> Fraction:
        return sum((hi - lo for lo, hi in self.stages[s]), Fraction(0))

    def endpoints(self, s: int) -> list[Fraction]:
        """Stage endpoints; these survive into the limit set."""
        return sorted({x for iv in self.stages[s] for x in iv})

    def stage_distance(self, x: Fraction, s: int) -> Fraction:
        """Exact distance from x to the stage-s union of intervals."""
        ivs = self.stages[s]
        i = bisect.bisect_right([lo for lo, _ in ivs], x) - 1
        best = None
        for j in (i, i + 1):
            if 0 <= j < len(ivs):
                lo, hi = ivs[j]
                d = lo - x if x < lo else (x - hi if x > hi else Fraction(0))
                best = d if best is None else min(best, d)
        return best

    def endpoint_distance(self, x: Fraction, s: int) -> Fraction:
        pts = self.endpoints(s)
        i = bisect.bisect_left(pts, x)
        return min(abs(pts[j] - x) for j in (i - 1, i) if 0 <= j < len(pts))

    def to_json(self):
        return {
            "interval": [q_str(self.interval[0]), q_str(self.interval[1])],
            "schedule": [q_str(f) for f in self.schedule],
            "stages": self.stage_count,
            "tail_ratio": None if self.tail_ratio is None else q_str(self.tail_ratio),
        }

    @classmethod
    def from_json(cls, data) -> "SVCSet":
        tail = data.get("tail_ratio")
        return build_svc(
            (Q(data["interval"][0]), Q(data["interval"][1])),
            [Q(f) for f in data["schedule"]],
            int(data["stages"]),
            tail_ratio=None if tail is None else Q(tail),
        )


def geometric_schedule(first, ratio, count: int) -> list[Fraction]:
    first, ratio = Q(first), Q(ratio)
    return [first * ratio**j for j in range(count)]


def build_svc(interval, fractions: Sequence, stages: int, tail_ratio=None) -> SVCSet:
    """Build the first ``stages`` stages of a fat Cantor set.

    Stage j removes from every surviving interval its central open
    subinterval of length ``fractions[j-1] * (b - a)``.  When ``stages``
    exceeds the explicit list, the schedule is extended with ``tail_ratio``.
    ``tail_ratio=0`` declares that nothing is removed after the explicit list.
    """
    a, b = Q(interval[0]), Q(interval[1])
    if not a < b:
        raise InvalidSchedule("interval must have a < b")
    if stages < 0:
        raise InvalidSchedule("stage count must be non-negative")
    schedule = [Q(f) for f in fractions]
    tail = None if tail_ratio is None else Q(tail_ratio)
    if len(schedule) < stages:
        if not tail or not schedule:
            raise InvalidSchedule("schedule shorter than stage count and no geometric tail")
        while len(schedule) < stages:
            schedule.append(schedule[-1] * tail)
    for f in schedule:
        if not 0 < f < 1:
            raise InvalidSchedule(f"removal fraction {f} outside (0,1)")
    if tail is not None and not 0 <= tail < Fraction(1, 2):
        raise InvalidSchedule("geometric tail ratio must lie in [0, 1/2)")

    base = b - a
    levels = [((a, b),)]
    piece = base
    for j, f in enumerate(schedule, start=1):
        gap = f * base
        if gap >= piece:
            raise InvalidSchedule(f"stage {j}: removal {gap} does not fit in pieces of length {piece}")
        piece = (piece - gap) / 2
        if j <= stages:
            nxt = []
            for lo, hi in levels[-1]:
                nxt.append((lo, lo + piece))
                nxt.append((hi - piece, hi))
            levels.append(tuple(nxt))
    svc = SVCSet((a, b), tuple(schedule), tuple(levels), tail)
    if tail is not None and svc_limit_length(svc).length.lower < 0:
        raise InvalidSchedule("geometric tail removes more than the whole interval")
    return svc


@dataclass(frozen=True)
class LimitLength:
    length: BoundPair
    exact: bool
    zero_length: bool


def svc_limit_length(svc: SVCSet) -> LimitLength:
    """Length of the limit set: exact under a geometric tail, else bracketed."""
    base = svc.base_length
    removed = sum(
        (Fraction(2) ** (j - 1) * f * base for j, f in enumerate(svc.schedule, start=1)),
        Fraction(0),
    )
    if svc.tail_ratio is None:
        upper = svc.stage_length(svc.stage_count)
        return LimitLength(BoundPair(0, upper), False, upper == 0)
    r = svc.tail_ratio
    if r and svc.schedule:
        J = len(svc.schedule)
        removed += Fraction(2) ** (J - 1) * svc.schedule[-1] * base * (2 * r) / (1 - 2 * r)
    length = base - removed
    return LimitLength(BoundPair.exact(length), True, length == 0)


def fat_cantor(stages: int = 6, interval=(Fraction(-1, 2), Fraction(1, 2))) -> SVCSet:
    """The default fat Cantor set: middle pieces of length 4^-j, total removed 1/2."""
    return build_svc(interval, [Fraction(1, 4)], stages, tail_ratio=Fraction(1, 4))


# --------------------------------------------------------------------------
# target variants


def point_segment_dist_sq(z: QPoint, a: QPoint, b: QPoint) -> Fraction:
    dx, dy = b.re - a.re, b.im - a.im
    L = dx * dx + dy * dy
    t = ((z.re - a.re) * dx + (z.im - a.im) * dy) / L if L else Fraction(0)
    t = min(Fraction(1), max(Fraction(0), t))
    px, py = a.re + t * dx - z.re, a.im + t * dy - z.im
    return px * px + py * py


def point_polygon_dist_sq(z: QPoint, poly: Sequence[QPoint]) -> Fraction:
    """Exact squared distance from z to a convex polygon (counter-clockwise)."""
    inside = True
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        cross = (b.re - a.re) * (z.im - a.im) - (b.im - a.im) * (z.re - a.re)
        if cross < 0:
            inside = False
            break
    if inside:
        return Fraction(0)
    return min(point_segment_dist_sq(z, poly[i], poly[(i + 1) % n]) for i in range(n))


class TargetSet:
    """Base class; subclasses implement the queries below."""

    variant: str = ""

    def dist_sq(self, z: QPoint, stage: Optional[int] = None) -> BoundPair:
        raise NotImplementedError

    def max_abs_sq(self) -> BoundPair:
        """Envelope of max |z|^2 over the set."""
        raise NotImplementedError

    def samples(self, count: int) -> list[QPoint]:
        """Points guaranteed to belong to the set."""
        raise NotImplementedError

    def segments(self) -> list[tuple[QPoint, QPoint]]:
        """Closed line segments contained in the set."""
        return []

    def to_json(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Segment(TargetSet):
    a: QPoint
    b: QPoint
    variant = "segment"

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError("degenerate segment")

    def dist_sq(self, z, stage=None):
        return BoundPair.exact(point_segment_dist_sq(z, self.a, self.b))

    def max_abs_sq(self):
        return BoundPair.exact(max(self.a.abs2(), self.b.abs2()))

    def samples(self, count):
        if count == 1:
            return [self.a]
        return [self.a + (self.b - self.a) * Fraction(i, count - 1) for i in range(count)]

    def segments(self):
        return [(self.a, self.b)]

    def to_json(self):
        return {"variant": self.variant, "a": str(self.a), "b": str(self.b)}


@dataclass(frozen=True)
class CantorProduct(TargetSet):
    """``{z : Re z in F, Im z in [c, d]}`` for a fat Cantor set F."""

    svc: SVCSet
    imag: Interval = (Fraction(-1, 2), Fraction(1, 2))
    variant = "cantor"

    def _stage(self, stage):
        s = self.svc.stage_count if stage is None else stage
        if not 0 <= s <= self.svc.stage_count:
            raise DomainError(f"stage {s} not built (have {self.svc.stage_count})")
        return s

    def _dy(self, y):
        c, d = self.imag
        return c - y if y < c else (y - d if y > d else Fraction(0))

    def dist_sq(self, z, stage=None):
        s = self._stage(stage)
        dy2 = self._dy(z.im) ** 2
        lower = self.svc.stage_distance(z.re, s) ** 2 + dy2
        upper = self.svc.endpoint_distance(z.re, s) ** 2 + dy2
        return BoundPair(lower, upper)

    def max_abs_sq(self):
        a, b = self.svc.interval
        c, d = self.imag
        return BoundPair.exact(max(a * a, b * b) + max(c * c, d * d))

    def area(self) -> BoundPair:
        return self.svc_length().length.scale(self.imag[1] - self.imag[0])

    def svc_length(self) -> LimitLength:
        return svc_limit_length(self.svc)

    def samples(self, count):
        xs = self.svc.endpoints(self.svc.stage_count)
        c, d = self.imag
        rows = max(1, count // max(1, len(xs)))
        ys = [c + (d - c) * Fraction(i, max(1, rows - 1)) for i in range(rows)] if rows > 1 else [(c + d) / 2]
        pts = [QPoint(x, y) for y in ys for x in xs]
        step = max(1, len(pts) // count)
        return pts[::step][:count]

    def segments(self):
        c, d = self.imag
        return [(QPoint(x, c), QPoint(x, d)) for x in self.svc.endpoints(self.svc.stage_count)]

    def to_json(self):
        return {
            "variant": self.variant,
            "svc": self.svc.to_json(),
            "imag": [q_str(self.imag[0]), q_str(self.imag[1])],
        }


@dataclass(frozen=True)
class SlitChainSet(TargetSet):
    """A slit chain used as a target; distances use the filled trapezoids."""

    chain: object
    variant = "slit-chain"

    def dist_sq(self, z, stage=None):
        polys = self.chain.polygons()
        lower = min(
            [point_polygon_dist_sq(z, p) for p in polys] + [dist_point_point_sq(z, self.chain.x0)]
        )
        upper = min(dist_point_point_sq(z, v) for v in self.chain.vertices())
        return BoundPair(lower, max(lower, upper))

    def max_abs_sq(self):
        return BoundPair.exact(max(v.abs2() for v in self.chain.vertices()))

    def samples(self, count):
        pts = list(self.chain.vertices())
        return pts[:count]

    def to_json(self):
        return {"variant": self.variant, "chain": self.chain.to_json()}


@dataclass(frozen=True)
class Union(TargetSet):
    parts: tuple = field(default_factory=tuple)
    variant = "union"

    def __post_init__(self):
        if not self.parts:
            raise ValueError("empty union")

    def dist_sq(self, z, stage=None):
        envs = [p.dist_sq(z, stage) for p in self.parts]
        return BoundPair(min(e.lower for e in envs), min(e.upper for e in envs))

    def max_abs_sq(self):
        envs = [p.max_abs_sq() for p in self.parts]
        return BoundPair(max(e.lower for e in envs), max(e.upper for e in envs))

    def samples(self, count):
        per = max(1, count // len(self.parts))
        return [z for p in self.parts for z in p.samples(per)][:count]

    def segments(self):
        return [s for p in self.parts for s in p.segments()]

    def to_json(self):
        return {"variant": self.variant, "parts": [p.to_json() for p in self.parts]}


def target_from_json(data) -> TargetSet:
    kind = data["variant"]
    if kind == "segment":
        return Segment(QPoint.parse(data["a"]), QPoint.parse(data["b"]))
    if kind == "cantor":
        return CantorProduct(SVCSet.from_json(data["svc"]), (Q(data["imag"][0]), Q(data["imag"][1])))
    if kind == "slit-chain":
        from .slits import SlitChain

        return SlitChainSet(SlitChain.from_json(data["chain"]))
    if kind == "union":
        return Union(tuple(target_from_json(p) for p in data["parts"]))
    raise ValueError(f"unknown target variant {kind!r}")


def dist_point_target_sq(z: QPoint, K: TargetSet, stage: Optional[int] = None) -> BoundPair:
    return K.dist_sq(z, stage)


@dataclass(frozen=True)
class D0Bound:
    """Certified envelope of the distance from K to the unit circle."""

    value: BoundPair

    def __post_init__(self):
        if self.value.lower <= 0:
            raise ContainmentError("d0 lower bound is not positive")

    @property
    def lower(self) -> Fraction:
        return self.value.lower


def d0_of(K: TargetSet, tol=Fraction(1, 2**64)) -> D0Bound:
    m = K.max_abs_sq()
    if m.upper >= 1:
        raise ContainmentError("target not certified inside the open unit disc")
    hi = sqrt_bounds(m.upper, tol).upper
    lo = sqrt_bounds(m.lower, tol).lower
    env = BoundPair(1 - hi, 1 - lo)
    if env.lower <= 0:
        raise ContainmentError("target not certified inside the open unit disc")
    return D0Bound(env)


def default_segment() -> Segment:
    return Segment(QPoint(Fraction(-1, 2), 0), QPoint(Fraction(1, 2), 0))
