"""Exact rational plane arithmetic.

Points are Gaussian rationals, discs carry rational centres and radii, and
every irrational quantity (square roots, logarithms, k-th roots) is returned
as a :class:`BoundPair` whose end points are rationals that provably bracket
the true value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

Rational = Union[int, Fraction]

#: default envelope width used when a caller does not ask for one
DEFAULT_TOL = Fraction(1, 2**64)


class DomainError(ValueError):
    """Raised when a function is evaluated outside its domain."""


def Q(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected: they would silently smuggle rounding into exact code.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def q_str(x: Fraction) -> str:
    """Canonical ``"p/q"`` encoding (the denominator is always written)."""
    x = Q(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class QPoint:
    """A Gaussian rational ``re + i*im``; doubles as an exact complex number."""

    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        if type(self.re) is not Fraction:
            object.__setattr__(self, "re", Q(self.re))
        if type(self.im) is not Fraction:
            object.__setattr__(self, "im", Q(self.im))

    @classmethod
    def parse(cls, text: str) -> "QPoint":
        """Parse ``"p/q,p/q"``."""
        re, im = text.split(",")
        return cls(Q(re), Q(im))

    def __str__(self):
        return f"{q_str(self.re)},{q_str(self.im)}"

    def __add__(self, other):
        other = as_qpoint(other)
        return QPoint(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = as_qpoint(other)
        return QPoint(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return as_qpoint(other) - self

    def __neg__(self):
        return QPoint(-self.re, -self.im)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QPoint(self.re * other, self.im * other)
        other = as_qpoint(other)
        return QPoint(self.re * other.re - self.im * other.im,
                      self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return QPoint(self.re / other, self.im / other)
        other = as_qpoint(other)
        n = other.abs2()
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return QPoint((self.re * other.re + self.im * other.im) / n,
                      (self.im * other.re - self.re * other.im) / n)

    def __rtruediv__(self, other):
        return as_qpoint(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return QPoint(1) / (self ** (-k))
        result, base = QPoint(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self) -> "QPoint":
        return QPoint(self.re, -self.im)

    def abs2(self) -> Fraction:
        """Exact squared modulus."""
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))


def as_qpoint(value) -> QPoint:
    if isinstance(value, QPoint):
        return value
    if isinstance(value, str) and "," in value:
        return QPoint.parse(value)
    return QPoint(Q(value), Fraction(0))


ORIGIN = QPoint(0, 0)


@dataclass(frozen=True)
class BoundPair:
    """Certified rational envelope ``lower <= true value <= upper``."""

    lower: Fraction
    upper: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lower", Q(self.lower))
        object.__setattr__(self, "upper", Q(self.upper))
        if self.lower > self.upper:
            raise ValueError(f"inverted envelope [{self.lower}, {self.upper}]")

    @classmethod
    def exact(cls, value) -> "BoundPair":
        return cls(value, value)

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def contains(self, value) -> bool:
        return self.lower <= value <= self.upper

    def __add__(self, other):
        if isinstance(other, BoundPair):
            return BoundPair(self.lower + other.lower, self.upper + other.upper)
        return BoundPair(self.lower + other, self.upper + other)

    def __sub__(self, other):
        if isinstance(other, BoundPair):
            return BoundPair(self.lower - other.upper, self.upper - other.lower)
        return BoundPair(self.lower - other, self.upper - other)

    def scale(self, c) -> "BoundPair":
        c = Q(c)
        if c >= 0:
            return BoundPair(self.lower * c, self.upper * c)
        return BoundPair(self.upper * c, self.lower * c)

    def to_json(self):
        return {"lower": q_str(self.lower), "upper": q_str(self.upper)}

    @classmethod
    def from_json(cls, data) -> "BoundPair":
        return cls(Q(data["lower"]), Q(data["upper"]))


@dataclass(frozen=True)
class Disc:
    """Disc with exact centre and radius.

    ``closed`` only matters for membership tests; deleted discs are open and
    the outer disc of a Swiss cheese is closed.
    """

    center: QPoint
    radius: Fraction
    closed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "radius", Q(self.radius))
        if self.radius <= 0:
            raise ValueError(f"disc radius must be positive, got {self.radius}")

    @property
    def kind(self) -> str:
        return "closed" if self.closed else "open"

    def locate(self, z: QPoint) -> int:
        """-1 strictly inside, 0 on the boundary circle, +1 strictly outside."""
        d2 = dist_point_point_sq(z, self.center)
        r2 = self.radius * self.radius
        return (d2 > r2) - (d2 < r2)

    def contains_disc(self, other: "Disc") -> bool:
        """Exact test ``other`` (as a set of the same openness) lies within self."""
        if other.radius > self.radius:
            return False
        gap = self.radius - other.radius
        return dist_point_point_sq(self.center, other.center) <= gap * gap

    def disjoint_from(self, other: "Disc") -> bool:
        """Exact disjointness of two open discs (tangency allowed)."""
        s = self.radius + other.radius
        return dist_point_point_sq(self.center, other.center) >= s * s

    def to_json(self):
        return {"center": str(self.center), "radius": q_str(self.radius), "kind": self.kind}

    @classmethod
    def from_json(cls, data) -> "Disc":
        return cls(QPoint.parse(data["center"]), Q(data["radius"]), data.get("kind") == "closed")


UNIT_DISC = Disc(ORIGIN, Fraction(1), closed=True)


def dist_point_point_sq(a: QPoint, b: QPoint) -> Fraction:
    dx = a.re - b.re
    dy = a.im - b.im
    return dx * dx + dy * dy


def _check_tol(tol) -> Fraction:
    tol = Q(tol)
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    return tol


def root_bounds(x, k: int, tol=DEFAULT_TOL) -> BoundPair:
    """Envelope of the real ``k``-th root of ``x >= 0`` with width at most tol."""
    x = Q(x)
    tol = _check_tol(tol)
    if k < 1:
        raise DomainError("root order must be >= 1")
    if x < 0:
        raise DomainError(f"root of negative number {x}")
    if x == 0:
        return BoundPair.exact(0)
    if k == 1:
        return BoundPair.exact(x)
    p, q = x.numerator, x.denominator
    # x^(1/k) = (p q^(k-1))^(1/k) / q; scale by 2^s so the integer root
    # has enough digits to meet tol.
    need = 1 / (tol * q)
    s = math.ceil(need).bit_length() if need > 1 else 0
    scale = 1 << s
    n = p * q ** (k - 1) * scale**k
    r = _iroot(n, k)
    den = q * scale
    if r**k == n:
        return BoundPair.exact(Fraction(r, den))
    return BoundPair(Fraction(r, den), Fraction(r + 1, den))


def _iroot(n: int, k: int) -> int:
    """floor(n ** (1/k)) for non-negative integers."""
    if k == 2:
        return math.isqrt(n)
    if n < 2:
        return n
    # Newton iteration from an over-estimate
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def sqrt_bounds(x, tol=DEFAULT_TOL) -> BoundPair:
    """Envelope ``[lo, hi]`` with ``lo**2 <= x <= hi**2`` and ``hi - lo <= tol``."""
    return root_bounds(x, 2, tol)


def dist_disc_disc(a: Disc, b: Disc, tol=Fraction(1, 2**40)) -> BoundPair:
    """Envelope of ``max(0, |c_a - c_b| - r_a - r_b)``."""
    reach = a.radius + b.radius
    d2 = dist_point_point_sq(a.center, b.center)
    if d2 <= reach * reach:
        return BoundPair.exact(0)
    root = sqrt_bounds(d2, tol)
    return BoundPair(max(Fraction(0), root.lower - reach), root.upper - reach)


def _atanh_fixed(a: int, b: int, bits: int) -> tuple[int, int]:
    """Integer bounds (scaled by 2**bits) on atanh(a/b), |a/b| < 1/2."""
    lo = hi = 0
    one = 1 << bits
    a2, b2 = a * a, b * b
    num, den = a, b  # a^(2j+1), b^(2j+1)
    j = 0
    while True:
        d = den * (2 * j + 1)
        t = one * num
        lo += t // d
        hi += -((-t) // d)
        j += 1
        num *= a2
        den *= b2
        # remaining tail: |y|^(2j+1) / ((2j+1)(1-y^2))
        tail_num = abs(num) * b2
        tail_den = den * (2 * j + 1) * (b2 - a2)
        if tail_num * (one << 2) < tail_den:
            tail = -((-one * tail_num) // tail_den)
            return lo - tail, hi + tail


@lru_cache(maxsize=64)
def _ln2_fixed(bits: int) -> tuple[int, int]:
    lo, hi = _atanh_fixed(1, 3, bits)
    return 2 * lo, 2 * hi


@lru_cache(maxsize=4096)
def _log_bounds_cached(x: Fraction, tol: Fraction) -> BoundPair:
    if x == 1:
        return BoundPair.exact(0)
    # x = 2^e * m with m in [2/3, 4/3]
    e = x.numerator.bit_length() - x.denominator.bit_length()
    m = x / Fraction(2) ** e
    while m > Fraction(4, 3):
        m /= 2
        e += 1
    while m < Fraction(2, 3):
        m *= 2
        e -= 1
    bits = max(8, math.ceil(math.log2(1 / tol))) + (abs(e) + 1).bit_length() + 8
    while True:
        y = (m - 1) / (m + 1)
        lo, hi = _atanh_fixed(y.numerator, y.denominator, bits)
        lo, hi = 2 * lo, 2 * hi
        if e:
            l2lo, l2hi = _ln2_fixed(bits)
            if e > 0:
                lo += e * l2lo
                hi += e * l2hi
            else:
                lo += e * l2hi
                hi += e * l2lo
        result = BoundPair(Fraction(lo, 1 << bits), Fraction(hi, 1 << bits))
        if result.width <= tol:
            return result
        bits += 8


def log_bounds(x, tol=DEFAULT_TOL) -> BoundPair:
    """Certified envelope of the natural logarithm of a positive rational."""
    x = Q(x)
    tol = _check_tol(tol)
    if x <= 0:
        raise DomainError(f"log of non-positive number {x}")
    return _log_bounds_cached(x, tol)


def round_down(x: Fraction, bits: int = 64) -> Fraction:
    """Largest dyadic rational with ``bits`` significant bits not exceeding x."""
    x = Q(x)
    if x == 0:
        return x
    if x < 0:
        return -round_up(-x, bits)
    shift = bits - (x.numerator.bit_length() - x.denominator.bit_length())
    if shift >= 0:
        return Fraction((x.numerator << shift) // x.denominator, 1 << shift)
    return Fraction(x.numerator // (x.denominator << -shift) << -shift)


def round_up(x: Fraction, bits: int = 64) -> Fraction:
    """Smallest dyadic rational with ``bits`` significant bits not below x."""
    x = Q(x)
    if x <= 0:
        return -round_down(-x, bits)
    r = round_down(x, bits)
    if r == x:
        return r
    shift = bits - (x.numerator.bit_length() - x.denominator.bit_length())
    return r + Fraction(1, 1 << shift) if shift >= 0 else r + (1 << -shift)
