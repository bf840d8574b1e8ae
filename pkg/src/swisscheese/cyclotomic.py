"""Exact arithmetic in cyclotomic fields Q(zeta_L).

Needed so that roots of unity (and the real and imaginary parts of values
at them) can enter the exact simplex solver.  Elements are coefficient
vectors on the power basis 1, zeta, ..., zeta^(phi(L)-1).  The sign of a
real element is decided by evaluating it with mpmath at increasing
precision until the error bound excludes zero, which always terminates
because zero is tested exactly first.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd

import mpmath

from .geometry import QPoint


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients (ascending) of the n-th cyclotomic polynomial."""
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _exact_div(num, list(cyclotomic_poly(d)))
    return tuple(num)


def _exact_div(a, b):
    a = list(a)
    q = [0] * (len(a) - len(b) + 1)
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] // b[-1]
        q[i] = c
        for j, x in enumerate(b):
            a[i + j] -= c * x
    assert not any(a), "inexact cyclotomic division"
    return q


def _reduce(coeffs, L):
    phi = cyclotomic_poly(L)
    deg = len(phi) - 1
    c = list(coeffs)
    for i in range(len(c) - 1, deg - 1, -1):
        t = c[i]
        if t:
            for j in range(deg + 1):
                c[i - deg + j] -= t * phi[j]
    c = c[:deg] + [Fraction(0)] * (deg - len(c))
    return tuple(Fraction(x) for x in c)


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _poly_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_divmod(a, b):
    a = _poly_trim(a)
    b = _poly_trim(b)
    if len(a) < len(b):
        return [], a
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] / b[-1]
        q[i] = c
        for j, x in enumerate(b):
            a[i + j] -= c * x
    return q, _poly_trim(a[: len(b) - 1])


class Cyclo:
    """Element of Q(zeta_L)."""

    __slots__ = ("L", "c")

    def __init__(self, L: int, coeffs):
        self.L = L
        self.c = _reduce(coeffs, L)

    # constructors ---------------------------------------------------------

    @classmethod
    def rational(cls, L: int, x) -> "Cyclo":
        return cls(L, [Fraction(x)])

    @classmethod
    def zeta(cls, L: int, k: int = 1) -> "Cyclo":
        k %= L
        return cls(L, [Fraction(0)] * k + [Fraction(1)])

    @classmethod
    def i(cls, L: int) -> "Cyclo":
        if L % 4:
            raise ValueError("i lies in Q(zeta_L) only when 4 divides L")
        return cls.zeta(L, L // 4)

    @classmethod
    def gaussian(cls, L: int, z: QPoint) -> "Cyclo":
        return cls.rational(L, z.re) + cls.i(L) * z.im

    def _coerce(self, other):
        if isinstance(other, Cyclo):
            if other.L != self.L:
                raise ValueError("mixing different cyclotomic fields")
            return other
        if isinstance(other, QPoint):
            return Cyclo.gaussian(self.L, other)
        if isinstance(other, (int, Fraction)):
            return Cyclo.rational(self.L, other)
        return NotImplemented

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Cyclo(self.L, [a + b for a, b in zip(self.c, o.c)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclo(self.L, [-a for a in self.c])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Cyclo(self.L, [a - b for a, b in zip(self.c, o.c)])

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Cyclo(self.L, [a * other for a in self.c])
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Cyclo(self.L, _poly_mul(self.c, o.c))

    __rmul__ = __mul__

    def inverse(self) -> "Cyclo":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        # extended Euclid: s*self + t*phi = g (a nonzero constant)
        r0, r1 = [Fraction(x) for x in cyclotomic_poly(self.L)], _poly_trim(self.c)
        s0, s1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, r = _poly_divmod(r0, r1)
            s2 = _poly_trim(_sub(s0, _poly_mul(q, s1) if q and s1 else []))
            r0, r1, s0, s1 = r1, r, s1, s2
        return Cyclo(self.L, [x / r1[0] for x in s1])

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return Cyclo(self.L, [a / other for a in self.c])
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return (self ** (-k)).inverse()
        out, base = Cyclo.rational(self.L, 1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # structure ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.c)

    def conj(self) -> "Cyclo":
        out = [Fraction(0)] * self.L
        for j, a in enumerate(self.c):
            out[(-j) % self.L] += a
        return Cyclo(self.L, out)

    def real_part(self) -> "Cyclo":
        return (self + self.conj()) / 2

    def imag_part(self) -> "Cyclo":
        return (self - self.conj()) / (Cyclo.i(self.L) * 2)

    def abs2(self) -> "Cyclo":
        return self * self.conj()

    def approx(self, dps: int = 30) -> complex:
        with mpmath.workdps(dps):
            return complex(self._mp())

    def _mp(self):
        z = mpmath.exp(2j * mpmath.pi / self.L)
        return mpmath.fsum(mpmath.mpf(a.numerator) / a.denominator * z**j for j, a in enumerate(self.c))

    def enclosure(self, bits: int = 80) -> tuple[Fraction, Fraction]:
        """Rational bracket of the real part, width about 2^-bits."""
        scale = sum(abs(a) for a in self.c) + 1
        with mpmath.workprec(bits + 40 + int(scale).bit_length()):
            v = self._mp().real
            err = mpmath.mpf(2) ** (-bits) * (scale + 1)
            lo, hi = v - err, v + err
            scale2 = 2**bits
            return (Fraction(int(mpmath.floor(lo * scale2)), scale2),
                    Fraction(int(mpmath.ceil(hi * scale2)), scale2))

    def sign(self) -> int:
        """Sign of a real element (the imaginary part is assumed zero)."""
        if self.is_zero():
            return 0
        bits = 64
        while True:
            lo, hi = self.enclosure(bits)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 2

    # comparisons (real elements only) ---------------------------------------

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.c == o.c

    def __hash__(self):
        return hash((self.L, self.c))

    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if o is NotImplemented:
            raise TypeError(f"cannot compare Cyclo with {type(other).__name__}")
        return (self - o).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __repr__(self):
        return f"Cyclo({self.L}, {[str(a) for a in self.c]})"

    def __str__(self):
        terms = [f"{a}*z^{j}" if j else str(a) for j, a in enumerate(self.c) if a]
        return " + ".join(terms) or "0"


def _sub(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]


def field_for(m: int) -> int:
    """Smallest L containing the m-th roots of unity and i."""
    return m * 4 // gcd(m, 4)
