"""Rational functions with exact derivatives, and the derivative bounds built on them.

A :class:`RationalMap` is stored in partial-fraction form: a polynomial part
plus, for each pole ``p``, the coefficients of ``1/(z-p)^l``.  Poles are
Gaussian rationals, so pole locations are exact and k-th derivatives are a
closed-form coefficient shuffle.  Numerator/denominator coefficient lists are
derived on demand for serialization.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .geometry import (
    BoundPair,
    Disc,
    QPoint,
    as_qpoint,
    dist_point_point_sq,
    log_bounds,
    q_str,
    root_bounds,
    round_down,
    round_up,
    sqrt_bounds,
)
from .targets import D0Bound

log = logging.getLogger(__name__)

ZERO = QPoint(0, 0)
ONE = QPoint(1, 0)
LOG_TOL = Fraction(1, 2**64)


class PoleError(ZeroDivisionError):
    """Evaluation at a pole."""


class PoleCertificateError(ValueError):
    """A pole is not strictly inside a deleted disc nor outside the closed unit disc."""


class NotFound(LookupError):
    pass


# --------------------------------------------------------------------------
# polynomials over Q(i): ascending coefficient lists of QPoint


def _trim(coeffs: Sequence[QPoint]) -> tuple[QPoint, ...]:
    c = list(coeffs)
    while c and c[-1].is_zero():
        c.pop()
    return tuple(c)


def poly_add(a, b):
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else ZERO) + (b[i] if i < len(b) else ZERO) for i in range(n)])


def poly_scale(a, c):
    return _trim([x * c for x in a])


def poly_mul(a, b):
    if not a or not b:
        return ()
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return _trim(out)


def poly_eval(a, z: QPoint) -> QPoint:
    acc = ZERO
    for c in reversed(a):
        acc = acc * z + c
    return acc


def poly_derivative(a, k: int = 1):
    a = list(a)
    for _ in range(k):
        a = [a[i] * i for i in range(1, len(a))]
    return _trim(a)


def poly_divmod(num, den):
    """Long division over Q(i)."""
    num, den = list(_trim(num)), _trim(den)
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    if len(num) < len(den):
        return (), _trim(num)
    lead = den[-1]
    q = [ZERO] * (len(num) - len(den) + 1)
    for i in range(len(num) - len(den), -1, -1):
        c = num[i + len(den) - 1] / lead
        q[i] = c
        if not c.is_zero():
            for j, d in enumerate(den):
                num[i + j] = num[i + j] - c * d
    return _trim(q), _trim(num[: len(den) - 1])


def taylor_shift(a, p: QPoint):
    """Coefficients of ``a`` in powers of ``(z - p)``."""
    c = list(a)
    n = len(c)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            c[j] = c[j] + c[j + 1] * p
    return _trim(c)


def linear_power(p: QPoint, m: int):
    """Coefficients of ``(z - p)^m``."""
    out = (ONE,)
    for _ in range(m):
        out = poly_mul(out, (-p, ONE))
    return out


def _series_div(a, b, n):
    """First n Taylor coefficients of a/b (b[0] != 0)."""
    a = list(a) + [ZERO] * n
    b = list(b) + [ZERO] * n
    out = []
    for i in range(n):
        s = a[i]
        for j in range(i):
            s = s - out[j] * b[i - j]
        out.append(s / b[0])
    return out


# --------------------------------------------------------------------------


def _pole_key(p: QPoint):
    return (p.re, p.im)


@dataclass(frozen=True)
class RationalMap:
    """Rational function ``poly(z) + sum_p sum_l c[p][l-1] / (z - p)^l``."""

    poly: tuple = ()
    terms: tuple = ()  # ((pole, (c_1, ..., c_m)), ...) sorted by pole

    def __post_init__(self):
        poly = _trim([as_qpoint(c) for c in self.poly])
        cleaned = []
        for p, cs in self.terms:
            cs = _trim([as_qpoint(c) for c in cs])
            if cs:
                cleaned.append((as_qpoint(p), cs))
        cleaned.sort(key=lambda t: _pole_key(t[0]))
        for (p, _), (q, _) in zip(cleaned, cleaned[1:]):
            if p == q:
                raise ValueError("duplicate pole entry")
        object.__setattr__(self, "poly", poly)
        object.__setattr__(self, "terms", tuple(cleaned))

    # constructors ---------------------------------------------------------

    @classmethod
    def polynomial(cls, coeffs: Iterable) -> "RationalMap":
        return cls(tuple(as_qpoint(c) for c in coeffs), ())

    @classmethod
    def constant(cls, c) -> "RationalMap":
        return cls.polynomial([c])

    @classmethod
    def identity(cls) -> "RationalMap":
        return cls.polynomial([0, 1])

    @classmethod
    def monomial(cls, k: int, c=1) -> "RationalMap":
        return cls.polynomial([0] * k + [c])

    @classmethod
    def pole(cls, p, c=1, order: int = 1) -> "RationalMap":
        """``c / (z - p)^order``."""
        cs = [ZERO] * (order - 1) + [as_qpoint(c)]
        return cls((), ((as_qpoint(p), tuple(cs)),))

    @classmethod
    def from_terms(cls, poly=(), terms: Mapping | Iterable = ()) -> "RationalMap":
        items = terms.items() if isinstance(terms, Mapping) else terms
        merged: dict = {}
        for p, cs in items:
            p = as_qpoint(p)
            old = list(merged.get(p, ()))
            cs = [as_qpoint(c) for c in cs]
            n = max(len(old), len(cs))
            merged[p] = tuple((old[i] if i < len(old) else ZERO) + (cs[i] if i < len(cs) else ZERO)
                              for i in range(n))
        return cls(tuple(as_qpoint(c) for c in poly), tuple(merged.items()))

    @classmethod
    def from_quotient(cls, num, den, poles: Optional[Sequence] = None) -> "RationalMap":
        """Build from numerator/denominator coefficient lists (ascending).

        The denominator must split into linear factors over Q(i).  Roots are
        taken from ``poles`` when given, otherwise located numerically and
        snapped to Gaussian rationals, and always verified exactly.
        """
        num = _trim([as_qpoint(c) for c in num])
        den = _trim([as_qpoint(c) for c in den])
        if not den:
            raise ZeroDivisionError("zero denominator")
        candidates = [as_qpoint(p) for p in poles] if poles is not None else _snap_roots(den)
        rest = den
        mult: dict = {}
        for p in candidates:
            while len(rest) > 1:
                q, r = poly_divmod(rest, (-p, ONE))
                if r:
                    break
                rest = q
                mult[p] = mult.get(p, 0) + 1
        if len(rest) != 1:
            raise ValueError("denominator does not split over Q(i) with the given poles")
        c0 = rest[0]
        quotient, _ = poly_divmod(num, den)
        terms = {}
        for p, m in mult.items():
            g = (c0,)
            for q2, m2 in mult.items():
                if q2 != p:
                    g = poly_mul(g, linear_power(q2, m2))
            hs = _series_div(taylor_shift(num, p), taylor_shift(g, p), m)
            # coefficient of (z-p)^(-l) is Taylor coefficient m-l
            terms[p] = tuple(hs[m - l] for l in range(1, m + 1))
        return cls(quotient, tuple(terms.items()))

    # structure ------------------------------------------------------------

    @property
    def poles(self) -> list[tuple[QPoint, int]]:
        return [(p, len(cs)) for p, cs in self.terms]

    def numerator_denominator(self):
        den = (ONE,)
        for p, cs in self.terms:
            den = poly_mul(den, linear_power(p, len(cs)))
        num = poly_mul(self.poly, den)
        for p, cs in self.terms:
            others = (ONE,)
            for q, ds in self.terms:
                if q != p:
                    others = poly_mul(others, linear_power(q, len(ds)))
            m = len(cs)
            for l, c in enumerate(cs, start=1):
                if not c.is_zero():
                    num = poly_add(num, poly_scale(poly_mul(linear_power(p, m - l), others), c))
        return num, den

    def degree_bound(self) -> int:
        return max([len(self.poly) - 1] + [len(cs) for _, cs in self.terms] + [0])

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        other = _as_map(other)
        return RationalMap.from_terms(poly_add(self.poly, other.poly), list(self.terms) + list(other.terms))

    __radd__ = __add__

    def __neg__(self):
        return self.scale(QPoint(-1))

    def __sub__(self, other):
        return self + (-_as_map(other))

    def __rsub__(self, other):
        return _as_map(other) - self

    def scale(self, c) -> "RationalMap":
        c = as_qpoint(c)
        return RationalMap(poly_scale(self.poly, c), tuple((p, tuple(x * c for x in cs)) for p, cs in self.terms))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, QPoint)):
            return self.scale(other)
        other = _as_map(other)
        poly = poly_mul(self.poly, other.poly)
        out = RationalMap(poly, ())
        for a, b in ((self, other), (other, self)):
            for p, cs in b.terms:
                out = out + _poly_times_pole(a.poly, p, cs)
        for p, cs in self.terms:
            for q, ds in other.terms:
                for l, c in enumerate(cs, start=1):
                    for m, d in enumerate(ds, start=1):
                        if c.is_zero() or d.is_zero():
                            continue
                        out = out + _pole_product(p, l, q, m).scale(c * d)
        return out

    __rmul__ = __mul__

    def mul_linear(self, z0) -> "RationalMap":
        """Multiply by ``(z - z0)``."""
        return self * RationalMap.polynomial([-as_qpoint(z0), 1])

    # calculus -------------------------------------------------------------

    def derivative(self, k: int = 1) -> "RationalMap":
        if k < 0:
            raise ValueError("derivative order must be non-negative")
        if k == 0:
            return self
        poly = poly_derivative(self.poly, k)
        terms = []
        for p, cs in self.terms:
            new = [ZERO] * (len(cs) + k)
            for l, c in enumerate(cs, start=1):
                rising = math.prod(range(l, l + k))
                new[l + k - 1] = c * ((-1) ** k * rising)
            terms.append((p, tuple(new)))
        return RationalMap(poly, tuple(terms))

    def eval(self, z) -> QPoint:
        z = as_qpoint(z)
        acc = poly_eval(self.poly, z)
        for p, cs in self.terms:
            w = z - p
            if w.is_zero():
                raise PoleError(f"evaluation at pole {p}")
            inv = ONE / w
            pw = inv
            for c in cs:
                acc = acc + c * pw
                pw = pw * inv
        return acc

    __call__ = eval

    def eval_complex(self, z):
        """Floating-point evaluation (scalar or numpy array); for sampling only."""
        z = np.asarray(z, dtype=complex)
        acc = np.zeros_like(z)
        for c in reversed(self.poly):
            acc = acc * z + complex(c)
        for p, cs in self.terms:
            inv = 1.0 / (z - complex(p))
            pw = inv
            for c in cs:
                acc = acc + complex(c) * pw
                pw = pw * inv
        return acc

    # serialization --------------------------------------------------------

    def to_json(self, certificate=None):
        num, den = self.numerator_denominator()
        out = {
            "numerator": [str(c) for c in num],
            "denominator": [str(c) for c in den],
            "poles": [{"pole": str(p), "order": m} for p, m in self.poles],
        }
        if certificate is not None:
            for entry, ref in zip(out["poles"], certificate):
                entry["disc"] = ref
        return out

    @classmethod
    def from_json(cls, data) -> "RationalMap":
        poles = []
        for entry in data["poles"]:
            poles += [QPoint.parse(entry["pole"])] * int(entry["order"])
        return cls.from_quotient(
            [QPoint.parse(c) for c in data["numerator"]],
            [QPoint.parse(c) for c in data["denominator"]],
            poles=poles,
        )


def _as_map(x) -> RationalMap:
    if isinstance(x, RationalMap):
        return x
    return RationalMap.constant(x)


def _poly_times_pole(poly, p, cs) -> RationalMap:
    """poly(z) * sum_l c_l/(z-p)^l in partial-fraction form."""
    if not poly:
        return RationalMap()
    shifted = taylor_shift(poly, p)  # poly = sum_i s_i (z-p)^i
    pole_part = {}
    poly_part = ()
    for l, c in enumerate(cs, start=1):
        for i, s in enumerate(shifted):
            coef = s * c
            if coef.is_zero():
                continue
            e = i - l
            if e < 0:
                pole_part[-e] = pole_part.get(-e, ZERO) + coef
            else:
                poly_part = poly_add(poly_part, poly_scale(linear_power(p, e), coef))
    m = max(pole_part) if pole_part else 0
    terms = ((p, tuple(pole_part.get(l, ZERO) for l in range(1, m + 1))),) if m else ()
    return RationalMap(poly_part, terms)


@lru_cache(maxsize=4096)
def _pole_product(p: QPoint, l: int, q: QPoint, m: int) -> RationalMap:
    """1 / ((z-p)^l (z-q)^m) in partial-fraction form."""
    if l == 0:
        return RationalMap.pole(q, 1, m) if m else RationalMap.constant(1)
    if m == 0:
        return RationalMap.pole(p, 1, l)
    if p == q:
        return RationalMap.pole(p, 1, l + m)
    inv = ONE / (p - q)
    return (_pole_product(p, l, q, m - 1) - _pole_product(p, l - 1, q, m)).scale(inv)


def _snap_roots(den) -> list[QPoint]:
    if len(den) <= 1:
        return []
    coeffs = [complex(c) for c in reversed(den)]
    found = []
    for r in np.roots(coeffs):
        for bound in (10**3, 10**6, 10**9, 10**12, 10**15):
            cand = QPoint(Fraction(float(r.real)).limit_denominator(bound),
                          Fraction(float(r.imag)).limit_denominator(bound))
            if poly_eval(den, cand).is_zero():
                if cand not in found:
                    found.append(cand)
                break
    return found


def derivative(f: RationalMap, k: int) -> RationalMap:
    return f.derivative(k)


def eval_map(f: RationalMap, z) -> QPoint:
    return f.eval(z)


# --------------------------------------------------------------------------
# pole certificates and sup norms


def _abs_upper(c: QPoint) -> Fraction:
    return sqrt_bounds(c.abs2()).upper


def certify_poles(f: RationalMap, deleted: Sequence[Disc]) -> list:
    """For each pole, the index of a deleted disc strictly containing it, or
    ``"exterior"`` when it lies strictly outside the closed unit disc."""
    refs = []
    for p, _ in f.poles:
        if p.abs2() > 1:
            refs.append("exterior")
            continue
        for j, D in enumerate(deleted):
            if D.locate(p) < 0:
                refs.append(j)
                break
        else:
            raise PoleCertificateError(f"pole {p} is not inside any deleted disc")
    return refs


def _pole_clearance(p: QPoint, deleted: Sequence[Disc]) -> Fraction:
    """Lower bound on the distance from pole p to X."""
    best = Fraction(0)
    if p.abs2() > 1:
        best = sqrt_bounds(p.abs2()).lower - 1
    for D in deleted:
        if D.locate(p) < 0:
            best = max(best, D.radius - sqrt_bounds(dist_point_point_sq(p, D.center)).upper)
    if best <= 0:
        raise PoleCertificateError(f"pole {p} has no certified clearance from X")
    return best


def analytic_sup_bound(f: RationalMap, deleted: Sequence[Disc]) -> Fraction:
    """Upper bound on |f| over X = closed unit disc minus the deleted discs.

    Uses |z| <= 1 for the polynomial part and the distance from each pole to
    X for the principal parts.
    """
    total = sum((_abs_upper(c) for c in f.poly), Fraction(0))
    for p, cs in f.terms:
        delta = round_down(_pole_clearance(p, deleted))
        for l, c in enumerate(cs, start=1):
            if not c.is_zero():
                total += _abs_upper(c) / delta**l
    return total


def circle_points(center: QPoint, radius, count: int) -> list[QPoint]:
    """``count`` exact rational points on a circle (rational parametrization)."""
    pts = []
    for j in range(count):
        theta = 2 * math.pi * j / count
        if abs(theta - math.pi) < 1e-12:
            u = QPoint(-1, 0)
        else:
            t = Fraction(math.tan(theta / 2)).limit_denominator(10**6)
            d = 1 + t * t
            u = QPoint((1 - t * t) / d, 2 * t / d)
        pts.append(center + u * radius)
    return pts


@dataclass(frozen=True)
class SamplePlan:
    outer: int = 64
    per_disc: int = 16
    grid: int = 0

    def describe(self) -> str:
        return f"outer={self.outer},per_disc={self.per_disc},grid={self.grid}"


@dataclass(frozen=True)
class SupNormEstimate:
    value: BoundPair
    plan: str = "declared"
    sample_only: bool = False

    @classmethod
    def declared(cls, upper, lower=None) -> "SupNormEstimate":
        lower = upper if lower is None else lower
        return cls(BoundPair(lower, upper), "declared", False)


def sup_norm(f: RationalMap, X, plan: SamplePlan = SamplePlan(), analytic: bool = True) -> SupNormEstimate:
    """Sample |f| over X; the upper side comes from :func:`analytic_sup_bound`."""
    deleted = X.deleted_discs()
    certify_poles(f, deleted)
    pts = circle_points(QPoint(0, 0), 1, plan.outer)
    for D in deleted:
        pts += circle_points(D.center, D.radius, plan.per_disc)
    if plan.grid:
        n = plan.grid
        for i in range(-n, n + 1):
            for j in range(-n, n + 1):
                z = QPoint(Fraction(i, n), Fraction(j, n))
                if X.membership(z) == "in":
                    pts.append(z)
    best = Fraction(0)
    for z in pts:
        if X.membership(z) == "out":
            continue
        try:
            best = max(best, f.eval(z).abs2())
        except PoleError:
            continue
    lower = sqrt_bounds(best).lower
    if analytic:
        upper = analytic_sup_bound(f, deleted)
        return SupNormEstimate(BoundPair(lower, max(lower, upper)), plan.describe(), False)
    return SupNormEstimate(BoundPair(lower, lower), plan.describe(), True)


# --------------------------------------------------------------------------
# Cauchy-type derivative bound


class PreconditionError(ValueError):
    pass


def _distances(X, z: QPoint):
    """Envelopes of s_0 = 1-|z| and s_j = dist(z, D_j) with their radii."""
    a = sqrt_bounds(z.abs2())
    s0 = BoundPair(1 - a.upper, 1 - a.lower)
    if s0.lower <= 0:
        raise PreconditionError(f"{z} is not certified inside the open unit disc")
    out = [(Fraction(1), s0)]
    for D in X.deleted_discs():
        d = sqrt_bounds(dist_point_point_sq(z, D.center))
        s = BoundPair(round_down(d.lower - D.radius), round_up(d.upper - D.radius))
        if s.lower <= 0:
            raise PreconditionError(f"{z} is not certified to keep positive distance from {D}")
        out.append((D.radius, s))
    return out


def cauchy_bound(X, z, k: int, supnorm: SupNormEstimate, _dist=None) -> BoundPair:
    """Envelope of ``k! (sum_j r_j / s_j^(k+1)) |f|_X`` with ``r_0 = 1, s_0 = 1 - |z|``."""
    z = as_qpoint(z)
    dists = _dist if _dist is not None else _distances(X, z)
    hi = lo = Fraction(0)
    for r, s in dists:
        hi += r / s.lower ** (k + 1)
        lo += r / s.upper ** (k + 1)
    fact = math.factorial(k)
    return BoundPair(fact * lo * supnorm.value.lower, fact * hi * supnorm.value.upper)


@dataclass
class DerivativeCheck:
    k: int
    value_abs2: Fraction
    bound: BoundPair
    passed: bool


@dataclass
class DerivativeReport:
    z: QPoint
    checks: list
    disc_count: int
    conditional: bool

    @property
    def violations(self) -> list:
        return [c for c in self.checks if not c.passed]

    @property
    def passed(self) -> bool:
        return not self.violations


def verify_derivative_bound(X, f: RationalMap, z, krange: Iterable[int],
                            supnorm: Optional[SupNormEstimate] = None) -> DerivativeReport:
    """Compare exact |f^(k)(z)| with the upper side of :func:`cauchy_bound`."""
    z = as_qpoint(z)
    if supnorm is None:
        supnorm = sup_norm(f, X, SamplePlan(outer=16, per_disc=4))
    dists = _distances(X, z)
    checks = []
    for k in krange:
        v = f.derivative(k).eval(z).abs2()
        b = cauchy_bound(X, z, k, supnorm, _dist=dists)
        checks.append(DerivativeCheck(k, v, b, v <= b.upper * b.upper))
    return DerivativeReport(z, checks, len(dists) - 1, supnorm.sample_only)


# --------------------------------------------------------------------------
# derivative estimate sequence and the Denjoy-Carleman chain


def log_k3(k: int) -> BoundPair:
    return log_bounds(k + 3, LOG_TOL)


@dataclass(frozen=True)
class BoundSequence:
    d0: D0Bound
    supnorm: SupNormEstimate
    entries: dict = field(default_factory=dict)

    def M(self, k: int) -> Fraction:
        if k not in self.entries:
            self.entries[k] = _m_k(self.d0, self.supnorm, k)
        return self.entries[k]


def _m_k(d0: D0Bound, supnorm: SupNormEstimate, k: int) -> Fraction:
    U = log_k3(k).upper
    return math.factorial(k) * (1 / d0.lower ** (k + 1) + U**k) * supnorm.value.upper


def derivative_estimate_sequence(d0: D0Bound, supnorm: SupNormEstimate, krange: Iterable[int]) -> BoundSequence:
    ks = list(krange)
    if not ks:
        raise ValueError("empty k range")
    return BoundSequence(d0, supnorm, {k: _m_k(d0, supnorm, k) for k in ks})


def choose_N(d0: D0Bound, scan_limit: int = 100) -> int:
    """Smallest N with ``log(k+3)^k >= 1/d0^(k+1)`` certified for all k in [N, scan_limit].

    Only k up to ``scan_limit`` is checked.  Past that the claim rests on the
    ratio ``log(k+3)^k * d0^(k+1)`` being eventually increasing.
    """
    if scan_limit < 1:
        raise ValueError("scan_limit must be >= 1")
    d = d0.lower
    N = 1
    for k in range(scan_limit, 0, -1):
        L = log_k3(k).lower
        if L**k * d ** (k + 1) < 1:
            N = k + 1
            break
    if N > scan_limit:
        raise NotFound(f"no N <= {scan_limit} satisfies the inequality for d0 >= {float(d):.3g}")
    return N


@dataclass
class ChainStep:
    k: int
    asserted: bool
    step_i: Optional[bool]
    step_ii: bool
    step_iii: Optional[bool]
    term_lower: Optional[Fraction]


@dataclass
class ChainReport:
    N: int
    steps: list
    partial_sum_lower: Fraction

    @property
    def failures(self) -> list:
        return [(s.k, name) for s in self.steps if s.asserted
                for name, ok in (("i", s.step_i), ("ii", s.step_ii), ("iii", s.step_iii)) if not ok]

    @property
    def passed(self) -> bool:
        return not self.failures


def dc_chain_verify(seq: BoundSequence, N: int, kspan: int, extra: Iterable[int] = ()) -> ChainReport:
    """Check the termwise chain for k in [N, N + kspan].

    (i)   1/d0^(k+1) <= log(k+3)^k, so M_k <= 2 k! log(k+3)^k |f|_X
    (ii)  k! <= k^k
    (iii) M_k <= 2 |f|_X k^k log(k+3)^k, i.e. the reciprocal k-th roots are
          bounded below by 1/((2|f|_X)^(1/k) k log(k+3)).
    Values of k in ``extra`` below N are reported but not asserted.
    """
    sup = seq.supnorm.value.upper
    d = seq.d0.lower
    steps = []
    total = Fraction(0)
    for k in sorted(set(extra) | set(range(N, N + kspan + 1))):
        ii = math.factorial(k) <= k**k
        if k < N:
            steps.append(ChainStep(k, False, None, ii, None, None))
            continue
        LU = log_k3(k)
        i = LU.lower**k * d ** (k + 1) >= 1
        iii = seq.M(k) <= 2 * sup * k**k * LU.upper**k
        root = root_bounds(2 * sup, k, Fraction(1, 2**40)).upper
        term = 1 / (root * k * LU.upper)
        total += round_down(term)
        steps.append(ChainStep(k, True, i, ii, iii, term))
    return ChainReport(N, steps, total)
