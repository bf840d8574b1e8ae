"""Representing and Jensen measures on finite point sets, by exact linear feasibility.

Everything is decided for the discretized problem only: a finite support
and a finite family of test functions.  Equality rows are exact.  Jensen
rows use the conservative ends of certified log envelopes, so a measure
reported feasible satisfies the true inequality at its support points.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .calculus import PoleError, RationalMap, certify_poles
from .cyclotomic import Cyclo, field_for
from .geometry import DomainError, Q, QPoint, as_qpoint, log_bounds, q_str
from .simplex import Farkas, LinearSystem, solve as _lp_solve

log = logging.getLogger(__name__)

LOG_TOL = Fraction(1, 2**48)
LOG_GRID = 2**24
DEFAULT_CAP = 20_000
DISCRETIZATION_NOTE = (
    "DISCRETIZED: finite support and finite test family; the status concerns "
    "this finite problem only, not the continuum set"
)

Point = Union[QPoint, Cyclo]


def point_str(z: Point) -> str:
    if isinstance(z, Cyclo):
        return f"cyclo[{z.L}]:" + ",".join(q_str(c) for c in z.c)
    return str(z)


def point_from_str(s: str) -> Point:
    if s.startswith("cyclo["):
        L = int(s[6: s.index("]")])
        return Cyclo(L, [Q(c) for c in s.split(":", 1)[1].split(",")])
    return QPoint.parse(s)


def _same(a: Point, b: Point) -> bool:
    if isinstance(a, Cyclo) or isinstance(b, Cyclo):
        L = a.L if isinstance(a, Cyclo) else b.L
        a = a if isinstance(a, Cyclo) else Cyclo.gaussian(L, a)
        return a == b
    return a == b


# --------------------------------------------------------------------------
# data

@dataclass
class DiscreteMeasure:
    support: list
    weights: list  # Fraction, or a real Cyclo when the vertex is irrational

    def __post_init__(self):
        if len(self.support) != len(self.weights):
            raise ValueError("support and weights differ in length")
        if any(w < 0 for w in self.weights):
            raise ValueError("negative weight")
        if sum(self.weights, Fraction(0)) != 1:
            raise ValueError("weights must sum to 1")
        for i in range(len(self.support)):
            for j in range(i):
                if _same(self.support[i], self.support[j]):
                    raise ValueError("support points must be distinct")

    def weight_at(self, x: Point) -> Fraction:
        return sum((w for z, w in zip(self.support, self.weights) if _same(z, x)), Fraction(0))

    def is_trivial_at(self, x: Point) -> bool:
        return self.weight_at(x) == 1

    def to_json(self):
        return {"support": [point_str(z) for z in self.support], "weights": [_num_str(w) for w in self.weights]}

    @classmethod
    def from_json(cls, d):
        return cls([point_from_str(s) for s in d["support"]], [_num_from_str(w) for w in d["weights"]])


@dataclass
class FeasibilityProblem:
    x: Point
    support: list
    tests: list  # RationalMap
    mode: str = "representing"
    atom_cap: Fraction = Fraction(0)
    deleted: Optional[list] = None  # discs the poles must sit in, when known

    def __post_init__(self):
        if self.mode not in ("representing", "jensen"):
            raise ValueError(f"unknown mode {self.mode!r}")
        self.atom_cap = Q(self.atom_cap)
        if not 0 <= self.atom_cap <= 1:
            raise ValueError("atom cap must lie in [0, 1]")
        if not any(_same(z, self.x) for z in self.support):
            raise ValueError("base point must be one of the support candidates")
        if self.deleted is not None:
            for f in self.tests:
                certify_poles(f, self.deleted)

    @property
    def x_index(self) -> int:
        return next(i for i, z in enumerate(self.support) if _same(z, self.x))

    def to_json(self):
        return {
            "x": point_str(self.x),
            "support": [point_str(z) for z in self.support],
            "tests": [f.to_json() for f in self.tests],
            "mode": self.mode,
            "atom_cap": q_str(self.atom_cap),
        }

    @classmethod
    def from_json(cls, d):
        return cls(point_from_str(d["x"]), [point_from_str(s) for s in d["support"]],
                   [RationalMap.from_json(t) for t in d["tests"]], d["mode"], Q(d["atom_cap"]))


@dataclass
class FeasibilityResult:
    status: str  # feasible | infeasible | unknown
    measure: Optional[DiscreteMeasure] = None
    witness: Optional[Farkas] = None
    diagnostics: dict = field(default_factory=dict)
    header: str = DISCRETIZATION_NOTE

    def to_json(self):
        out = {"status": self.status, "header": self.header, "diagnostics": self.diagnostics}
        if self.measure is not None:
            out["measure"] = self.measure.to_json()
        if self.witness is not None:
            out["witness"] = {"y": [_num_str(v) for v in self.witness.y], "value": _num_str(self.witness.value)}
        return out

    @classmethod
    def from_json(cls, d):
        mu = DiscreteMeasure.from_json(d["measure"]) if "measure" in d else None
        wit = None
        if "witness" in d:
            wit = Farkas([_num_from_str(v) for v in d["witness"]["y"]], _num_from_str(d["witness"]["value"]))
        return cls(d["status"], mu, wit, dict(d["diagnostics"]), d["header"])

    def summary(self) -> str:
        lines = [self.header, f"status: {self.status}"]
        if self.measure is not None:
            for z, w in zip(self.measure.support, self.measure.weights):
                if w:
                    where = point_str(z)
                    if isinstance(z, Cyclo):
                        v = z.approx()
                        where += f" (~{v.real:.6f}{v.imag:+.6f}i)"
                    lines.append(f"  {where}  weight {_num_str(w)}")
        if self.witness is not None:
            lines.append(f"  dual witness value {_num_str(self.witness.value)}")
        for k in sorted(self.diagnostics):
            lines.append(f"  {k}: {self.diagnostics[k]}")
        return "\n".join(lines)


def _num_str(v) -> str:
    return point_str(v) if isinstance(v, Cyclo) else q_str(v)


def _num_from_str(s: str):
    return point_from_str(s) if s.startswith("cyclo[") else Q(s)


# --------------------------------------------------------------------------
# evaluation

def evaluate(f: RationalMap, z: Point):
    """Exact value of f at a Gaussian-rational or cyclotomic point."""
    if isinstance(z, QPoint):
        return f.eval(z)
    L = z.L
    acc = Cyclo.rational(L, 0)
    for c in reversed(f.poly):
        acc = acc * z + Cyclo.gaussian(L, c)
    for p, cs in f.terms:
        w = z - Cyclo.gaussian(L, p)
        if w.is_zero():
            raise PoleError(f"evaluation at pole {p}")
        inv = w.inverse()
        pw = inv
        for c in cs:
            acc = acc + pw * Cyclo.gaussian(L, c)
            pw = pw * inv
    return acc


def _re_im(v):
    if isinstance(v, QPoint):
        return v.re, v.im
    re, im = v.real_part(), v.imag_part()
    # collapse to Fraction when rational, keeps the tableau cheap
    return _maybe_rational(re), _maybe_rational(im)


def _maybe_rational(v):
    if isinstance(v, Cyclo) and not any(v.c[1:]):
        return v.c[0]
    return v


def _abs2_bracket(v) -> tuple[Fraction, Fraction]:
    """Rational bracket of |v|^2, positive lower end when v is nonzero."""
    if isinstance(v, QPoint):
        a = v.abs2()
        return a, a
    a = v.abs2()
    if not any(a.c[1:]):
        return a.c[0], a.c[0]
    bits = 64
    while True:
        lo, hi = a.enclosure(bits)
        if lo > 0:
            return lo, hi
        bits *= 2


def log_abs_bounds(v) -> tuple[Fraction, Fraction] | None:
    """Certified (lower, upper) for log|v|; ``None`` when v = 0 (log 0 = -inf)."""
    if (isinstance(v, QPoint) and v.is_zero()) or (isinstance(v, Cyclo) and v.is_zero()):
        return None
    lo2, hi2 = _abs2_bracket(v)
    # snap outward to a coarse dyadic grid: still certified, and keeps the
    # tableau denominators small
    lo = Fraction(math.floor(log_bounds(lo2, LOG_TOL).lower / 2 * LOG_GRID), LOG_GRID)
    hi = Fraction(math.ceil(log_bounds(hi2, LOG_TOL).upper / 2 * LOG_GRID), LOG_GRID)
    return lo, hi


# --------------------------------------------------------------------------
# constraints

def _rows_for(f: RationalMap, p: FeasibilityProblem):
    try:
        vals = [evaluate(f, z) for z in p.support]
        fx = evaluate(f, p.x)
    except PoleError as exc:
        raise DomainError(f"test function has a pole on a support point: {exc}") from None
    rows = []
    fxr, fxi = _re_im(fx)
    parts = [_re_im(v) for v in vals]
    rows.append(([a for a, _ in parts], "==", fxr, "re"))
    rows.append(([b for _, b in parts], "==", fxi, "im"))
    zeros = []
    if p.mode == "jensen":
        lx = log_abs_bounds(fx)
        if lx is not None:  # otherwise the row reads -inf <= ..., vacuous
            # with sum w = 1 the row is sum_{i != x} w_i (log|f(z_i)| - log|f(x)|) >= 0,
            # which keeps the x column exact (the point mass passes)
            xi = p.x_index
            coeffs = []
            for i, v in enumerate(vals):
                lv = log_abs_bounds(v) if i != xi else lx
                if i == xi:
                    coeffs.append(Fraction(0))
                elif lv is None:
                    # log 0 = -inf: any mass here breaks the row, so pin it to zero
                    zeros.append(i)
                    coeffs.append(Fraction(0))
                else:
                    coeffs.append(lv[0] - lx[1])
            rows.append((coeffs, ">=", Fraction(0), "log"))
    return rows, zeros


def build_constraints(p: FeasibilityProblem, workers: int | None = None) -> LinearSystem:
    n = len(p.support)
    system = LinearSystem(n, names=[point_str(z) for z in p.support])
    workers = workers or int(os.environ.get("CHEESE_THREADS", "0") or 0) or 1
    if workers > 1 and len(p.tests) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            built = list(ex.map(lambda f: _rows_for(f, p), p.tests))
    else:
        built = [_rows_for(f, p) for f in p.tests]
    pinned = set()
    for t, (rows, zeros) in enumerate(built):
        for coeffs, sense, rhs, tag in rows:
            system.add(coeffs, sense, rhs, label=f"f{t}:{tag}")
        pinned.update(zeros)
    for i in sorted(pinned):
        system.add([1 if j == i else 0 for j in range(n)], "<=", Fraction(0), label=f"zero:{i}")
    system.add([1] * n, "==", Fraction(1), label="mass")
    xi = p.x_index
    system.add([1 if j == xi else 0 for j in range(n)], "<=", p.atom_cap, label="atom")
    return system


def solve(system: LinearSystem, cap: int = DEFAULT_CAP, support=None) -> FeasibilityResult:
    res = _lp_solve(system, max_iter=cap)
    diag = {"rows": len(system.rows), "variables": system.n, "pivots": res.iterations}
    if res.status == "feasible":
        # a vertex of a system with cyclotomic entries may itself be cyclotomic
        weights = [_maybe_rational(w) for w in res.point]
        support = support if support is not None else list(range(system.n))
        return FeasibilityResult("feasible", DiscreteMeasure(list(support), weights), diagnostics=diag)
    if res.status == "infeasible":
        return FeasibilityResult("infeasible", witness=res.farkas, diagnostics=diag)
    return FeasibilityResult("unknown", diagnostics=diag)


def check_measure(p: FeasibilityProblem, mu: DiscreteMeasure) -> bool:
    """Re-verify a measure: exact equality rows, conservative log rows, atom cap."""
    if mu.weight_at(p.x) > p.atom_cap:
        return False
    w = [mu.weight_at(z) for z in p.support]
    if sum(w, Fraction(0)) != 1:
        return False
    for f in p.tests:
        rows, zeros = _rows_for(f, p)
        for coeffs, sense, rhs, _ in rows:
            s = sum((c * wi for c, wi in zip(coeffs, w) if wi and c != 0), Fraction(0))
            if sense == "==" and s != rhs:
                return False
            if sense == ">=" and s < rhs:
                return False
        if any(w[i] for i in zeros):
            return False
    return True


def run(p: FeasibilityProblem, cap: int = DEFAULT_CAP) -> FeasibilityResult:
    system = build_constraints(p)
    res = solve(system, cap, support=p.support)
    res.diagnostics.update({"mode": p.mode, "tests": len(p.tests), "support": len(p.support),
                            "atom_cap": q_str(p.atom_cap)})
    if res.measure is not None:
        assert check_measure(p, res.measure), "returned measure failed re-verification"
    return res


# --------------------------------------------------------------------------
# experiments

def roots_of_unity(m: int) -> list[Cyclo]:
    L = field_for(m)
    return [Cyclo.zeta(L, (L // m) * j) for j in range(m)]


def control_problem(m: int, mode: str = "representing") -> FeasibilityProblem:
    if m < 3:
        raise ValueError("control needs m >= 3")
    L = field_for(m)
    zero = Cyclo.rational(L, 0)
    support = [zero] + roots_of_unity(m)
    tests = [RationalMap.monomial(k) for k in range(1, m)]
    return FeasibilityProblem(zero, support, tests, mode, Fraction(0))


def control_disc_algebra(m: int, mode: str = "representing") -> FeasibilityResult:
    """Origin with the m-th roots of unity: the uniform measure on the roots."""
    return run(control_problem(m, mode))


def test_family(cheese, T: int) -> list[RationalMap]:
    """First T functions of: 1/(z-c)^j over group centres c, then z^j, for j = 1, 2, ...

    Each group centre is the centre of that group's first deleted disc, and
    has a far smaller denominator than the satellite discs.
    """
    centres = [g.deleted[0].center for g in cheese.groups]
    out: list[RationalMap] = []
    j = 1
    while len(out) < T:
        for c in centres:
            out.append(RationalMap.pole(c, 1, j))
        out.append(RationalMap.monomial(j))
        j += 1
    return out[:T]


def grid_support(cheese, x: QPoint, resolution: int) -> list[QPoint]:
    pts = [x]
    h = Fraction(1, resolution)
    for a in range(-resolution, resolution + 1):
        for b in range(-resolution, resolution + 1):
            z = QPoint(a * h, b * h)
            if z != x and cheese.membership(z) != "out":
                pts.append(z)
    return pts


@dataclass
class EvidenceSeries:
    x: QPoint
    resolution: int
    entries: list  # (T, delta, status, weight at x)
    label: str = "EVIDENCE (discretized; infeasibility is not a proof, feasibility is not a refutation)"

    def to_json(self):
        return {
            "label": self.label,
            "x": str(self.x),
            "resolution": self.resolution,
            "entries": [{"T": T, "delta": q_str(d), "status": s, "atom": _num_str(a) if a is not None else None}
                        for T, d, s, a in self.entries],
        }

    def summary(self) -> str:
        lines = [self.label, DISCRETIZATION_NOTE, f"x = {self.x}, grid 1/{self.resolution}"]
        for T, d, s, a in self.entries:
            lines.append(f"  T={T:3d}  delta={q_str(d)}  {s}" + (f"  weight at x {_num_str(a)}" if a is not None else ""))
        return "\n".join(lines)


def cheese_evidence(cheese, x, T_values: Sequence[int], resolution: int = 4,
                    cap: int = DEFAULT_CAP, delta=None) -> EvidenceSeries:
    x = as_qpoint(x)
    if cheese.membership(x) == "out":
        raise DomainError(f"{x} is not in X")
    support = grid_support(cheese, x, resolution)
    deleted = cheese.deleted_discs()
    entries = []
    for T in T_values:
        d = Q(delta) if delta is not None else (Fraction(0) if T == 0 else 1 - Fraction(1, T))
        p = FeasibilityProblem(x, support, test_family(cheese, T), "jensen", d, deleted)
        r = run(p, cap)
        atom = r.measure.weight_at(x) if r.measure is not None else None
        entries.append((T, d, r.status, atom))
        log.info("evidence T=%d: %s", T, r.status)
    return EvidenceSeries(x, resolution, entries)
