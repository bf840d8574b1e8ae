"""Exact phase-one simplex with Bland's rule.

Works over any ordered field whose elements support + - * / and
comparison with 0 (Fraction, Cyclo).  Feasible systems return a point,
infeasible ones a Farkas certificate that is checked before it is handed
back.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction


def _field(v):
    # ints would turn into floats under '/', so lift them to Fraction
    return Fraction(v) if isinstance(v, int) else v


@dataclass
class Row:
    coeffs: list  # dense, one entry per variable
    rhs: object
    sense: str  # "==" or "<="
    label: str = ""


@dataclass
class LinearSystem:
    """Rows over variables w >= 0."""

    n: int
    rows: list[Row] = field(default_factory=list)
    names: list[str] | None = None

    def add(self, coeffs, sense, rhs, label=""):
        if sense == ">=":
            coeffs, rhs, sense = [-c for c in coeffs], -rhs, "<="
        if sense not in ("==", "<="):
            raise ValueError(f"bad sense {sense!r}")
        if len(coeffs) != self.n:
            raise ValueError("row length mismatch")
        self.rows.append(Row([_field(c) for c in coeffs], _field(rhs), sense, label))

    def residuals(self, w) -> list:
        return [sum((c * x for c, x in zip(r.coeffs, w) if c != 0 and x != 0), Fraction(0)) - r.rhs
                for r in self.rows]

    def satisfied(self, w) -> bool:
        if any(x < 0 for x in w):
            return False
        for r, res in zip(self.rows, self.residuals(w)):
            if r.sense == "==" and res != 0:
                return False
            if r.sense == "<=" and res > 0:
                return False
        return True


@dataclass
class Farkas:
    """Multipliers y with y_i >= 0 on <= rows, y^T A >= 0 and y^T b < 0."""

    y: list
    value: object  # y^T b

    def check(self, system: LinearSystem) -> bool:
        for r, yi in zip(system.rows, self.y):
            if r.sense == "<=" and yi < 0:
                return False
        for j in range(system.n):
            s = sum((yi * r.coeffs[j] for yi, r in zip(self.y, system.rows) if yi != 0 and r.coeffs[j] != 0),
                    Fraction(0))
            if s < 0:
                return False
        b = sum((yi * r.rhs for yi, r in zip(self.y, system.rows) if yi != 0 and r.rhs != 0), Fraction(0))
        return b == self.value and b < 0


@dataclass
class LPResult:
    status: str  # feasible | infeasible | unknown
    point: list | None = None
    farkas: Farkas | None = None
    iterations: int = 0


def solve(system: LinearSystem, max_iter: int = 10_000) -> LPResult:
    m, n = len(system.rows), system.n
    slack_cols = [i for i, r in enumerate(system.rows) if r.sense == "<="]
    ns = len(slack_cols)
    width = n + ns + m  # structural, slack, artificial
    zero = Fraction(0)
    tab = []
    signs = []
    for i, r in enumerate(system.rows):
        row = list(r.coeffs) + [zero] * (ns + m)
        if r.sense == "<=":
            row[n + slack_cols.index(i)] = Fraction(1)
        rhs = r.rhs
        s = 1
        if rhs < 0:
            s = -1
            row = [-x for x in row]
            rhs = -rhs
        row[n + ns + i] = Fraction(1)
        tab.append(row + [rhs])
        signs.append(s)
    basis = [n + ns + i for i in range(m)]
    # reduced costs for phase one (cost 1 on artificials)
    red = [zero] * (width + 1)
    for j in range(n + ns):
        red[j] = -sum((tab[i][j] for i in range(m)), zero)
    red[width] = -sum((tab[i][width] for i in range(m)), zero)  # minus objective

    it = 0
    while True:
        enter = next((j for j in range(n + ns) if red[j] < 0), None)
        if enter is None:
            break
        if it >= max_iter:
            return LPResult("unknown", iterations=it)
        it += 1
        best = None
        for i in range(m):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][width] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:  # unbounded ray; cannot happen in phase one
            raise AssertionError("phase one unbounded")
        p = best[1]
        piv = tab[p][enter]
        tab[p] = [x / piv if x != 0 else x for x in tab[p]]
        for i in range(m):
            if i != p:
                f = tab[i][enter]
                if f != 0:
                    tab[i] = [x - f * y if y != 0 else x for x, y in zip(tab[i], tab[p])]
        f = red[enter]
        red = [x - f * y if y != 0 else x for x, y in zip(red, tab[p])]
        basis[p] = enter

    objective = -red[width]
    if objective == 0:
        x = [zero] * (n + ns + m)
        for i, b in enumerate(basis):
            x[b] = tab[i][width]
        point = x[:n]
        assert system.satisfied(point), "simplex returned an infeasible point"
        return LPResult("feasible", point=point, iterations=it)
    # dual of the phase-one optimum: red(artificial_i) = 1 - y_i
    ys = [1 - red[n + ns + i] for i in range(m)]
    # undo the row sign flips, and negate so the certificate reads y^T b < 0
    y = [-(s * yi) for s, yi in zip(signs, ys)]
    value = sum((yi * r.rhs for yi, r in zip(y, system.rows) if yi != 0 and r.rhs != 0), zero)
    cert = Farkas(y, value)
    assert cert.check(system), "Farkas certificate failed exact verification"
    return LPResult("infeasible", farkas=cert, iterations=it)
