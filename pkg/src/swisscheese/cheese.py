"""Swiss cheese assembly and certification.

Pipeline: enumerate rational discs B_n whose closures avoid K and stay in the
closed unit disc, give each a radius budget eps_n, pack finitely many small
disjoint open discs D_{n,m} inside B_n within that budget, and attach a
certificate for every inequality the construction depends on.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from .calculus import RationalMap, circle_points
from .geometry import (
    UNIT_DISC,
    BoundPair,
    Disc,
    Q,
    QPoint,
    dist_point_point_sq,
    log_bounds,
    q_str,
    round_down,
    sqrt_bounds,
)
from .targets import TargetSet

log = logging.getLogger(__name__)

DEFAULT_KMAX = 12
LOG_TOL = Fraction(1, 2**64)
#: smallest deleted-disc radius we are willing to emit (smallest positive double)
MIN_RADIUS = Fraction(1, 2**1074)


class CertificateError(RuntimeError):
    def __init__(self, certificate: "Certificate"):
        super().__init__(f"certificate {certificate.name} failed: {certificate.detail}")
        self.certificate = certificate


class CapacityError(ValueError):
    pass


class PlanError(ValueError):
    pass


def L(k: int) -> Fraction:
    """Certified lower bound on log(k+3)."""
    return log_bounds(k + 3, LOG_TOL).lower


# --------------------------------------------------------------------------
# candidate discs


@dataclass(frozen=True)
class CandidateDisc:
    disc: Disc
    n: int
    d: BoundPair
    accepted: bool = True

    @property
    def d_lower(self) -> Fraction:
        return self.d.lower


def inside_unit_disc(disc: Disc) -> bool:
    """Certified |c| + r < 1."""
    r = disc.radius
    return r < 1 and disc.center.abs2() < (1 - r) ** 2


def disc_target_distance(disc: Disc, K: TargetSet, stage=None) -> BoundPair:
    """Envelope of dist(disc, K); the lower end is rounded down to 64 bits."""
    env = K.dist_sq(disc.center, stage)
    lo = sqrt_bounds(env.lower).lower - disc.radius
    hi = sqrt_bounds(env.upper).upper - disc.radius
    lo = round_down(lo) if lo > 0 else lo
    return BoundPair(lo, max(lo, hi))


def accept_candidate(disc: Disc, K: TargetSet, stage=None) -> tuple[bool, Optional[BoundPair], str]:
    if not inside_unit_disc(disc):
        return False, None, "closure leaves the closed unit disc"
    env = K.dist_sq(disc.center, stage)
    if env.lower <= disc.radius**2:
        return False, None, "closure meets K"
    d = disc_target_distance(disc, K, stage)
    if d.lower <= 0:
        return False, d, "distance to K not certified positive"
    return True, d, "ok"


def iter_rational_discs() -> Iterator[Disc]:
    """Every disc with centre in Q+Qi and radius in Q∩(0,1), exactly once.

    Level ``L`` pairs centre denominator ``q`` with radius denominator
    ``p = L - q``; within a level, radius numerator, then imaginary part,
    then real part ascend.  Discs whose closure leaves the closed unit disc
    are skipped up front.
    """
    seen = set()
    level = 2
    while True:
        for q in range(1, level):
            p = level - q
            for j in range(1, p):
                if math.gcd(j, p) != 1:
                    continue
                r = Fraction(j, p)
                lim = (1 - r) ** 2
                for b in range(-q + 1, q):
                    for a in range(-q + 1, q):
                        c = QPoint(Fraction(a, q), Fraction(b, q))
                        if c.abs2() >= lim:
                            continue
                        key = (c.re, c.im, r)
                        if key in seen:
                            continue
                        seen.add(key)
                        yield Disc(c, r)
        level += 1


def enumerate_candidates(K: TargetSet, count: int, stage=None,
                         progress: Optional[Callable[[int, int], None]] = None) -> list[CandidateDisc]:
    """First ``count`` accepted discs in the canonical order, indexed from 1."""
    if count < 1:
        raise ValueError("count must be >= 1")
    out = []
    tried = 0
    for disc in iter_rational_discs():
        tried += 1
        ok, d, _ = accept_candidate(disc, K, stage)
        if ok:
            out.append(CandidateDisc(disc, len(out) + 1, d))
            if progress:
                progress(len(out), tried)
            if len(out) == count:
                break
        if tried % 5000 == 0:
            log.info("enumeration: tried %d discs, accepted %d", tried, len(out))
    return out


# --------------------------------------------------------------------------
# budgets


@dataclass(frozen=True)
class Budget:
    n: int
    epsilon: Fraction
    kmax: int


def _choice_terms(d_lower: Fraction, n: int, kmax: int) -> list[Fraction]:
    return [d_lower ** (k + 1) * L(k) ** k / 2**n for k in range(1, kmax + 1)]


def epsilon_budget(d_lower, n: int, kmax: int = DEFAULT_KMAX) -> Budget:
    """``eps_n = 1/2 min_{k<=kmax} d^(k+1) log(k+3)^k / 2^n``, rounded down.

    The rounding keeps 64 significant bits, so halving stays exact.
    """
    d_lower = Q(d_lower)
    if d_lower <= 0:
        raise ValueError("d_lower must be positive")
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    eps = round_down(min(_choice_terms(d_lower, n, kmax)) / 2)
    return Budget(n, eps, kmax)


# --------------------------------------------------------------------------
# McKissick disc families


def rational_unit_vector(t: Fraction) -> QPoint:
    d = 1 + t * t
    return QPoint((1 - t * t) / d, 2 * t / d)


def generate_mckissick_discs(B: CandidateDisc, budget: Budget, m_count: int, seed: Optional[int] = None,
                             strategy: str = "ring") -> list[Disc]:
    """Pairwise disjoint open discs inside B with radii summing below eps_n.

    Disc 1 sits at the centre of B; disc m >= 2 occupies its own annulus
    around the centre, so discs are disjoint whatever their angles.  Radii
    halve from one disc to the next.  ``strategy="jitter"`` draws the angles
    from ``seed``; ``"ring"`` uses a fixed angle sequence.
    """
    if m_count < 1:
        raise ValueError("m_count must be >= 1")
    R = B.disc.radius
    eps = budget.epsilon
    T = min(eps / 2, R / 2) if m_count == 1 else min(eps / 2, R / 4)
    smallest_log2 = (T.numerator.bit_length() - T.denominator.bit_length()) - (m_count - 1)
    if smallest_log2 < -1074:
        raise CapacityError(f"{m_count} discs do not fit in budget {float(eps):.3g} above the minimum radius")
    rng = random.Random(seed) if strategy == "jitter" else None
    if strategy not in ("ring", "jitter"):
        raise ValueError(f"unknown strategy {strategy!r}")
    c = B.disc.center
    discs = [Disc(c, T)]
    inner = T
    rho = T
    for m in range(2, m_count + 1):
        rho = rho / 2
        if rng is not None:
            t = Fraction(rng.randrange(-2**16, 2**16 + 1), 2**16)
        else:
            t = Fraction(m - 1, m + 1)
        u = rational_unit_vector(t)
        discs.append(Disc(c + u * (inner + rho * Fraction(3, 2)), rho))
        inner += 3 * rho
    return discs


# --------------------------------------------------------------------------
# the assembled set


@dataclass
class Group:
    candidate: CandidateDisc
    budget: Budget
    deleted: list


@dataclass
class Certificate:
    name: str
    inputs: dict
    bounds: dict
    passed: bool
    detail: str = ""

    def to_json(self):
        return {"name": self.name, "inputs": self.inputs, "bounds": self.bounds,
                "passed": self.passed, "detail": self.detail}


@dataclass
class SwissCheese:
    target: Optional[TargetSet]
    groups: list = field(default_factory=list)
    outer: Disc = UNIT_DISC
    stage: Optional[int] = None
    kmax: int = DEFAULT_KMAX
    certificates: list = field(default_factory=list)

    def deleted_discs(self) -> list[Disc]:
        return [D for g in self.groups for D in g.deleted]

    def membership(self, z: QPoint) -> str:
        """``"out"``, ``"boundary"`` (on a circle, still in X) or ``"in"``."""
        r = dist_point_point_sq(z, self.outer.center)
        R2 = self.outer.radius ** 2
        if r > R2:
            return "out"
        edge = r == R2
        for D in self.deleted_discs():
            loc = D.locate(z)
            if loc < 0:
                return "out"
            edge = edge or loc == 0
        return "boundary" if edge else "in"


def membership(cheese: SwissCheese, z: QPoint) -> str:
    return cheese.membership(z)


# --------------------------------------------------------------------------
# certificates


def _group_certificates(g: Group, K: Optional[TargetSet], stage) -> list[Certificate]:
    n = g.budget.n
    B = g.candidate.disc
    certs = []

    ok = inside_unit_disc(B)
    detail = "" if ok else "closure of B_n leaves the closed unit disc"
    if ok and K is not None:
        fresh = disc_target_distance(B, K, stage)
        ok = fresh.lower > 0 and g.candidate.d_lower <= fresh.lower
        if not ok:
            detail = f"d_n lower {float(g.candidate.d_lower):.3g} not certified (recomputed {float(fresh.lower):.3g})"
    for D in g.deleted:
        if not B.contains_disc(D):
            ok, detail = False, f"deleted disc {D.center} not inside B_{n}"
    certs.append(Certificate(f"containment[n={n}]", {"disc": B.to_json()},
                             {"d_lower": q_str(g.candidate.d_lower)}, ok, detail))

    ok, detail = True, ""
    ds = g.deleted
    for i in range(len(ds)):
        for j in range(i + 1, len(ds)):
            if not ds[i].disjoint_from(ds[j]):
                ok, detail = False, f"D_{n},{i + 1} meets D_{n},{j + 1}"
                break
        if not ok:
            break
    certs.append(Certificate(f"disjointness[n={n}]", {"count": len(ds)}, {}, ok, detail))

    total = sum((D.radius for D in ds), Fraction(0))
    ok = total < g.budget.epsilon
    certs.append(Certificate(f"radii_sum[n={n}]", {"count": len(ds)},
                             {"sum": q_str(total), "epsilon": q_str(g.budget.epsilon)}, ok,
                             "" if ok else "sum of radii is not below epsilon_n"))

    terms = _choice_terms(g.candidate.d_lower, n, g.budget.kmax)
    bad = [k for k, t in enumerate(terms, start=1) if g.budget.epsilon > t]
    certs.append(Certificate(f"epsilon_choice[n={n}]", {"kmax": g.budget.kmax},
                             {"epsilon": q_str(g.budget.epsilon)}, not bad,
                             "" if not bad else f"epsilon_n too large at k={bad[0]}"))
    return certs


@dataclass
class EpsilonBoundResult:
    k: int
    passed: bool
    left: Fraction
    right: Fraction


def verify_epsilon_bound(cheese: SwissCheese, k: int) -> EpsilonBoundResult:
    """Check ``sum_n eps_n / d_n^(k+1) <= log(k+3)^k`` with conservative ends."""
    left = sum((g.budget.epsilon / g.candidate.d_lower ** (k + 1) for g in cheese.groups), Fraction(0))
    right = L(k) ** k
    return EpsilonBoundResult(k, left <= right, left, right)


def certify(cheese: SwissCheese, workers: int = 1) -> list[Certificate]:
    """Recompute every certificate from the raw disc data."""
    from concurrent.futures import ThreadPoolExecutor

    K, stage = cheese.target, cheese.stage
    certs = []
    ns = [g.budget.n for g in cheese.groups]
    if len(set(ns)) != len(ns):
        certs.append(Certificate("group_index", {}, {}, False, "duplicate group index"))
    kmax = min([g.budget.kmax for g in cheese.groups] + [cheese.kmax])
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        for part in pool.map(lambda g: _group_certificates(g, K, stage), cheese.groups):
            certs.extend(part)
        results = list(pool.map(lambda k: verify_epsilon_bound(cheese, k), range(1, kmax + 1)))
    for r in results:
        certs.append(Certificate(f"epsilon_bound[k={r.k}]", {"kmax": kmax},
                                 {"left": q_str(r.left), "right": q_str(r.right)}, r.passed,
                                 "" if r.passed else "sum of eps_n/d_n^(k+1) exceeds log(k+3)^k"))
    return certs


def assemble(K: Optional[TargetSet], groups: Sequence[Group], stage=None, kmax: int = DEFAULT_KMAX,
             workers: int = 1) -> SwissCheese:
    """Build X and attach certificates; the first failing certificate aborts."""
    cheese = SwissCheese(K, list(groups), stage=stage, kmax=kmax)
    certs = certify(cheese, workers)
    for c in certs:
        if not c.passed:
            raise CertificateError(c)
    cheese.certificates = certs
    return cheese


def build_cheese(K: TargetSet, count: int, kmax: int = DEFAULT_KMAX, stage=None, m_count: int = 4,
                 seed: Optional[int] = None, strategy: str = "ring", workers: int = 1,
                 progress=None) -> SwissCheese:
    """Run the whole pipeline for ``count`` candidate discs."""
    groups = []
    if count > 0:
        for cand in enumerate_candidates(K, count, stage, progress):
            budget = epsilon_budget(cand.d_lower, cand.n, kmax)
            discs = generate_mckissick_discs(cand, budget, m_count, seed=seed, strategy=strategy)
            groups.append(Group(cand, budget, discs))
    return assemble(K, groups, stage, kmax, workers)


# --------------------------------------------------------------------------
# empirical contract checker for unit-function families


@dataclass
class UnitPlan:
    inside: list
    collar: list
    exterior: list

    @property
    def size(self) -> int:
        return len(self.inside) + len(self.collar) + len(self.exterior)


@dataclass
class UnitFunctionCandidate:
    parent: Disc
    deleted: list
    sequence: list
    plan: Optional[UnitPlan] = None

    def __post_init__(self):
        if not self.sequence:
            raise ValueError("function sequence must be non-empty")


@dataclass
class ContractReport:
    poles_ok: bool
    convergence_ok: bool
    zero_outside_ok: bool
    nonzero_inside_ok: bool
    witnesses: dict = field(default_factory=dict)
    deltas: list = field(default_factory=list)
    label: str = "EMPIRICAL (sampled, not a proof)"

    @property
    def passed(self) -> bool:
        return self.poles_ok and self.convergence_ok and self.zero_outside_ok and self.nonzero_inside_ok


class _DiscIndex:
    """Exact point-in-open-disc queries, screened by a float nearest-centre pass."""

    def __init__(self, discs: Sequence[Disc]):
        self.discs = list(discs)
        self.centers = np.array([complex(D.center) for D in self.discs])

    def candidates(self, z: QPoint, k: int = 4) -> list[int]:
        if not self.discs:
            return []
        d = np.abs(self.centers - complex(z))
        return [int(i) for i in np.argsort(d, kind="stable")[:k]]

    def containing(self, z: QPoint) -> Optional[Disc]:
        for i in self.candidates(z):
            if self.discs[i].locate(z) < 0:
                return self.discs[i]
        for D in self.discs:
            if D.locate(z) < 0:
                return D
        return None

    def clear_of(self, z: QPoint) -> bool:
        """True when z is outside the closure of every disc."""
        if not self.discs:
            return True
        radii = np.array([float(D.radius) for D in self.discs])
        gap = np.abs(self.centers - complex(z)) - radii
        close = np.nonzero(gap < 1e-9 + 1e-9 * radii)[0]
        return all(self.discs[int(i)].locate(z) > 0 for i in close)


def check_unit_function(candidate: UnitFunctionCandidate, plan: Optional[UnitPlan] = None,
                        tol: float = 1e-6, floor: float = 0.5, cauchy_tol: float = 1e-2) -> ContractReport:
    """Sampled check of the four properties a McKissick-type family must have."""
    plan = plan or candidate.plan
    if plan is None or not plan.inside or not plan.collar or not plan.exterior:
        raise PlanError("plan needs points in D minus U, in the exterior collar and outside D")
    D, U = candidate.parent, candidate.deleted
    wit = {}

    index = _DiscIndex(U)
    poles_ok = True
    for f in candidate.sequence:
        for p, _ in f.poles:
            if index.containing(p) is None:
                poles_ok = False
                wit.setdefault("poles", p)
        if not poles_ok:
            break

    pts = plan.inside + plan.collar + plan.exterior
    zs = np.array([complex(z) for z in pts])
    with np.errstate(all="ignore"):
        vals = [f.eval_complex(zs) for f in candidate.sequence]
    deltas = [float(np.nanmax(np.abs(b - a))) for a, b in zip(vals, vals[1:])]
    if deltas:
        convergence_ok = deltas[-1] <= cauchy_tol and deltas[-1] <= deltas[0] and all(np.isfinite(deltas))
        if not convergence_ok:
            i = int(np.nanargmax(np.abs(vals[-1] - vals[-2])))
            wit["convergence"] = pts[i]
    else:
        convergence_ok = True

    F = np.abs(vals[-1])
    ni = len(plan.inside)
    outside = F[ni:]
    zero_outside_ok = bool(np.all(outside <= tol))
    if not zero_outside_ok:
        wit["zero_outside"] = pts[ni + int(np.argmax(outside))]
    inside = F[:ni]
    nonzero_inside_ok = bool(np.all(inside >= floor))
    if not nonzero_inside_ok:
        wit["nonzero_inside"] = pts[int(np.argmin(inside))]
    return ContractReport(poles_ok, convergence_ok, zero_outside_ok, nonzero_inside_ok, wit, deltas)


def pole_ring_family(D: Disc, epsilon, levels: int = 6, base: int = 16) -> UnitFunctionCandidate:
    """Tuned family: f_n has ``base * 2^(n-1)`` simple poles on a circle of
    radius ``R(1 - 2^-(n+2))``, each inside its own deleted disc.

    With w = z - c and poles a_j near rho * exp(2 pi i j / N),
    f_n(w) = (1/N) sum_j a_j / (a_j - w) is close to 1/(1 - (w/rho)^N),
    which tends to 1 inside the ring and to 0 outside it.
    """
    eps = min(Q(epsilon), D.radius / 8)
    R, c = D.radius, D.center
    seq, U = [], []
    for n in range(1, levels + 1):
        N = base * 2 ** (n - 1)
        rho = R * (1 - Fraction(1, 2 ** (n + 2)))
        r = eps / 2**n / (2 * N)
        terms = {}
        for a in circle_points(QPoint(0, 0), rho, N):
            terms[c + a] = [-a / N]
            U.append(Disc(c + a, r))
        seq.append(RationalMap.from_terms((), terms))
    cand = UnitFunctionCandidate(D, U, seq)
    cand.plan = default_unit_plan(D, U)
    return cand


def default_unit_plan(D: Disc, U: Sequence[Disc], count: int = 1000) -> UnitPlan:
    """Deterministic 10^3-point plan: 50% in D minus U, 30% collar, 20% far out."""
    R, c = D.radius, D.center
    n_in, n_col = count // 2, (3 * count) // 10
    n_ext = count - n_in - n_col

    def ring(radii, per):
        pts = []
        for rad in radii:
            pts += circle_points(c, rad, per)
        return pts

    inner_r = [R * Fraction(i, 10) * Fraction(61, 64) for i in range(1, 11)]
    inside = [c] + ring(inner_r, n_in // 10 + 1)
    index = _DiscIndex(U)
    inside = [z for z in inside if index.clear_of(z)][:n_in]
    collar = ring([R * (1 + Fraction(i, 64)) for i in range(2, 8)], n_col // 6 + 1)[:n_col]
    exterior = ring([R * (2 + i) for i in range(4)], n_ext // 4 + 1)[:n_ext]
    return UnitPlan(inside, collar, exterior)
