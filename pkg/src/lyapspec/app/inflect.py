"""Certified Lyapunov inflections and the checks built on them.

The roots of H are the critical points of G. G is strictly monotone on each panel between
them and tends to -inf at both ends, so bisecting every panel whose endpoint signs differ
yields every sign-changing zero of G, i.e. every inflection of L(α).
"""

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence, Tuple

from scipy.optimize import brentq

from ..core.errors import NotApplicable, TangentialAmbiguity
from .characteristic import DEFAULT_ZERO_BAND, g_char, g_sign, h_expsum, q_coeff
from .expsum import DEFAULT_MAX_ITER, DEFAULT_TOL, DEFAULT_VALUE_TOL, RootKind, bisect_sign_change, isolate_roots
from .plmap import Milestone, PLMap
from .spectrum import alpha, t_of_alpha

logger = logging.getLogger("lyapspec.app.inflect")

SCHEMA_VERSION = 1
DEFAULT_COINCIDE_TOL = 1e-6
_MAX_EXPANSIONS = 60


class QSign(Enum):
    ALL_POSITIVE = "all_positive"
    ALL_NEGATIVE = "all_negative"
    MIXED = "mixed"


class Concavity(Enum):
    CONCAVE = "concave"
    CONVEX = "convex"
    INFLECTION = "inflection"


@dataclass(frozen=True)
class InflectionPoint:
    t: float
    alpha: float
    kind: RootKind
    bracket: Tuple[float, float]
    g_value: float = 0.0
    # positions k, k+1 in the milestone list with milestone[k] <= α < milestone[k+1]
    milestone_interval: Optional[Tuple[int, int]] = None
    coincides_with: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t": self.t,
            "alpha": self.alpha,
            "kind": self.kind.value,
            "bracket": list(self.bracket),
            "g_value": self.g_value,
            "milestone_interval": list(self.milestone_interval) if self.milestone_interval else None,
            "coincides_with": self.coincides_with,
        }


@dataclass(frozen=True)
class BoundCheck:
    name: str
    bound: int
    applies: bool
    satisfied: bool

    def to_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class ProfileInterval:
    lo: float
    hi: float
    sign: int

    def to_dict(self) -> Dict[str, Any]:
        # ±inf are not valid JSON numbers
        return {
            "lo": None if math.isinf(self.lo) else self.lo,
            "hi": None if math.isinf(self.hi) else self.hi,
            "sign": "+" if self.sign > 0 else "-",
        }


@dataclass(frozen=True)
class InflectionReport:
    map: PLMap
    inflections: Tuple[InflectionPoint, ...]
    tangential_candidates: Tuple[InflectionPoint, ...] = ()
    critical_points: Tuple[float, ...] = ()
    h_term_count: int = 0
    tol: float = DEFAULT_TOL
    zero_band: float = DEFAULT_ZERO_BAND
    bounds: Tuple[BoundCheck, ...] = ()
    predicates: Dict[str, Any] = field(default_factory=dict)

    @property
    def transversal_count(self) -> int:
        return len(self.inflections)

    @property
    def tangential_count(self) -> int:
        return len(self.tangential_candidates)

    @property
    def t_values(self) -> List[float]:
        return [p.t for p in self.inflections]

    @property
    def alpha_values(self) -> List[float]:
        return [p.alpha for p in self.inflections]

    @property
    def convexity_profile(self) -> List[ProfileInterval]:
        return convexity_profile(self)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "map": self.map.to_dict(),
            "degenerate": False,
            "transversal_count": self.transversal_count,
            "tangential_count": self.tangential_count,
            "inflections": [p.to_dict() for p in self.inflections],
            "tangential_candidates": [p.to_dict() for p in self.tangential_candidates],
            "critical_points": list(self.critical_points),
            "h_term_count": self.h_term_count,
            "convexity_profile": [interval.to_dict() for interval in self.convexity_profile],
            "bounds": [b.to_dict() for b in self.bounds],
            "predicates": self.predicates,
            "tolerances": {"t_tol": self.tol, "zero_band": self.zero_band},
        }


def _outer_point(pl_map: PLMap, anchor: float, direction: float) -> float:
    """A point beyond anchor (in the given direction) where G < 0."""
    step = 1.0
    for _ in range(_MAX_EXPANSIONS):
        point = anchor + direction * step
        if g_char(pl_map, point) < 0:
            return point
        step *= 2.0
    raise AssertionError(f"G did not become negative beyond t={anchor!r}")


def find_inflections(
        pl_map: PLMap,
        tol: float = DEFAULT_TOL,
        zero_band: float = DEFAULT_ZERO_BAND,
        value_tol: float = DEFAULT_VALUE_TOL,
        max_iter: int = DEFAULT_MAX_ITER,
        raise_on_tangential: bool = False
) -> InflectionReport:
    # g_char raises DegenerateSpectrum for r_T = 1
    g_char(pl_map, 0.0)

    h = h_expsum(pl_map)
    critical = isolate_roots(h, tol=tol, value_tol=value_tol, max_iter=max_iter)
    crit_t = [bracket.refined_root for bracket in critical]

    first = crit_t[0] if crit_t else 0.0
    last = crit_t[-1] if crit_t else 0.0
    points = [_outer_point(pl_map, first, -1.0)] + crit_t + [_outer_point(pl_map, last, 1.0)]
    signs = [-1] + [g_sign(pl_map, p, zero_band) for p in crit_t] + [-1]

    def sign_at(t: float) -> int:
        g = g_char(pl_map, t)
        return 0 if g == 0.0 else (1 if g > 0 else -1)

    transversal: List[InflectionPoint] = []
    tangential: List[InflectionPoint] = []

    for k in range(len(points) - 1):
        if signs[k] * signs[k + 1] < 0:
            lo, hi, root = bisect_sign_change(sign_at, points[k], points[k + 1], signs[k], tol, max_iter)
            transversal.append(InflectionPoint(
                t=root, alpha=alpha(pl_map, root), kind=RootKind.TRANSVERSAL,
                bracket=(lo, hi), g_value=g_char(pl_map, root),
            ))

    for k in range(1, len(points) - 1):
        if signs[k] != 0:
            continue
        crit = critical[k - 1]
        kind = RootKind.TRANSVERSAL if signs[k - 1] * signs[k + 1] < 0 else RootKind.TANGENTIAL
        point = InflectionPoint(
            t=points[k], alpha=alpha(pl_map, points[k]), kind=kind,
            bracket=(crit.lo, crit.hi), g_value=g_char(pl_map, points[k]),
        )
        if kind is RootKind.TRANSVERSAL:
            transversal.append(point)
        else:
            logger.warning(f"Tangential zero candidate of G at t={point.t!r} (G={point.g_value!r})")
            if raise_on_tangential:
                raise TangentialAmbiguity(point.t, point.g_value)
            tangential.append(point)

    transversal.sort(key=lambda p: p.t)
    report = InflectionReport(
        map=pl_map,
        inflections=tuple(transversal),
        tangential_candidates=tuple(tangential),
        critical_points=tuple(crit_t),
        h_term_count=h.num_terms,
        tol=tol,
        zero_band=zero_band,
    )
    report = dataclasses.replace(report, bounds=tuple(check_bounds(report)))
    report = dataclasses.replace(report, predicates=_predicates(report))
    logger.info(
        f"{pl_map.label or 'map'} (n={pl_map.branch_count}, r_T={pl_map.essential_branch_number}): "
        f"{report.transversal_count} inflections, {report.tangential_count} tangential candidates"
    )
    return report


def check_bounds(report: InflectionReport) -> List[BoundCheck]:
    """Evaluates every count bound that applies to the report's map."""
    pl_map = report.map
    n = pl_map.branch_count
    r = pl_map.essential_branch_number
    mult = pl_map.multiplicities
    count = report.transversal_count + report.tangential_count

    candidates = [
        ("general", n * (n - 1) * (n + 4) // 6, True),
        ("three_branch", 2, n == 3),
        ("essential_two", 2, r == 2),
        ("essential_three", 6, r == 3),
        ("essential_three_balanced", 2, r == 3 and mult[1] <= min(mult[0], mult[2])),
        ("essential_general", r * (r - 1) * (r + 4) // 6, True),
        ("exponential_terms", report.h_term_count, report.h_term_count > 0),
    ]

    results = []
    for name, bound, applies in candidates:
        satisfied = (not applies) or count <= bound
        if not satisfied:
            logger.critical(
                f"Inflection count {count} exceeds the {name} bound {bound} for log-slopes {pl_map.log_slopes}"
            )
        results.append(BoundCheck(name, bound, applies, satisfied))
    return results


def classify_milestones(
        report: InflectionReport,
        milestones: Optional[Sequence[Milestone]] = None,
        coincide_tol: float = DEFAULT_COINCIDE_TOL
) -> InflectionReport:
    """Places each inflection's α in its half-open milestone subinterval."""
    if milestones is None:
        milestones = report.map.milestones()
    values = [m.log_slope for m in milestones]

    def place(point: InflectionPoint) -> InflectionPoint:
        k = 0
        while k + 2 < len(values) and point.alpha >= values[k + 1]:
            k += 1
        coincides = None
        for idx, value in enumerate(values):
            if abs(point.alpha - value) <= coincide_tol:
                coincides = idx
                break
        return dataclasses.replace(point, milestone_interval=(k, k + 1), coincides_with=coincides)

    return dataclasses.replace(
        report,
        inflections=tuple(place(p) for p in report.inflections),
        tangential_candidates=tuple(place(p) for p in report.tangential_candidates),
    )


def q_sign_class(pl_map: PLMap) -> QSign:
    """Sign pattern of Q over all branch triples; triples with Q = 0 are ignored."""
    lam = pl_map.log_slopes
    if len(lam) < 3:
        raise NotApplicable("Q is defined on branch triples; the map has fewer than 3 branches")

    positive = negative = False
    for i, j, k in combinations(range(len(lam)), 3):
        q = q_coeff(lam[i], lam[j], lam[k])
        if q > 0:
            positive = True
        elif q < 0:
            negative = True

    if positive and not negative:
        return QSign.ALL_POSITIVE
    if negative and not positive:
        return QSign.ALL_NEGATIVE
    return QSign.MIXED


def q_sign_consistency(report: InflectionReport) -> Optional[Dict[str, Any]]:
    """all_positive allows at most one inflection with t <= 0, all_negative at most one with t >= 0."""
    if report.map.branch_count < 3:
        return None
    q_class = q_sign_class(report.map)
    nonpositive = sum(1 for t in report.t_values if t <= 0)
    nonnegative = sum(1 for t in report.t_values if t >= 0)
    if q_class is QSign.ALL_POSITIVE:
        consistent = nonpositive <= 1
    elif q_class is QSign.ALL_NEGATIVE:
        consistent = nonnegative <= 1
    else:
        consistent = True
    if not consistent:
        logger.critical(f"Q sign class {q_class.value} contradicts inflections at t={report.t_values}")
    return {
        "q_sign_class": q_class.value,
        "nonpositive_t_count": nonpositive,
        "nonnegative_t_count": nonnegative,
        "consistent": consistent,
    }


def two_slope_tstar(pl_map: PLMap, report: Optional[InflectionReport] = None) -> float:
    """t* = log(n2/n1) / (λ1 - λ2), the unique zero of H for two distinct slopes."""
    view = pl_map.multiplicity_view
    if len(view) != 2:
        raise NotApplicable(f"t* needs exactly two distinct slopes, map has {len(view)}")
    (lam1, n1), (lam2, n2) = view
    t_star = math.log(n2 / n1) / (lam1 - lam2)

    if report is not None and report.transversal_count == 2:
        t1, t2 = report.t_values
        if not t1 < t_star < t2:
            raise AssertionError(f"t*={t_star!r} does not separate the inflections {t1!r}, {t2!r}")
    return t_star


def separation_condition(pl_map: PLMap, c: float = 10.0) -> bool:
    """True when every consecutive pair of distinct log-slopes satisfies λ_{i+1} > c λ_i."""
    distinct = [lam for lam, _ in pl_map.multiplicity_view]
    return all(b > c * a for a, b in zip(distinct, distinct[1:]))


def convexity_profile(report: InflectionReport) -> List[ProfileInterval]:
    """Partition of the t-line by the inflections; concave (-) on both unbounded ends."""
    breaks = [-math.inf] + report.t_values + [math.inf]
    profile = []
    sign = -1
    for lo, hi in zip(breaks, breaks[1:]):
        profile.append(ProfileInterval(lo, hi, sign))
        sign = -sign
    return profile


def milestone_concavity(pl_map: PLMap, zero_band: float = DEFAULT_ZERO_BAND) -> List[Dict[str, Any]]:
    """Concavity of L at every milestone; the two terminals are concave by the limit of G."""
    milestones = pl_map.milestones()
    result = []
    for idx, milestone in enumerate(milestones):
        if idx == 0 or idx == len(milestones) - 1:
            result.append({
                "milestone": milestone.log_slope, "t": None, "g_value": None,
                "concavity": Concavity.CONCAVE.value,
            })
            continue
        t = t_of_alpha(pl_map, milestone.log_slope)
        sign = g_sign(pl_map, t, zero_band)
        concavity = Concavity.INFLECTION if sign == 0 else (Concavity.CONVEX if sign > 0 else Concavity.CONCAVE)
        result.append({
            "milestone": milestone.log_slope, "t": t, "g_value": g_char(pl_map, t),
            "concavity": concavity.value,
        })
    return result


def extremal_count_bounds(n: int) -> Dict[str, Any]:
    """Known bounds on P_n (most inflections with n branches) and Q_n (fewest branches
    giving n inflections, n even)."""
    if n < 1:
        raise NotApplicable("Branch count must be positive")
    upper = n * (n - 1) * (n + 4) // 6
    result: Dict[str, Any] = {
        "n": n,
        "p_lower": 2 * n - 4 if n >= 4 else (2 if n >= 2 else 0),
        "p_upper": upper,
        "p_known": 2 if n in (2, 3) else None,
    }
    if n % 2 == 0:
        # unique real root of x(x-1)(x+4)/6 = n; the cubic is increasing for x >= 1
        n_star = brentq(lambda x: x * (x - 1) * (x + 4) / 6.0 - n, 1.0, n + 1.0)
        result["q_lower"] = n_star
        result["q_upper"] = (n + 4) / 2
        result["q_known"] = 4 if n == 4 else None
    return result


def negative_param_pattern(report: InflectionReport) -> bool:
    """True iff every inflection has t < 0 except the largest, which has t > 0."""
    ts = report.t_values
    if not ts:
        return False
    return all(t < 0 for t in ts[:-1]) and ts[-1] > 0


def _predicates(report: InflectionReport) -> Dict[str, Any]:
    pl_map = report.map
    predicates: Dict[str, Any] = {
        "negative_param_pattern": negative_param_pattern(report),
        "q_sign": q_sign_consistency(report),
        "separation_c10": separation_condition(pl_map),
        "t_star": None,
        "extremal_bounds": extremal_count_bounds(pl_map.branch_count),
    }
    if pl_map.essential_branch_number == 2:
        predicates["t_star"] = two_slope_tstar(pl_map, report)
    return predicates
