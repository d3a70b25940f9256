"""Constructive searches: root-surgery by adding steep branches, and the bisection that
places an inflection exactly on an intermediate milestone."""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

from scipy.optimize import brentq

from ..core.errors import BasePatternViolation, CapExceeded, NoSignChange, UsageError
from .characteristic import DEFAULT_ZERO_BAND, g_char
from .examples import T_MINUS
from .expsum import DEFAULT_TOL
from .inflect import (
    DEFAULT_COINCIDE_TOL,
    SCHEMA_VERSION,
    InflectionReport,
    classify_milestones,
    find_inflections,
    negative_param_pattern,
)
from .plmap import PLMap, new_map
from .spectrum import t_of_alpha

logger = logging.getLogger("lyapspec.app.surgery")

DEFAULT_GROWTH = 2.0
DEFAULT_LAMBDA_CAP = 1e4
DEFAULT_X_TOL = 1e-9

__all__ = [
    "CoincidenceResult",
    "SurgeryStep",
    "SurgeryTrace",
    "add_branch_search",
    "base_pattern_holds",
    "build_chain",
    "milestone_coincidence_search",
    "negative_param_pattern",
]


@dataclass(frozen=True)
class SurgeryStep:
    step: int
    added_log_slope: float
    branch_count: int
    target_count: int
    inflection_count: int
    negative_param_pattern: bool
    t_values: Tuple[float, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "step": self.step,
            "added_log_slope": self.added_log_slope,
            "branch_count": self.branch_count,
            "target_count": self.target_count,
            "inflection_count": self.inflection_count,
            "negative_param_pattern": self.negative_param_pattern,
            "t_values": list(self.t_values),
        }


@dataclass(frozen=True)
class SurgeryTrace:
    base_map: PLMap
    base_count: int
    steps: Tuple[SurgeryStep, ...]
    final_map: PLMap
    final_report: InflectionReport

    @property
    def added_log_slopes(self) -> List[float]:
        return [s.added_log_slope for s in self.steps]

    @property
    def counts(self) -> List[int]:
        return [self.base_count] + [s.inflection_count for s in self.steps]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "base_map": self.base_map.to_dict(),
            "base_count": self.base_count,
            "steps": [s.to_dict() for s in self.steps],
            "final_map": self.final_map.to_dict(),
            "final_report": self.final_report.to_dict(),
        }


@dataclass(frozen=True)
class CoincidenceResult:
    x_star: float
    map: PLMap
    report: InflectionReport
    t2: float
    phi: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "x_star": self.x_star,
            "log_x_star": math.log(self.x_star),
            "t2": self.t2,
            "phi": self.phi,
            "report": self.report.to_dict(),
        }


def base_pattern_holds(report: InflectionReport) -> bool:
    """The patterns surgery can grow from: all inflections at t < 0, or the negative-parameter pattern."""
    ts = report.t_values
    return bool(ts) and (all(t < 0 for t in ts) or negative_param_pattern(report))


def add_branch_search(
        base: PLMap,
        target_count: int,
        lambda_start: Optional[float] = None,
        growth: float = DEFAULT_GROWTH,
        lambda_cap: float = DEFAULT_LAMBDA_CAP,
        require_pattern: bool = False,
        require_base_pattern: bool = False,
        tol: float = DEFAULT_TOL,
        zero_band: float = DEFAULT_ZERO_BAND
) -> Tuple[PLMap, InflectionReport]:
    """Adds one branch of log-slope lambda_start * growth**k for k = 0, 1, ... and returns
    the first augmented map whose certified count reaches target_count."""
    if growth <= 1.0:
        raise UsageError(f"growth must be > 1, got {growth!r}")
    top = base.log_slopes[-1]
    if lambda_start is None:
        lambda_start = growth * top
    if lambda_start <= top:
        raise UsageError(f"lambda_start {lambda_start!r} must exceed the largest log-slope {top!r}")

    if require_base_pattern:
        base_report = find_inflections(base, tol=tol, zero_band=zero_band)
        if not base_pattern_holds(base_report):
            raise BasePatternViolation(
                f"Base inflections at t={base_report.t_values} do not have the negative-parameter pattern"
            )

    candidate = last_tried = lambda_start
    while candidate <= lambda_cap:
        last_tried = candidate
        augmented = base.with_branch(candidate)
        report = find_inflections(augmented, tol=tol, zero_band=zero_band)
        pattern = negative_param_pattern(report)
        logger.debug(
            f"Candidate log-slope {candidate!r}: {report.transversal_count} inflections, pattern={pattern}"
        )
        if report.transversal_count >= target_count and (pattern or not require_pattern):
            logger.info(f"Added log-slope {candidate!r}: {report.transversal_count} inflections")
            return augmented, report
        candidate *= growth

    raise CapExceeded(last_tried, lambda_cap)


def build_chain(
        base: Optional[PLMap] = None,
        n_target: int = 4,
        growth: float = DEFAULT_GROWTH,
        lambda_cap: float = DEFAULT_LAMBDA_CAP,
        tol: float = DEFAULT_TOL,
        zero_band: float = DEFAULT_ZERO_BAND
) -> SurgeryTrace:
    """Repeated root-surgery up to n_target branches, keeping at least 2k - 4 inflections
    and the negative-parameter pattern at k branches."""
    if base is None:
        base = T_MINUS.map
    if n_target < base.branch_count:
        raise UsageError(f"n_target {n_target} is below the base branch count {base.branch_count}")

    base_report = find_inflections(base, tol=tol, zero_band=zero_band)
    if not base_pattern_holds(base_report):
        raise BasePatternViolation(
            f"Base inflections at t={base_report.t_values} do not have the negative-parameter pattern"
        )

    current, report = base, base_report
    steps: List[SurgeryStep] = []
    for step, k in enumerate(range(base.branch_count + 1, n_target + 1), start=1):
        target = max(2 * k - 4, report.transversal_count + 2)
        try:
            current, report = add_branch_search(
                current,
                target,
                growth=growth,
                lambda_cap=lambda_cap,
                require_pattern=True,
                tol=tol,
                zero_band=zero_band,
            )
        except CapExceeded as e:
            raise CapExceeded(e.last_candidate, e.cap, step=step) from e
        steps.append(SurgeryStep(
            step=step,
            added_log_slope=current.log_slopes[-1],
            branch_count=current.branch_count,
            target_count=target,
            inflection_count=report.transversal_count,
            negative_param_pattern=negative_param_pattern(report),
            t_values=tuple(report.t_values),
        ))

    return SurgeryTrace(
        base_map=base,
        base_count=base_report.transversal_count,
        steps=tuple(steps),
        final_map=current,
        final_report=report,
    )


def _three_branch(lam1: float, lam2: float, lam3: float) -> PLMap:
    return new_map(log_slopes=[lam1, lam2, lam3], label="coincidence")


def milestone_coincidence_search(
        lam1: float,
        lam3: float,
        x2_bracket: Tuple[float, float],
        tol: float = DEFAULT_X_TOL,
        coincide_tol: float = DEFAULT_COINCIDE_TOL,
        zero_band: float = DEFAULT_ZERO_BAND
) -> CoincidenceResult:
    """Finds the middle slope x2 at which G vanishes exactly at α = log x2.

    φ(x2) = G(t2) with α(t2) = log x2 for the map with log-slopes (λ1, log x2, λ3).
    """
    lo, hi = x2_bracket
    if not lo < hi:
        raise NoSignChange(f"Bracket ({lo!r}, {hi!r}) is empty or inverted")
    if not (lam1 < math.log(lo) and math.log(hi) < lam3):
        raise NoSignChange(f"log of the bracket must lie strictly inside ({lam1!r}, {lam3!r})")

    def phi(x2: float) -> float:
        lam2 = math.log(x2)
        pl_map = _three_branch(lam1, lam2, lam3)
        return g_char(pl_map, t_of_alpha(pl_map, lam2))

    phi_lo, phi_hi = phi(lo), phi(hi)
    if phi_lo * phi_hi >= 0:
        raise NoSignChange(f"φ has no sign change on ({lo!r}, {hi!r}): φ = ({phi_lo!r}, {phi_hi!r})")

    x_star = brentq(phi, lo, hi, xtol=tol, rtol=4 * 2.0 ** -52, maxiter=500)
    pl_map = _three_branch(lam1, math.log(x_star), lam3)
    t2 = t_of_alpha(pl_map, math.log(x_star))
    report = classify_milestones(find_inflections(pl_map, zero_band=zero_band), coincide_tol=coincide_tol)
    logger.info(f"Milestone coincidence at x*={x_star!r} (t2={t2!r})")
    return CoincidenceResult(x_star=x_star, map=pl_map, report=report, t2=t2, phi=phi(x_star))
