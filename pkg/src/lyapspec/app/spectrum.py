"""Parametric Lyapunov spectrum of a piecewise linear map.

With F(t) = sum_i exp(λ_i t), the spectrum is parametrised by
    α(t) = F'(t) / F(t),    L(α(t)) = F(t) log F(t) / F'(t) - t.
Every quantity is formed from ratios of the shifted sums in ScaledQuad, so the
common factor exp(M) cancels and large log-slopes never overflow.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar
from scipy.special import logsumexp

from ..core.errors import AlphaOutOfDomain, ConvergenceError, DegenerateSpectrum
from .plmap import PLMap

logger = logging.getLogger("lyapspec.app.spectrum")

DEFAULT_T_TOL = 1e-12
DEFAULT_ALPHA_TOL = 1e-12
_MAX_EXPANSIONS = 40


@dataclass(frozen=True)
class ScaledQuad:
    """F^(k)(t) = exp(shift) * fk for k = 0..3.

    ``spread`` = f2*f0 - f1**2 and ``skew`` = f0**2*f3 + 2*f1**3 - 3*f0*f1*f2 (both still
    to be multiplied by exp(2*shift) and exp(3*shift)) are accumulated from centred
    moments, which keeps them accurate when one branch dominates.
    """

    shift: float
    f0: float
    f1: float
    f2: float
    f3: float
    spread: float
    skew: float

    @property
    def log_f(self) -> float:
        return self.shift + math.log(self.f0)


@dataclass(frozen=True)
class SpectrumSample:
    t: float
    alpha: float
    L: float
    dL_dalpha: float

    def to_row(self) -> Tuple[float, float, float, float]:
        return self.t, self.alpha, self.L, self.dL_dalpha


def f_derivs(pl_map: PLMap, t: float, extra_shift: float = 0.0) -> ScaledQuad:
    lam = pl_map.lambdas
    x = lam * t
    shift = float(x.max()) + extra_shift
    w = np.exp(x - shift)
    f0 = math.fsum(w)
    f1 = math.fsum(w * lam)
    f2 = math.fsum(w * lam ** 2)
    f3 = math.fsum(w * lam ** 3)
    centred = lam - f1 / f0
    spread = f0 * math.fsum(w * centred ** 2)
    skew = f0 * f0 * math.fsum(w * centred ** 3)
    return ScaledQuad(shift, f0, f1, f2, f3, spread, skew)


def log_f(pl_map: PLMap, t: float) -> float:
    """log F(t); also the pressure of the potential -u log|T'| at u = -t."""
    return float(logsumexp(pl_map.lambdas * t))


def alpha(pl_map: PLMap, t: float) -> float:
    """α(t) = F'/F; for a single distinct slope this is that slope for every t."""
    q = f_derivs(pl_map, t)
    return q.f1 / q.f0


def alpha_prime(pl_map: PLMap, t: float) -> float:
    q = f_derivs(pl_map, t)
    return q.spread / (q.f0 * q.f0)


def l_param(pl_map: PLMap, t: float) -> float:
    """L(α(t)); the degenerate map gives its single value log n / λ."""
    q = f_derivs(pl_map, t)
    return q.log_f * q.f0 / q.f1 - t


def dl_dalpha(pl_map: PLMap, t: float) -> float:
    q = f_derivs(pl_map, t)
    ratio = q.f0 / q.f1
    return -ratio * ratio * q.log_f


def _require_spectrum(pl_map: PLMap):
    if pl_map.is_degenerate:
        raise DegenerateSpectrum(
            f"All {pl_map.branch_count} branches share slope exp({pl_map.log_slopes[0]!r}); "
            "the spectrum is a single point"
        )


def _check_interior(pl_map: PLMap, target_alpha: float):
    _require_spectrum(pl_map)
    lo, hi = pl_map.spectrum_domain()
    if not lo < target_alpha < hi:
        raise AlphaOutOfDomain(f"α={target_alpha!r} is not inside ({lo!r}, {hi!r})")


def t_of_alpha(pl_map: PLMap, target_alpha: float, tol: float = DEFAULT_ALPHA_TOL) -> float:
    """Inverts the strictly increasing α(t)."""
    _check_interior(pl_map, target_alpha)

    def residual(t: float) -> float:
        return alpha(pl_map, t) - target_alpha

    lo, hi = -1.0, 1.0
    for _ in range(_MAX_EXPANSIONS):
        if residual(lo) < 0:
            break
        lo *= 2.0
    else:
        raise ConvergenceError(f"Could not bracket α={target_alpha!r} from below")
    for _ in range(_MAX_EXPANSIONS):
        if residual(hi) > 0:
            break
        hi *= 2.0
    else:
        raise ConvergenceError(f"Could not bracket α={target_alpha!r} from above")

    t = brentq(residual, lo, hi, xtol=DEFAULT_T_TOL, rtol=4 * np.finfo(float).eps, maxiter=500)

    # Newton polish
    slope = alpha_prime(pl_map, t)
    if slope > 0:
        polished = t - residual(t) / slope
        if abs(residual(polished)) < abs(residual(t)):
            t = polished

    if abs(residual(t)) > tol:
        logger.warning(f"t_of_alpha residual {residual(t):.3g} exceeds tolerance {tol:.3g}")
    return t


def l_legendre(pl_map: PLMap, target_alpha: float) -> float:
    """L(α) = (1/α) inf_u { log F(u) - u α }, minimised by golden-section search.

    Independent of t_of_alpha and of the parametric formula; used as a cross-check.
    """
    _check_interior(pl_map, target_alpha)

    def objective(u: float) -> float:
        return log_f(pl_map, u) - u * target_alpha

    triple = _convex_triple(objective)
    if triple is None:
        # objective flat to working precision around u = 0
        return objective(0.0) / target_alpha
    result = minimize_scalar(
        objective, bracket=triple, method="golden", options={"xtol": 1e-12, "maxiter": 10000}
    )
    return float(result.fun) / target_alpha


def _convex_triple(objective: Callable[[float], float]) -> Optional[Tuple[float, float, float]]:
    """(a, b, c) with objective(b) strictly below both ends, walking downhill from (-1, 0, 1).

    Returns None when all three values coincide, i.e. the convex objective is flat to
    working precision.
    """
    a, b, c = -1.0, 0.0, 1.0
    fa, fb, fc = objective(a), objective(b), objective(c)
    for _ in range(_MAX_EXPANSIONS):
        if fb < fa and fb < fc:
            return a, b, c
        if fa == fb == fc:
            return None
        if fa < fc:
            a, b, c = a - 2.0 * (b - a), a, b
            fa, fb, fc = objective(a), fa, fb
        else:
            a, b, c = b, c, c + 2.0 * (c - b)
            fa, fb, fc = fb, fc, objective(c)
    raise ConvergenceError("Could not bracket the minimum of log F(u) - uα")


def bowen_dimension(pl_map: PLMap) -> Tuple[float, float]:
    """Solves F(-s) = 1; returns (s, α(-s)), the maximum of the spectrum and where it sits."""
    if pl_map.branch_count == 1:
        return 0.0, pl_map.log_slopes[0]

    def pressure(s: float) -> float:
        return log_f(pl_map, -s)

    hi = 1.0
    for _ in range(_MAX_EXPANSIONS):
        if pressure(hi) < 0:
            break
        hi *= 2.0
    else:
        raise ConvergenceError("Could not bracket the Bowen root")

    s = brentq(pressure, 0.0, hi, xtol=DEFAULT_T_TOL, rtol=4 * np.finfo(float).eps, maxiter=500)
    return s, alpha(pl_map, -s)


def sample_spectrum(pl_map: PLMap, t_values: Iterable[float]) -> List[SpectrumSample]:
    _require_spectrum(pl_map)
    samples = []
    for t in t_values:
        t = float(t)
        q = f_derivs(pl_map, t)
        ratio = q.f0 / q.f1
        samples.append(SpectrumSample(
            t=t,
            alpha=q.f1 / q.f0,
            L=q.log_f * ratio - t,
            dL_dalpha=-ratio * ratio * q.log_f,
        ))
    return samples


def degenerate_spectrum(pl_map: PLMap) -> SpectrumSample:
    """The single point (λ, log n / λ) of a map whose branches all share one slope."""
    lam = pl_map.log_slopes[0]
    return SpectrumSample(t=0.0, alpha=lam, L=math.log(pl_map.branch_count) / lam, dL_dalpha=0.0)


def terminal_values(pl_map: PLMap) -> Tuple[float, float]:
    """Limits of L at the two ends of the domain: log(m_1)/λ_1 and log(m_r)/λ_r."""
    view = pl_map.multiplicity_view
    (lam_lo, m_lo), (lam_hi, m_hi) = view[0], view[-1]
    return math.log(m_lo) / lam_lo, math.log(m_hi) / lam_hi
