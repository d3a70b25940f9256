"""The concavity-convexity characteristic G(t) and the exponential sum H(t).

    G(t) = 2 log F - F'^2 / (F''F - F'^2)
    H(t) = F^2 F''' + 2 F'^3 - 3 F F' F''

sign(d²L/dα²) = sign(G) and sign(G') = sign(H), so the zeros of H partition the line
into panels on which G is monotone.
"""

import logging
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, List, Tuple

from ..core.errors import DegenerateSpectrum, SingleBranch
from .expsum import ExpSum, normalize
from .plmap import PLMap
from .spectrum import ScaledQuad, f_derivs

logger = logging.getLogger("lyapspec.app.characteristic")

DEFAULT_ZERO_BAND = 1e-9
_EXP_LIMIT = 709.78


@dataclass(frozen=True)
class CharSample:
    t: float
    G: float
    H_sign: int
    d2L_dalpha2: float

    def to_row(self) -> Tuple[float, float, int, float]:
        return self.t, self.G, self.H_sign, self.d2L_dalpha2


def q_coeff(lam_i: float, lam_j: float, lam_k: float) -> float:
    """Coefficient of exp((λi+λj+λk)t) in H for three distinct branches.

    Equal to 2Σλ³ + 12λiλjλk - 3(λiλj² + λi²λj + λi²λk + λiλk² + λjλk² + λj²λk), evaluated
    in the factored form, which only involves differences and so does not cancel.
    """
    return (
        (2 * lam_i - lam_j - lam_k)
        * (2 * lam_j - lam_i - lam_k)
        * (2 * lam_k - lam_i - lam_j)
    )


def _require_spread(pl_map: PLMap):
    if pl_map.is_degenerate:
        raise DegenerateSpectrum(
            "F''F - F'^2 vanishes identically when all branches share one slope"
        )


def _g_from_quad(q: ScaledQuad) -> float:
    if q.spread <= 0.0:
        # one branch dominates beyond double precision: G -> -inf at both ends
        return -math.inf
    return 2.0 * q.log_f - q.f1 * q.f1 / q.spread


def g_char(pl_map: PLMap, t: float) -> float:
    _require_spread(pl_map)
    return _g_from_quad(f_derivs(pl_map, t))


def g_sign(pl_map: PLMap, t: float, zero_band: float = DEFAULT_ZERO_BAND) -> int:
    """Sign of G, with 0 inside the band |G| <= zero_band * (1 + |2 log F|)."""
    _require_spread(pl_map)
    q = f_derivs(pl_map, t)
    g = _g_from_quad(q)
    if abs(g) <= zero_band * (1.0 + abs(2.0 * q.log_f)):
        return 0
    return 1 if g > 0 else -1


def h_expsum(pl_map: PLMap) -> ExpSum:
    lam = pl_map.log_slopes
    n = len(lam)
    if n == 1:
        raise SingleBranch("H vanishes identically for a single-branch map")

    terms: List[Tuple[float, float]] = []
    for i, j in combinations(range(n), 2):
        cube = (lam[j] - lam[i]) ** 3
        # fsum rounds the exact sum once, so equal multisets of λ give identical bases
        terms.append((math.fsum((lam[i], lam[i], lam[j])), cube))
        terms.append((math.fsum((lam[i], lam[j], lam[j])), -cube))
    for i, j, k in combinations(range(n), 3):
        terms.append((math.fsum((lam[i], lam[j], lam[k])), q_coeff(lam[i], lam[j], lam[k])))

    h = normalize(terms)
    logger.debug(f"H has {h.num_terms} terms after merging ({len(terms)} raw)")
    return h


def h_direct(pl_map: PLMap, t: float) -> Tuple[int, float]:
    """(sign, log|H(t)|) from the centred third moment; log-magnitude is -inf at a zero."""
    if pl_map.is_degenerate:
        return 0, -math.inf
    q = f_derivs(pl_map, t)
    if q.skew == 0.0:
        return 0, -math.inf
    return (1 if q.skew > 0 else -1), 3.0 * q.shift + math.log(abs(q.skew))


def g_bar(pl_map: PLMap, t: float) -> float:
    """2 log F (F''F - F'^2) - F'^2; saturates to ±inf rather than overflowing."""
    q = f_derivs(pl_map, t)
    inner = 2.0 * q.log_f * q.spread - q.f1 * q.f1
    if inner == 0.0:
        return 0.0
    log_mag = 2.0 * q.shift + math.log(abs(inner))
    magnitude = math.exp(log_mag) if log_mag < _EXP_LIMIT else math.inf
    return math.copysign(magnitude, inner)


def second_deriv_l(pl_map: PLMap, t: float) -> float:
    """d²L/dα² = (F/F')³ G(t)."""
    _require_spread(pl_map)
    q = f_derivs(pl_map, t)
    return (q.f0 / q.f1) ** 3 * _g_from_quad(q)


def sample_characteristic(pl_map: PLMap, t_values: Iterable[float]) -> List[CharSample]:
    _require_spread(pl_map)
    samples = []
    for t in t_values:
        t = float(t)
        q = f_derivs(pl_map, t)
        g = _g_from_quad(q)
        h_sign = 0 if q.skew == 0.0 else (1 if q.skew > 0 else -1)
        samples.append(CharSample(t=t, G=g, H_sign=h_sign, d2L_dalpha2=(q.f0 / q.f1) ** 3 * g))
    return samples
