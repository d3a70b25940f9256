"""Exponential sums e(t) = sum_i c_i exp(b_i t) and certified real-root isolation.

Real roots are isolated completely by Rolle recursion: dividing by exp(b_1 t) keeps the
roots, and differentiating the quotient removes one term, so the critical points of each
level come from a sum with one term fewer. Between consecutive critical points the sum is
strictly monotone, and beyond the dominant-term thresholds its sign is certified, so every
root is found by bisecting a panel whose endpoint signs differ.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, List, NamedTuple, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp

from ..core.errors import EmptySum, TangentialAmbiguity, UsageError

logger = logging.getLogger("lyapspec.app.expsum")

DEFAULT_TOL = 1e-12
DEFAULT_VALUE_TOL = 1e-9
DEFAULT_MAX_ITER = 200
# beyond this exp() overflows binary64
_EXP_LIMIT = 709.78


class RootKind(Enum):
    TRANSVERSAL = "transversal"
    TANGENTIAL = "tangential"


class SignedLog(NamedTuple):
    sign: int
    log_magnitude: float
    value: float


@dataclass(frozen=True)
class RootBracket:
    lo: float
    hi: float
    refined_root: float
    kind: RootKind
    achieved_width: float
    # value and sign_lo refer to the reduced, unit-scaled sum (same signs as the input)
    value: float = 0.0
    sign_lo: int = 0

    def to_dict(self):
        return {
            "lo": self.lo,
            "hi": self.hi,
            "refined_root": self.refined_root,
            "kind": self.kind.value,
            "achieved_width": self.achieved_width,
            "value": self.value,
            "sign_lo": self.sign_lo,
        }


@dataclass(frozen=True)
class ExpSum:
    """Canonical exponential sum: bases strictly increasing, no zero coefficients."""

    bases: Tuple[float, ...] = ()
    coeffs: Tuple[float, ...] = ()
    _b: np.ndarray = field(init=False, repr=False, compare=False)
    _c: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.bases) != len(self.coeffs):
            raise UsageError("bases and coeffs must have equal length")
        object.__setattr__(self, "_b", np.asarray(self.bases, dtype=float))
        object.__setattr__(self, "_c", np.asarray(self.coeffs, dtype=float))

    @property
    def num_terms(self) -> int:
        return len(self.bases)

    @property
    def terms(self) -> List[Tuple[float, float]]:
        return list(zip(self.bases, self.coeffs))

    @property
    def is_zero(self) -> bool:
        return not self.bases

    def __call__(self, t: float) -> float:
        return evaluate(self, t).value

    def to_csv_rows(self) -> List[Tuple[float, float]]:
        return self.terms


def normalize(raw_terms: Iterable[Tuple[float, float]], base_merge_tol: float = 0.0) -> ExpSum:
    """Sorts terms, merges bases within base_merge_tol and drops zero coefficients."""
    if base_merge_tol < 0:
        raise UsageError("base_merge_tol must be >= 0")

    ordered = sorted((float(b), float(c)) for b, c in raw_terms)
    groups: List[Tuple[float, List[float]]] = []
    for b, c in ordered:
        if groups and b - groups[-1][0] <= base_merge_tol:
            groups[-1][1].append(c)
        else:
            groups.append((b, [c]))

    bases: List[float] = []
    coeffs: List[float] = []
    for b, cs in groups:
        total = math.fsum(cs)
        if total != 0.0:
            bases.append(b)
            coeffs.append(total)
    return ExpSum(tuple(bases), tuple(coeffs))


def evaluate(s: ExpSum, t: float) -> SignedLog:
    """Evaluates with the max-exponent shift; the plain value is only inf on true overflow."""
    if s.is_zero:
        return SignedLog(0, -math.inf, 0.0)
    x = s._b * t
    m = float(x.max())
    total = math.fsum(s._c * np.exp(x - m))
    if total == 0.0:
        return SignedLog(0, -math.inf, 0.0)
    sign = 1 if total > 0 else -1
    log_mag = m + math.log(abs(total))
    value = sign * math.exp(log_mag) if log_mag < _EXP_LIMIT else sign * math.inf
    return SignedLog(sign, log_mag, value)


def evaluate_signs(s: ExpSum, ts: Sequence[float]) -> np.ndarray:
    """Vectorised signs of s over many points (used for grid scans)."""
    ts = np.asarray(ts, dtype=float)
    if s.is_zero:
        return np.zeros_like(ts, dtype=int)
    x = np.multiply.outer(ts, s._b)
    x -= x.max(axis=1, keepdims=True)
    return np.sign(np.exp(x) @ s._c).astype(int)


def log_term_scale(s: ExpSum, t: float) -> float:
    """log of sum_i |c_i| exp(b_i t), the magnitude against which cancellation is judged."""
    if s.is_zero:
        return -math.inf
    return float(logsumexp(s._b * t, b=np.abs(s._c)))


def derivative(s: ExpSum) -> ExpSum:
    return normalize((b, c * b) for b, c in s.terms)


def reduce(s: ExpSum) -> ExpSum:
    """Divides by exp(b_1 t): the first base becomes 0 and the root set is unchanged."""
    if s.is_zero:
        raise EmptySum("Cannot reduce an empty exponential sum")
    b1 = s.bases[0]
    return ExpSum(tuple(b - b1 for b in s.bases), s.coeffs)


def scale(s: ExpSum, k: float) -> ExpSum:
    if k == 0:
        return ExpSum()
    return ExpSum(s.bases, tuple(k * c for c in s.coeffs))


def shift(s: ExpSum, a: float) -> ExpSum:
    """Returns the sum t -> s(t + a)."""
    return normalize((b, c * math.exp(b * a)) for b, c in s.terms)


def _unit_scaled(s: ExpSum) -> ExpSum:
    """Brings the largest |coefficient| into [0.5, 1) by a power of two, which is exact."""
    _, exponent = math.frexp(max(abs(c) for c in s.coeffs))
    return ExpSum(s.bases, tuple(math.ldexp(c, -exponent) for c in s.coeffs))


def tail_thresholds(s: ExpSum) -> Tuple[float, float]:
    """(t_lo, t_hi) such that the smallest-base term dominates for t < t_lo and the
    largest-base term dominates for t > t_hi."""
    if s.is_zero:
        raise EmptySum("Tail thresholds of an empty sum are undefined")
    d = s.num_terms
    if d == 1:
        return 0.0, 0.0

    b, c = s.bases, s.coeffs
    t_hi = max(math.log((d - 1) * abs(c[i]) / abs(c[-1])) / (b[-1] - b[i]) for i in range(d - 1))
    t_lo = min(math.log((d - 1) * abs(c[i]) / abs(c[0])) / (b[0] - b[i]) for i in range(1, d))
    return t_lo, t_hi


def bisect_sign_change(
        sign_at: Callable[[float], int],
        lo: float,
        hi: float,
        sign_lo: int,
        tol: float = DEFAULT_TOL,
        max_iter: int = DEFAULT_MAX_ITER
) -> Tuple[float, float, float]:
    """Shrinks [lo, hi] around a sign change to width tol; returns (lo, hi, root)."""
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            # adjacent floats
            break
        sign_mid = sign_at(mid)
        if sign_mid == 0:
            return lo, hi, mid
        if sign_mid == sign_lo:
            lo = mid
        else:
            hi = mid
    else:
        if hi - lo > tol:
            logger.warning(f"Bisection hit {max_iter} iterations with width {hi - lo:.3g} > {tol:.3g}")
    return lo, hi, 0.5 * (lo + hi)


def isolate_roots(
        s: ExpSum,
        tol: float = DEFAULT_TOL,
        value_tol: float = DEFAULT_VALUE_TOL,
        max_iter: int = DEFAULT_MAX_ITER,
        raise_on_tangential: bool = False
) -> List[RootBracket]:
    """Complete, certified isolation of the real roots of s, sorted by location."""
    if tol <= 0:
        raise UsageError("tol must be positive")

    brackets = _isolate(s, tol, value_tol, max_iter)

    if len(brackets) > max(s.num_terms - 1, 0):
        raise AssertionError(
            f"{len(brackets)} roots found for a {s.num_terms}-term exponential sum"
        )
    if raise_on_tangential:
        for bracket in brackets:
            if bracket.kind is RootKind.TANGENTIAL:
                raise TangentialAmbiguity(bracket.refined_root, bracket.value)
    return brackets


def _isolate(s: ExpSum, tol: float, value_tol: float, max_iter: int) -> List[RootBracket]:
    if s.num_terms <= 1:
        return []

    r = _unit_scaled(reduce(s))
    r_prime = derivative(r)
    critical = [] if r_prime.is_zero else _isolate(_unit_scaled(r_prime), tol, value_tol, max_iter)

    t_lo, t_hi = tail_thresholds(r)
    left = min(t_lo, t_hi) - 1.0
    right = max(t_lo, t_hi) + 1.0

    inner = [bracket for bracket in critical if left < bracket.refined_root < right]
    points = [left] + [bracket.refined_root for bracket in inner] + [right]

    log_band = math.log(value_tol) if value_tol > 0 else -math.inf
    signs: List[int] = []
    found: List[RootBracket] = []

    for idx, p in enumerate(points):
        at_p = evaluate(r, p)
        interior = 0 < idx < len(points) - 1
        if interior and (at_p.sign == 0 or at_p.log_magnitude <= log_band + log_term_scale(r, p)):
            signs.append(0)
        else:
            signs.append(at_p.sign)

    # roots sitting on a critical point: tangential unless the neighbours disagree
    for idx in range(1, len(points) - 1):
        if signs[idx] != 0:
            continue
        crit = inner[idx - 1]
        crossing = signs[idx - 1] * signs[idx + 1] < 0
        kind = RootKind.TRANSVERSAL if crossing else RootKind.TANGENTIAL
        if not crossing:
            logger.debug(f"Tangential root candidate at t={points[idx]!r}")
        found.append(RootBracket(
            lo=crit.lo, hi=crit.hi, refined_root=points[idx], kind=kind,
            achieved_width=crit.hi - crit.lo, value=evaluate(r, points[idx]).value,
            sign_lo=signs[idx - 1] if crossing else 0,
        ))

    def sign_at(t: float) -> int:
        return evaluate(r, t).sign

    for k in range(len(points) - 1):
        if signs[k] * signs[k + 1] < 0:
            lo, hi, root = bisect_sign_change(sign_at, points[k], points[k + 1], signs[k], tol, max_iter)
            found.append(RootBracket(
                lo=lo, hi=hi, refined_root=root, kind=RootKind.TRANSVERSAL,
                achieved_width=hi - lo, value=evaluate(r, root).value, sign_lo=signs[k],
            ))

    found.sort(key=lambda bracket: bracket.refined_root)
    return found


def root_count_bound(s: ExpSum) -> int:
    return max(s.num_terms - 1, 0)


def sign_changes_on_grid(s: ExpSum, ts: Sequence[float]) -> int:
    """Number of strict sign changes of s over a grid; zeros are skipped."""
    signs = evaluate_signs(s, ts)
    signs = signs[signs != 0]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))
