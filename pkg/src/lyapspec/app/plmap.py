import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import EmptyInput, GeometryViolation, NonExpandingSlope, NonFinite, UsageError

logger = logging.getLogger("lyapspec.app.plmap")


class Milestone(NamedTuple):
    least_branch_index: int  # 1-based
    log_slope: float


@dataclass(frozen=True)
class PLMap:
    """A finitely-branched piecewise linear expanding map, stored by its log-slopes.

    Only the slopes matter for the spectrum, so the interval placement inside [0, 1]
    is not modelled. ``log_slopes`` is sorted non-decreasing and every entry is > 0.
    """

    log_slopes: Tuple[float, ...]
    label: str = ""
    strict_geometry: bool = False
    _array: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_array", np.asarray(self.log_slopes, dtype=float))

    @property
    def lambdas(self) -> np.ndarray:
        return self._array

    @property
    def branch_count(self) -> int:
        return len(self.log_slopes)

    @property
    def multiplicity_view(self) -> List[Tuple[float, int]]:
        """Distinct log-slopes in increasing order with their branch counts."""
        counts = Counter(self.log_slopes)
        return sorted(counts.items())

    @property
    def multiplicities(self) -> Tuple[int, ...]:
        return tuple(count for _, count in self.multiplicity_view)

    @property
    def essential_branch_number(self) -> int:
        return len(set(self.log_slopes))

    @property
    def is_degenerate(self) -> bool:
        return self.essential_branch_number == 1

    @property
    def inverse_slope_sum(self) -> float:
        """Sum of 1/x_i, the total length of the branch intervals."""
        return math.fsum(math.exp(-lam) for lam in self.log_slopes)

    @property
    def geometry_ok(self) -> bool:
        return self.inverse_slope_sum <= 1.0

    def milestones(self) -> List[Milestone]:
        result: List[Milestone] = []
        previous = None
        for index, lam in enumerate(self.log_slopes, start=1):
            if lam != previous:
                result.append(Milestone(index, lam))
                previous = lam
        return result

    def spectrum_domain(self) -> Tuple[float, float]:
        return self.log_slopes[0], self.log_slopes[-1]

    def with_branch(self, log_slope: float, label: Optional[str] = None) -> "PLMap":
        """Returns the map with one extra branch of the given log-slope."""
        return new_map(
            log_slopes=list(self.log_slopes) + [log_slope],
            strict_geometry=False,
            label=label if label is not None else self.label,
        )

    def slopes(self) -> List[float]:
        """Slopes x_i = exp(λ_i); entries overflow to inf for λ beyond ~709."""
        return [math.exp(lam) if lam < 709.0 else math.inf for lam in self.log_slopes]

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"log_slopes": list(self.log_slopes)}
        if self.label:
            data["label"] = self.label
        if self.strict_geometry:
            data["strict_geometry"] = True
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PLMap":
        has_slopes = "slopes" in data
        has_logs = "log_slopes" in data
        if has_slopes == has_logs:
            raise UsageError("Map description needs exactly one of 'slopes' or 'log_slopes'")
        return new_map(
            slopes=data.get("slopes"),
            log_slopes=data.get("log_slopes"),
            strict_geometry=bool(data.get("strict_geometry", False)),
            label=str(data.get("label", "")),
        )


def new_map(
        slopes: Optional[Sequence[float]] = None,
        log_slopes: Optional[Sequence[float]] = None,
        strict_geometry: bool = False,
        label: str = ""
) -> PLMap:
    """Validates slopes (x_i > 1) or log-slopes (λ_i > 0) and builds a sorted PLMap."""
    if (slopes is None) == (log_slopes is None):
        raise UsageError("Provide exactly one of slopes or log_slopes")

    values = list(slopes if slopes is not None else log_slopes)
    if not values:
        raise EmptyInput("A map needs at least one branch")

    try:
        values = [float(v) for v in values]
    except (TypeError, ValueError) as e:
        raise NonFinite(f"Branch values must be real numbers: {e}") from e

    for v in values:
        if not math.isfinite(v):
            raise NonFinite(f"Non-finite branch value: {v!r}")

    if slopes is not None:
        for v in values:
            if v <= 1.0:
                raise NonExpandingSlope(f"Slope {v!r} is not expanding (must be > 1)")
        lambdas = [math.log(v) for v in values]
    else:
        for v in values:
            if v <= 0.0:
                raise NonExpandingSlope(f"Log-slope {v!r} is not expanding (must be > 0)")
        lambdas = values

    pl_map = PLMap(tuple(sorted(lambdas)), label=label, strict_geometry=strict_geometry)

    if not pl_map.geometry_ok:
        message = (
            f"Sum of inverse slopes is {pl_map.inverse_slope_sum:.6g} > 1: "
            "branches cannot be placed as disjoint subintervals of [0, 1]"
        )
        if strict_geometry:
            raise GeometryViolation(message)
        logger.warning(message)

    return pl_map


def milestones(pl_map: PLMap) -> List[Milestone]:
    return pl_map.milestones()


def essential_branch_number(pl_map: PLMap) -> int:
    return pl_map.essential_branch_number


def spectrum_domain(pl_map: PLMap) -> Tuple[float, float]:
    return pl_map.spectrum_domain()
