"""Worked example maps with their published inflection values (four decimals)."""

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from .plmap import PLMap, new_map


@dataclass(frozen=True)
class ExampleMap:
    name: str
    map: PLMap
    t_values: Tuple[float, ...]
    alpha_values: Tuple[float, ...]
    t_tol: float = 5e-4
    alpha_tol: float = 5e-4
    alpha_relative: bool = False
    negative_param_pattern: Optional[bool] = None


@dataclass(frozen=True)
class CoincidenceExample:
    name: str
    x1: float
    x3: float
    bracket: Tuple[float, float]
    x_star: float
    t_values: Tuple[float, ...]
    alpha_values: Tuple[float, ...]
    x_tol: float = 1e-3
    coincide_tol: float = 1e-6
    extra: Dict[str, float] = field(default_factory=dict)

    @property
    def lam1(self) -> float:
        return math.log(self.x1)

    @property
    def lam3(self) -> float:
        return math.log(self.x3)


T_MINUS = ExampleMap(
    name="T-minus",
    map=new_map(slopes=[1.2, 19, 20], label="T-minus"),
    t_values=(-0.3378, -0.1706),
    alpha_values=(1.4038, 1.7272),
)

T_PLUS = ExampleMap(
    name="T-plus",
    map=new_map(slopes=[3, 4, 80], label="T-plus"),
    t_values=(0.0881, 0.3289),
    alpha_values=(2.4910, 3.0781),
)

# the fourth slope is e^100, so it is given as a log-slope
T_MINUS_STAR = ExampleMap(
    name="T-minus-star",
    map=new_map(log_slopes=[math.log(1.2), math.log(19), math.log(20), 100.0], label="T-minus-star"),
    t_values=(-0.3378, -0.1703, -0.1147, 0.0293),
    alpha_values=(1.4038, 1.7278, 1.8338, 85.7605),
    alpha_tol=1e-3,
    alpha_relative=True,
    negative_param_pattern=True,
)

COINCIDENCE = CoincidenceExample(
    name="coincidence",
    x1=1.2,
    x3=200.0,
    bracket=(29.542, 29.543),
    x_star=29.54276,
    t_values=(-0.4218, 0.1008),
    alpha_values=(1.2159, 3.3858),
)

CATALOGUE: Dict[str, ExampleMap] = {ex.name: ex for ex in (T_MINUS, T_PLUS, T_MINUS_STAR)}
