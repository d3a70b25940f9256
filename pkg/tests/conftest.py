import math

import numpy as np
import pytest

from lyapspec.app import examples
from lyapspec.app.plmap import PLMap, new_map
from lyapspec.core.config import Settings

# random maps: n in {2..6}, λ log-uniform on (0.05, 10)
LAMBDA_LO, LAMBDA_HI = 0.05, 10.0


def random_map(rng: np.random.Generator, n_min: int = 2, n_max: int = 6) -> PLMap:
    n = int(rng.integers(n_min, n_max + 1))
    lambdas = np.exp(rng.uniform(math.log(LAMBDA_LO), math.log(LAMBDA_HI), size=n))
    return new_map(log_slopes=lambdas.tolist())


@pytest.fixture
def t_minus() -> PLMap:
    return examples.T_MINUS.map


@pytest.fixture
def t_plus() -> PLMap:
    return examples.T_PLUS.map


@pytest.fixture
def t_minus_star() -> PLMap:
    return examples.T_MINUS_STAR.map


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def settings(tmp_path) -> Settings:
    return Settings(out_dir=str(tmp_path / "out"))
