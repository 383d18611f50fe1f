import numpy as np
import pytest

from stepprop.potential import Family, StepModel


@pytest.fixture
def ws_unit():
    return StepModel(Family.WOODS_SAXON, m=1.0, V0=1.0, alpha=1.0, hbar=1.0)


@pytest.fixture
def ws_steep():
    return StepModel(Family.WOODS_SAXON, m=1.0, V0=1.0, alpha=5.0, hbar=1.0)


@pytest.fixture
def heaviside_unit():
    return StepModel(Family.HEAVISIDE, m=1.0, V0=1.0, alpha=1.0, hbar=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20250808)
