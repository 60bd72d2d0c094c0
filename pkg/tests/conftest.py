import numpy as np
import pytest

from isackld import OptimizerOptions, ScenarioParams


@pytest.fixture
def default_params():
    return ScenarioParams()


@pytest.fixture
def quick_opts():
    """Cheap optimizer settings for tests that only need a valid output."""
    return OptimizerOptions(restarts=2, max_iters=400, seed=0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
