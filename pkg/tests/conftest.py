import numpy as np
import pytest

from privacy_lab import MarketParams

GRID_SEED = 20260809


def make_param_grid(n=1000, seed=GRID_SEED):
    """Random parameter grid: log-uniform sigma_v, sigma_u in [1e-3, 1e3],
    uniform sigma_eps in [0, 1e3]."""
    rng = np.random.default_rng(seed)
    sigma_v = 10.0 ** rng.uniform(-3, 3, n)
    sigma_u = 10.0 ** rng.uniform(-3, 3, n)
    sigma_eps = rng.uniform(0.0, 1e3, n)
    return [MarketParams(float(a), float(b), float(c)) for a, b, c in zip(sigma_v, sigma_u, sigma_eps)]


@pytest.fixture(scope="session")
def grid1000():
    return make_param_grid()
