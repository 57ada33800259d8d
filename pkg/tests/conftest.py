import numpy as np
import pytest

from lattice_sampling import cli, variance

# One seed for every stochastic check in the suite, so results are frozen.
TEST_SEED = 101

# The default rate grid of the command line (601 points on [0.5, 2.05]).
DEFAULT_GRID = np.linspace(cli.DEFAULT_RATE_MIN, cli.DEFAULT_RATE_MAX, cli.DEFAULT_RATE_STEPS)


@pytest.fixture(scope="session")
def profile_factory():
    """Memoized radial profiles shared across test modules.

    Keyed by (sampling lattice name, directions, seed, tol); heavy profiles
    (the 10^5/10^6-direction ones) are built once per session.
    """
    memo = {}

    def get(name, n, seed=TEST_SEED, tol=1e-10):
        key = (name, n, seed, tol)
        if key not in memo:
            memo[key] = cli.profile_for(name, n, seed, tol)
        return memo[key]

    return get


@pytest.fixture(scope="session")
def default_curve(profile_factory):
    """Memoized sweeps over the default rate grid at N = 10^5."""
    memo = {}

    def get(name, n=10**5):
        key = (name, n)
        if key not in memo:
            memo[key] = variance.sweep(profile_factory(name, n), DEFAULT_GRID)
        return memo[key]

    return get
