import numpy as np
import pytest

from whlab.gridfn import Grid, SampledFunction
from whlab.profiles import bump, gaussian
from whlab.spaces import (SpaceSpec, constant_weight, dyadic_zigzag_weight,
                          exponential_weight)


@pytest.fixture(scope="session")
def line_grid():
    """Grid covering [-20, 20] for whole-line transforms."""
    return Grid.from_span(-20.0, 40.0, 0.01)


@pytest.fixture(scope="session")
def half_grid():
    """Half-line working grid [0, 40]."""
    return Grid.from_span(0.0, 40.0, 0.01)


@pytest.fixture(scope="session")
def gaussian_kernel():
    g = Grid.from_span(-8.0, 16.0, 0.01)
    return SampledFunction(g, gaussian(g.points, 0.0, 1.0).astype(complex))


@pytest.fixture(scope="session")
def bump_kernel():
    g = Grid.from_span(-4.0, 8.0, 0.01)
    return SampledFunction(g, bump(g.points, 1.0, 0.8).astype(complex))


@pytest.fixture(scope="session")
def l2_flat():
    return SpaceSpec("lp", 2.0, constant_weight())


@pytest.fixture(scope="session")
def l2_exp():
    return SpaceSpec("lp", 2.0, exponential_weight(1.0))


@pytest.fixture(scope="session")
def l2_zigzag():
    return SpaceSpec("lp", 2.0, dyadic_zigzag_weight(1.0))
