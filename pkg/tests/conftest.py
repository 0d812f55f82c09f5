import numpy as np
import pytest

from revprandtl import profiles, prandtl


@pytest.fixture(scope="session")
def reversed_profile():
    return profiles.solve_fs(-0.1, "reversed")


@pytest.fixture(scope="session")
def bg(reversed_profile):
    return profiles.background(reversed_profile)


@pytest.fixture(scope="session")
def boundary_data(bg):
    return profiles.default_boundary_data(bg)


@pytest.fixture(scope="session")
def state(reversed_profile, bg, boundary_data):
    return prandtl.iterate(boundary_data, reversed_profile, 1e-3, 0.2, bg=bg)


@pytest.fixture
def rng():
    return np.random.default_rng(42)
