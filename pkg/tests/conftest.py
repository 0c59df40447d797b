import numpy as np
import pytest

from warpgap import FlatProfile, WarpingParams, build_profile


@pytest.fixture(scope="session")
def prof21():
    return build_profile(WarpingParams(2, 0.1))


@pytest.fixture(scope="session")
def prof22():
    return build_profile(WarpingParams(2, 0.2))


@pytest.fixture(scope="session")
def prof31():
    return build_profile(WarpingParams(3, 0.1))


@pytest.fixture(scope="session")
def flat2():
    return FlatProfile(n=2)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
