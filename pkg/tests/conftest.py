import numpy as np
import pytest


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260808)


@pytest.fixture(scope="session")
def zeros_to_110():
    from zetascope.zeta_engine import zero_ordinates

    return zero_ordinates(110.0)


@pytest.fixture(scope="session")
def zeros_to_1060():
    from zetascope.zeta_engine import zero_ordinates

    return zero_ordinates(1060.0)
