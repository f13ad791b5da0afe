import numpy as np
import pytest

import kontact as kt


@pytest.fixture(scope="session")
def pair3():
    return kt.standard_pair(3)


@pytest.fixture(scope="session")
def pair5():
    return kt.standard_pair(5)


@pytest.fixture(scope="session")
def angle3(pair3):
    return pair3.angle_function()


@pytest.fixture(scope="session")
def angle5(pair5):
    return pair5.angle_function()


@pytest.fixture(scope="session")
def pts3(angle3):
    return kt.sample_points(60, 42, 4,
                            exclusion=lambda p: abs(angle3.value(p)) > 0.9)


@pytest.fixture(scope="session")
def pts5(angle5):
    return kt.sample_points(40, 42, 6,
                            exclusion=lambda p: abs(angle5.value(p)) > 0.9)


@pytest.fixture(scope="session")
def pts3_plain():
    return kt.sample_points(40, 7, 4)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
