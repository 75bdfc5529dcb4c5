import numpy as np
import pytest

from qsphere import QParam


@pytest.fixture
def p05():
    return QParam.from_q(0.5)


@pytest.fixture
def p09():
    return QParam.from_q(0.9)


@pytest.fixture
def p1():
    return QParam.from_q(1.0)


@pytest.fixture
def pexact():
    return QParam.exact("1/2")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
