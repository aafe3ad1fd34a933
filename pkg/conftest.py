import numpy as np
import pytest

from berkdyn.models.berkpoints import BerkPoint, gauss_point
from berkdyn.models.scalars import PadicConfig

P = 5


@pytest.fixture
def cfg():
    return PadicConfig(p=P, working_precision=64)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def infinity():
    return BerkPoint.infinity(P)


@pytest.fixture
def gauss():
    return gauss_point(P)


def zeta(center, logr, p=P):
    return BerkPoint.disk(center, logr, p)


def classical(center, p=P):
    return BerkPoint.classical(center, p)
