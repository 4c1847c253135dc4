import random

import pytest

from symplectic.model_core import make_cp2, make_ruled, make_s2xs2
from utils.model_io import enriques_like


@pytest.fixture
def cp2():
    return make_cp2(1)


@pytest.fixture
def s2xs2_equal():
    return make_s2xs2(1, 1)


@pytest.fixture
def s2xs2_1_2():
    return make_s2xs2(1, 2)


@pytest.fixture
def ruled_1_3_2():
    return make_ruled(1, 3, 2)


@pytest.fixture
def enriques():
    return enriques_like()


@pytest.fixture
def rng():
    return random.Random(20240611)
