import random

import pytest

from authlab.crypto import gen_group_params


@pytest.fixture(scope="session")
def tiny():
    return gen_group_params("test-tiny")


@pytest.fixture(scope="session")
def p512():
    return gen_group_params("test-512")


@pytest.fixture
def rng():
    return random.Random(1234)
