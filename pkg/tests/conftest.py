import pytest

from dunham.potential import parse_potential
from dunham.wkb_series import gen_terms


@pytest.fixture(scope="session")
def series15():
    return gen_terms(15)


@pytest.fixture(scope="session")
def ho():
    return parse_potential("x^2")


@pytest.fixture(scope="session")
def quartic():
    return parse_potential("x^4")


@pytest.fixture(scope="session")
def mixed():
    return parse_potential("x^2 + x^4")
