import pytest

from mazurtate.curves import curve_by_label
from mazurtate.theta import eigen_pair


@pytest.fixture(scope="session")
def c11():
    return curve_by_label("11a1")


@pytest.fixture(scope="session")
def c37():
    return curve_by_label("37a1")


@pytest.fixture(scope="session")
def c32():
    return curve_by_label("32a")


@pytest.fixture(scope="session")
def pair11(c11):
    return eigen_pair(c11)


@pytest.fixture(scope="session")
def pair37(c37):
    return eigen_pair(c37)
