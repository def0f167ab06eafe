import pytest

from helpers import cfg_for, load_fixture


@pytest.fixture
def h1():
    return load_fixture("h1")


@pytest.fixture
def h2():
    return load_fixture("h2")


@pytest.fixture
def latency_fixture():
    return load_fixture("latency")


@pytest.fixture
def two_windows():
    return cfg_for(2)
