import pytest

from hql.fixtures import fixture_paths, load_workspace


@pytest.fixture(scope="session")
def ws():
    return load_workspace()


@pytest.fixture(scope="session")
def fixture_files():
    return fixture_paths()
