import pytest

from annpair import build_family, build_level, get_default_bump


@pytest.fixture(scope="session")
def bump():
    return get_default_bump()


@pytest.fixture(scope="session")
def level3(bump):
    return build_level(3, bump=bump)


@pytest.fixture(scope="session")
def level4(bump):
    return build_level(4, bump=bump)


@pytest.fixture(scope="session")
def family(bump):
    return build_family(2, 5, bump=bump)
