import pytest
from hypothesis import HealthCheck, settings

from invseries.corpus import builtin_problem
from invseries.numerics import Context

settings.register_profile(
    "pkg", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("pkg")


@pytest.fixture(scope="session")
def ctx60():
    return Context(60)


@pytest.fixture(scope="session")
def ctx200():
    return Context(200)


@pytest.fixture(scope="session")
def ctx1000():
    return Context(1000)


@pytest.fixture(scope="session")
def two_var(ctx1000):
    return builtin_problem("incas-2var", ctx1000)


@pytest.fixture(scope="session")
def three_var(ctx1000):
    return builtin_problem("incas-3var", ctx1000)


@pytest.fixture(scope="session")
def scalar_square(ctx1000):
    return builtin_problem("scalar-square", ctx1000)


@pytest.fixture(scope="session")
def affine_3(ctx1000):
    return builtin_problem("affine-3", ctx1000)
