import pytest

from src.arith.exact import ProjPoint
from src.geometry.fibration import STANDARD_FORMS, RulingPair, default_rulings
from src.geometry.surface import make_surface

SEED = ProjPoint((133, 134, 158, 59))
ONES = ProjPoint((1, 1, 1, 1))
ON_ONE_LINE = ProjPoint((1, 2, 1, 2))


@pytest.fixture(scope="session")
def v0():
    return make_surface(1, 1, -1, -1)


@pytest.fixture(scope="session")
def r0(v0):
    return RulingPair.from_forms(v0, *STANDARD_FORMS)


@pytest.fixture(scope="session")
def v1863():
    return make_surface(1, 8, -3, -6)


@pytest.fixture(scope="session")
def r1863(v1863):
    return default_rulings(v1863, ONES)
