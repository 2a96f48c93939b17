import pytest

from qsicsim import (
    StateDistribution,
    peres_mermin,
    pm_eigenstates,
    yu_oh,
)


@pytest.fixture(scope="session")
def pm():
    return peres_mermin()


@pytest.fixture(scope="session")
def pm_init():
    return StateDistribution.uniform(pm_eigenstates())


@pytest.fixture(scope="session")
def yo():
    return yu_oh()


@pytest.fixture(scope="session")
def yo_init(yo):
    return StateDistribution.uniform([m.target for m in yo.measurements])
