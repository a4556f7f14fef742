import sys

import pytest

from lockdownsim.population import EconomyParams, Household, Worker, split_valid, synthesize_population
from lockdownsim.simulate import calibrate_population
from lockdownsim.wellbeing import SavingsUtilityParams, savings_alpha

ECON = EconomyParams()


@pytest.fixture(scope="session")
def econ():
    return ECON


@pytest.fixture(scope="session")
def small_pop():
    return synthesize_population(400, seed=11)


@pytest.fixture(scope="session")
def small_params(small_pop):
    valid, _ = split_valid(small_pop.households, ECON)
    return calibrate_population(valid, ECON)


@pytest.fixture(scope="session")
def median_params():
    # savings utility anchored at the published medians
    b = 0.638
    beta = ECON.eta / b
    return SavingsUtilityParams(3.710, b, savings_alpha(3989.0, 6092.0, ECON.eta, beta, ECON.rho), beta)


def make_household(hid="H1", incomes=(4000.0,), sectors=None, affected=True, documented=True,
                   size=1, savings=6000.0, rent=0.0, k_oth=0.0, tract="T1"):
    sectors = sectors or ["RET"] * len(incomes)
    workers = tuple(Worker(s, x, documented, affected) for s, x in zip(sectors, incomes))
    return Household(hid, tract, size, workers, k_oth=k_oth, rent=rent, savings0=savings)


def pytest_terminal_summary(terminalreporter):
    mod = next((m for name, m in list(sys.modules.items())
                if name.endswith("test_acceptance") and hasattr(m, "LINES")), None)
    if mod is None or not mod.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.LINES:
        terminalreporter.write_line(line)
