import numpy as np
import pytest

from flatdisc.discmap import alpha_map, lift_map
from flatdisc.paper_example import paper_quad
from flatdisc.scheme import build_generic_stepper, build_lifted_stepper, discretize_linear

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def quad():
    return paper_quad()


@pytest.fixture(scope="session")
def lind(quad):
    return discretize_linear(alpha_map(0.0, 5), quad.linear, 0.05)


@pytest.fixture(scope="session")
def lifted(quad, lind):
    return build_lifted_stepper(quad.phi, lind)


@pytest.fixture(scope="session")
def lifted_map(quad):
    return lift_map(alpha_map(0.0, 5), quad.phi)


@pytest.fixture(scope="session")
def generic(quad, lifted_map):
    return build_generic_stepper(lifted_map, quad.extended, 0.05)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
