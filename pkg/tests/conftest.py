import pytest

import helpers
from densetp.minsky import run
from densetp.reduction import compile_machine, generate_witness


@pytest.fixture(scope="session")
def m1():
    return helpers.M1


@pytest.fixture(scope="session")
def m1_computation():
    return run(helpers.M1, 10)


@pytest.fixture(scope="session")
def m1_domain():
    return compile_machine(helpers.M1)


@pytest.fixture(scope="session")
def m1_witness(m1_computation):
    return generate_witness(helpers.M1, m1_computation)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
