import sys

import numpy as np
import pytest

from skewlat import diagonal_lattice, e8_lattice, integer_lattice, E8_DIAGONAL


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def e8():
    return e8_lattice()


@pytest.fixture(scope="session")
def e8_orth():
    return diagonal_lattice(E8_DIAGONAL)


@pytest.fixture(scope="session")
def z1():
    return integer_lattice(1)


@pytest.fixture(scope="session")
def z2():
    return integer_lattice(2)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
