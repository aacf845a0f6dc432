import random

import pytest

from gf2ecc.ecpm import bundled_curve
from gf2ecc.gf2m_core import B163_POLY, FieldContext

# m -> a small irreducible modulus
SMALL_MODULI = {1: 0b11, 2: 0b111, 3: 0b1011, 4: 0b10011, 5: 0b100101, 6: 0b1000011, 7: 0b10000011, 8: 0x11B}


@pytest.fixture(scope="session")
def b163():
    return bundled_curve("b163")


@pytest.fixture(scope="session")
def toy5():
    return bundled_curve("toy5")


@pytest.fixture
def rng():
    return random.Random(0x5EED)


def field(m):
    return FieldContext(m, B163_POLY if m == 163 else SMALL_MODULI[m])


# acceptance criteria report their own verdict lines; collect and show them at the end
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
