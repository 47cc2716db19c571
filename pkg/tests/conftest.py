import numpy as np
import pytest

from permcycles import constant_model, giant_cycle_model, polylog_model
from permcycles.specialfn import zeta_real


@pytest.fixture
def const11():
    return constant_model(1.0, 1.0)


@pytest.fixture
def supercritical():
    return polylog_model(2.0, 0.5 / zeta_real(2.0), theta=1.0)


@pytest.fixture
def critical():
    return polylog_model(2.5, 1.0 / zeta_real(2.5), theta=1.0)


@pytest.fixture
def giant():
    return giant_cycle_model()


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


def reference_models():
    return {
        "constant": constant_model(1.0, 1.0),
        "supercritical": polylog_model(2.0, 0.5 / zeta_real(2.0), theta=1.0),
        "giant": giant_cycle_model(),
    }


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
