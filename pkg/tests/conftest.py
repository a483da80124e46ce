import numpy as np
import pytest

from edrlab.linalg import pure_state
from edrlab.models import KET_PLUS_I, cnot_model


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def cnot():
    return cnot_model()


@pytest.fixture
def plus_i():
    return pure_state(KET_PLUS_I)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if not test_acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n, ok, detail in sorted(test_acceptance.RESULTS):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n:2d}: {detail}")
