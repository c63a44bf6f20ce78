import sys

import numpy as np
import pytest

from qpainleve.sampling import draw_hg_params, draw_onshell


@pytest.fixture
def g():
    return np.random.default_rng(20240611)


@pytest.fixture
def onshell2(g):
    return draw_onshell(g, 2)


@pytest.fixture
def onshell3(g):
    return draw_onshell(g, 3)


@pytest.fixture
def hg_params2(g):
    return draw_hg_params(g, 2)


@pytest.fixture
def hg_params3(g):
    return draw_hg_params(g, 3)


def pytest_terminal_summary(terminalreporter):
    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    lines = getattr(mod, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
