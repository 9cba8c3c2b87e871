import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def warm_kernels():
    """Compile the numba loop once so timed checks measure run time, not compilation."""
    from ptctl import SimConfig, linear_controller, simulate, synthesize

    ctrl = synthesize(linear_controller([1.0]), 1.0, 1.0, 0.0)
    simulate(ctrl, [1.0], cfg=SimConfig(h=1e-3, horizon=0.01, record_stride=1))
    return True


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
