import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from latdec.lattice import catalog_load

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

VR_NAMES = ["A2", "A3", "D4"]
ROOT_NAMES = ["A2", "A3", "D4", "E6", "E8"]


@pytest.fixture(params=["Z2", "Z3", "A2", "A2-alt", "A3", "D4", "D4-root", "E6", "E8"])
def any_lattice(request):
    return catalog_load(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# criterion number -> "PASS ..." / "FAIL ..." line, filled by test_acceptance
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: (int(str(k).rstrip("abcdefgh")), str(k))):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
