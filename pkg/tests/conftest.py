import pytest

from lqrl.dynamics import EnvConfig
from lqrl.lyapunov import LyapunovParams
from lqrl.qpolicy import EncodingConfig
from lqrl.trainer import RewardWeights

# acceptance criteria record (number, description, passed, detail) here
CRITERIA: list[tuple[int, str, bool, str]] = []


@pytest.fixture
def env():
    return EnvConfig()


@pytest.fixture
def lyap():
    return LyapunovParams()


@pytest.fixture
def enc():
    return EncodingConfig()


@pytest.fixture
def weights():
    return RewardWeights()


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num, desc, ok, detail in sorted(CRITERIA):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {num:>2}: {desc} ({detail})")
