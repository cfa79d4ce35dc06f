import pytest

from csdsm.bench import OPERATING_POINT_NOISE
from csdsm.config import ModulatorConfig, validate_config

FS = 1.024e6


@pytest.fixture
def cfg():
    return validate_config(ModulatorConfig())


@pytest.fixture
def op_noise():
    return OPERATING_POINT_NOISE


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
