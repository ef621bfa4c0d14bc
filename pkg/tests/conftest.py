import pytest

from mmimo_alloc import kernels
from mmimo_alloc.channel import SystemParams

AVAILABLE_BACKENDS = sorted(kernels.BACKENDS)

_acceptance_lines: list = []


def record_acceptance(line: str):
    _acceptance_lines.append(line)
    print(line)


@pytest.fixture
def params():
    return SystemParams()


@pytest.fixture(params=AVAILABLE_BACKENDS)
def backend(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
