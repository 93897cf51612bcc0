import functools

import pytest

from reslimit.model import SamplingGrid
from reslimit.multipole import build_basis

GRID = SamplingGrid(100.0, 2.0)

_criteria = []


@functools.lru_cache(maxsize=None)
def basis(s, radius=100.0, spacing=2.0):
    return build_basis(SamplingGrid(radius, spacing), s)


@pytest.fixture
def criterion():
    """Record a one-line acceptance verdict; printed in the terminal summary."""

    def record(number, title, passed, detail=""):
        line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        _criteria.append((number, line))
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_criteria, key=lambda item: item[0]):
        terminalreporter.write_line(line)
