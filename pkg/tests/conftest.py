import numpy as np
import pytest

from folia import fuchsian

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def lattice():
    return fuchsian.genus2_octagon_representation()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def criterion():
    def record(number, name, measured, threshold, ok):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {name}: measured={measured} threshold={threshold}"
        ACCEPTANCE_LINES.append(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
