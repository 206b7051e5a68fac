import pytest

from tauward.contour import ExteriorMap

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def ellipse():
    return ExteriorMap(1.0, 0.0, (0.3,))


@pytest.fixture(scope="session")
def generic_map():
    """Two-coefficient map with a translation and complex coefficient."""
    return ExteriorMap(1.0, 0.1, (0.2 + 0.1j, 0.05))


@pytest.fixture(scope="session")
def three_coeff_map():
    return ExteriorMap(1.0, 0.05, (0.2 + 0.1j, 0.05, 0.02 - 0.01j))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
