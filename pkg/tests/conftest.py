import pytest

from oslx.verify import CalibrationRun


ACCEPTANCE_LINES: list = []


@pytest.fixture(scope="session")
def default_run():
    """One shared calibration pass; acceptance criteria reuse its caches."""
    run = CalibrationRun("default")
    result = run.run()
    return run, result


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
