import pytest
from hypothesis import HealthCheck, settings

from lowterm.scenario import builtin_scenarios

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def library():
    """The built-in scenarios, parsed once per test session."""
    return builtin_scenarios()


_CRITERIA: dict = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if report.when == "call" and name.startswith("test_criterion_"):
        k = name[len("test_criterion_"):].split("_")[0]
        _CRITERIA[k] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA, key=int):
        status = "PASS" if _CRITERIA[k] == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {k}: {status}")
