import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import shapes_model  # noqa: E402


@pytest.fixture
def shapes():
    return shapes_model()


_criteria: dict[str, list[str]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        key = report.nodeid.split("::test_criterion_")[1].split("[")[0]
        _criteria.setdefault(key, []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria, key=lambda k: int(k.split("_")[0])):
        outcomes = _criteria[key]
        status = "PASS" if all(o == "passed" for o in outcomes) else "FAIL"
        num, _, label = key.partition("_")
        n = len(outcomes)
        terminalreporter.write_line(
            f"{status}  criterion {num}: {label.replace('_', ' ')}"
            + (f" ({n} cases)" if n > 1 else "")
        )
