import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mcsp import Instance  # noqa: E402


@pytest.fixture
def worked():
    return Instance("AGACTG", "ACTAGG")


@pytest.fixture
def aa():
    return Instance("AA", "AA")


@pytest.fixture
def single():
    return Instance("A", "A")


def pytest_terminal_summary(terminalreporter):
    results = sys.modules.get("test_acceptance")
    if results is None or not results.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results.RESULTS):
        terminalreporter.write_line(results.RESULTS[k])
