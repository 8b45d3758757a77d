import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import TWO_PEAK  # noqa: E402

from cubic_contest.priors import ShiftedBetaMixture  # noqa: E402


@pytest.fixture(scope="session")
def two_peak():
    return ShiftedBetaMixture(TWO_PEAK["alpha"], TWO_PEAK["beta"], TWO_PEAK["components"])


def pytest_terminal_summary(terminalreporter):
    from verdicts import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
