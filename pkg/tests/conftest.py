import os
from pathlib import Path

import pytest

from klooster.kloosterman import SumCache

ROOT = Path(__file__).resolve().parent.parent
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def sum_cache():
    """Shared on-disk cache for the long sweeps (warm after the first run)."""
    d = os.environ.get("KLOOSTER_CACHE_DIR")
    path = Path(d) / "sums.csv" if d else ROOT / ".cache" / "klooster" / "sums.csv"
    return SumCache(path)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
