import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

# (criterion number, title, verdict, detail) rows filled by test_acceptance.py
ACCEPTANCE_REPORT: list[tuple[int, str, str, str]] = []


@pytest.fixture(autouse=True)
def _no_ambient_cache(monkeypatch):
    monkeypatch.delenv("QHAL_CACHE_DIR", raising=False)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for n, title, verdict, detail in sorted(ACCEPTANCE_REPORT):
        terminalreporter.write_line(f"[{verdict}] {n:2d}. {title}: {detail}")
