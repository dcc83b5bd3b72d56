import os

import pytest

# criterion number -> list of check lines, filled by test_acceptance.py
ACCEPTANCE_LINES: dict[int, list[str]] = {}
ACCEPTANCE_VERDICT: dict[int, bool] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "full: criteria of the full verification level")


def pytest_collection_modifyitems(config, items):
    if os.environ.get("CRITABS_SKIP_FULL") != "1":
        return
    skip = pytest.mark.skip(reason="CRITABS_SKIP_FULL=1")
    for item in items:
        if "full" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_VERDICT:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_VERDICT):
        flag = "PASS" if ACCEPTANCE_VERDICT[number] else "FAIL"
        tr.write_line(f"criterion {number}: {flag}")
        for line in ACCEPTANCE_LINES[number]:
            tr.write_line(f"    {line}")
