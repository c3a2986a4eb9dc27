from importlib import resources
from pathlib import Path

import pytest


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("dpcg") / "fixtures" / f"{name}.json"))


@pytest.fixture
def fixtures():
    return fixture_path


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion, taken from the test outcomes."""
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call":
                continue
            props = dict(rep.user_properties)
            if "criterion" in props:
                lines.append((props["criterion"], outcome, props.get("detail", "")))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for num, outcome, detail in sorted(lines, key=lambda t: int(t[0])):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {num:>2}: {verdict}  {detail}")
