"""Shared fixtures: a session-wide scenario report cache and the
acceptance summary that prints one line per criterion at the end."""

import pytest

from gmhdlab import run_scenario


class ScenarioCache:
    """Each verification scenario runs once per session; every test that
    needs its report shares the same object."""

    def __init__(self):
        self._reports = {}

    def report(self, scenario_id):
        if scenario_id not in self._reports:
            self._reports[scenario_id] = run_scenario(scenario_id)
        return self._reports[scenario_id]


@pytest.fixture(scope="session")
def scenarios():
    return ScenarioCache()


_criterion_lines = []


@pytest.fixture(scope="session")
def record_criterion():
    def _record(num, label, ok):
        _criterion_lines.append((int(num), str(label), bool(ok)))

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _criterion_lines:
        return
    terminalreporter.section("acceptance criteria")
    for num, label, ok in sorted(set(_criterion_lines)):
        word = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {num:2d}: {word}  {label}")
