"""Shared pytest plumbing: one summary line per acceptance criterion."""

import re

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    outcomes = {}
    for status, label in (
        ("passed", "PASS"),
        ("skipped", "SKIP"),
        ("failed", "FAIL"),
        ("error", "FAIL"),
    ):
        for rep in terminalreporter.stats.get(status, []):
            match = _CRITERION.search(getattr(rep, "nodeid", ""))
            if match is None:
                continue
            if status == "passed" and getattr(rep, "when", "call") != "call":
                continue
            number = int(match.group(1))
            if outcomes.get(number, ("", ""))[1] != "FAIL":
                outcomes[number] = (match.group(2), label)
    if not outcomes:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for number in sorted(outcomes):
        name, label = outcomes[number]
        terminalreporter.write_line(f"criterion {number:2d} ({name.replace('_', ' ')}): {label}")
