"""Echo the acceptance-criterion verdict lines after the run.

Regular output capture swallows per-test prints; the one-line PASS/FAIL
verdicts from tests/test_acceptance.py are repeated here so they always
appear in the terminal summary.
"""

import sys


def pytest_terminal_summary(terminalreporter):
    for name in ("tests.test_acceptance", "test_acceptance"):
        module = sys.modules.get(name)
        if module is not None:
            break
    else:
        return
    lines = getattr(module, "CRITERION_LINES", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
