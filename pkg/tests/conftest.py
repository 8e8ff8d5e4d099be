"""Shared pytest hooks: summarize acceptance-criteria outcomes."""

_acceptance = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _acceptance[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for nodeid in sorted(_acceptance):
        name = nodeid.split("::")[-1]
        outcome = "PASS" if _acceptance[nodeid] == "passed" else _acceptance[nodeid].upper()
        terminalreporter.write_line(f"{name}: {outcome}")
