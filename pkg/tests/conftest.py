_ACCEPTANCE = []


def pytest_runtest_logreport(report):
    if report.when == "call" and report.nodeid.startswith("tests/test_acceptance.py") or (
        report.when == "setup" and report.skipped and "test_acceptance.py" in report.nodeid
    ):
        _ACCEPTANCE.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE:
        tag = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[outcome]
        terminalreporter.write_line(f"[{tag}] {name}")
