import acceptance_log


def pytest_terminal_summary(terminalreporter):
    rows = acceptance_log.lines()
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for line in rows:
        terminalreporter.write_line(line)
