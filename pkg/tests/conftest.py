def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import VERDICTS
    except ImportError:
        return
    if not VERDICTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for c in sorted(VERDICTS):
        status, rows = VERDICTS[c]
        tr.write_line(f"{status} criterion {c}")
        for r in rows:
            tr.write_line(f"    {r.line}")
