import cases


def pytest_terminal_summary(terminalreporter):
    if not cases.ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(cases.ACCEPTANCE):
        ok, detail = cases.ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
