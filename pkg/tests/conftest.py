def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(RESULTS):
        title, ok, n, secs = RESULTS[k]
        terminalreporter.write_line(f"criterion {k} ({title}): {'PASS' if ok else 'FAIL'} [{n} checks, {secs:.1f}s]")
