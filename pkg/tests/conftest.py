"""Prints one line per acceptance criterion at the end of the run."""


def pytest_terminal_summary(terminalreporter):
    lines = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            props = dict(getattr(rep, "user_properties", ()))
            if "criterion" not in props or rep.when not in ("call", "setup"):
                continue
            n = props["criterion"]
            if rep.when == "setup" and outcome == "passed":
                continue
            status = "PASS" if outcome == "passed" else "FAIL"
            lines[n] = "criterion %d %s: %s" % (n, status, props.get("detail", rep.nodeid))
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])
