"""Prints one line per acceptance criterion at the end of a run."""

_ACCEPTANCE_FILE = "test_acceptance.py"


def _criterion_names(stats, key, passed_only_calls):
    for rep in stats.get(key, ()):
        nodeid = getattr(rep, "nodeid", "")
        if _ACCEPTANCE_FILE not in nodeid:
            continue
        if passed_only_calls and getattr(rep, "when", "call") != "call":
            continue
        yield nodeid.split("::")[-1]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = {}
    for name in _criterion_names(terminalreporter.stats, "passed", True):
        rows.setdefault(name, "PASS")
    for key in ("failed", "error"):
        for name in _criterion_names(terminalreporter.stats, key, False):
            rows[name] = "FAIL"
    if rows:
        terminalreporter.section("acceptance criteria")
        for name in sorted(rows):
            terminalreporter.write_line(f"{rows[name]}  {name}")
