import pytest

_LINES = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_LINES] = {}


@pytest.fixture(scope="session")
def acceptance_line(pytestconfig):
    """Record the one-line verdict of an acceptance criterion.

    ``ok=None`` marks a criterion that could not run here.
    """
    lines = pytestconfig.stash[_LINES]

    def record(criterion, ok, detail):
        verdict = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
        lines[criterion] = f"criterion {criterion:<3} {verdict}  {detail}"
        print(lines[criterion])
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for key in sorted(lines):
            terminalreporter.write_line(lines[key])
