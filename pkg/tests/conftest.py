import pytest

_CRITERIA = []


@pytest.fixture
def criterion(request):
    """Record a pass/fail line for an acceptance criterion.

    Usage: ``criterion("AC1", "description")`` returns a callable; invoke it
    with the final boolean before asserting.
    """

    def start(tag, description):
        def done(passed, detail=""):
            _CRITERIA.append((tag, description, bool(passed), detail))
            return passed

        return done

    return start


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for tag, desc, passed, detail in sorted(_CRITERIA):
        mark = "PASS" if passed else "FAIL"
        line = f"[{mark}] {tag}: {desc}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)
