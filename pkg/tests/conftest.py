import pytest

from heunbasis import validate


@pytest.fixture(scope="session")
def p1():
    # alpha=1, beta=2, gamma=delta=1.5, epsilon=1, a=2
    return validate(1, 2, 1.5, 1.5, 1, 2)


@pytest.fixture(scope="session")
def p2():
    # hypergeometric-degenerate family: lambda = alpha*beta*a = -12 gives 1 - 6x + 6x^2
    return validate(-2, 3, 1, 1, 0, 2)


@pytest.fixture(scope="session")
def p_left():
    # same exponents as p1 with the extra singularity to the left of 0
    return validate(1, 2, 1.5, 1.5, 1, -2)


# one pass/fail line per acceptance criterion, printed after the run
_ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    """Attach a one-line measurement summary to the current acceptance test."""
    entry = {"detail": ""}
    _ACCEPTANCE[request.node.nodeid] = entry

    def note(text):
        entry["detail"] = text

    return note


def pytest_runtest_logreport(report):
    if report.when == "call" and report.nodeid in _ACCEPTANCE:
        _ACCEPTANCE[report.nodeid]["outcome"] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, entry in _ACCEPTANCE.items():
        status = "PASS" if entry.get("outcome") == "passed" else "FAIL"
        name = nodeid.split("::", 1)[-1]
        terminalreporter.write_line(f"{status}  {name}  {entry['detail']}")
