import pytest

ACCEPTANCE_RESULTS = {}


@pytest.fixture
def criterion(request):
    """Record the outcome of one acceptance criterion for the end-of-run report."""

    def record(number, label, detail=""):
        ACCEPTANCE_RESULTS[number] = (label, request.node, detail)

    return record


def pytest_runtest_makereport(item, call):
    if call.when == "call":
        for number, (label, node, detail) in ACCEPTANCE_RESULTS.items():
            if node is item:
                ACCEPTANCE_RESULTS[number] = (label, call.excinfo is None, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        label, passed, detail = ACCEPTANCE_RESULTS[number]
        status = "PASS" if passed is True else "FAIL"
        terminalreporter.write_line(f"[{status}] {number:>2}. {label}" + (f"  ({detail})" if detail else ""))
