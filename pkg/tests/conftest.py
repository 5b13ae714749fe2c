import pytest

# (criterion number, passed, detail) appended by test_acceptance.py
ACCEPTANCE_RESULTS: list[tuple[int, bool, str]] = []


@pytest.fixture
def criterion():
    def record(number: int, passed: bool, detail: str) -> None:
        ACCEPTANCE_RESULTS.append((number, bool(passed), detail))

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(ACCEPTANCE_RESULTS, key=lambda r: r[0]):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}")
