import pytest

# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def record_criterion():
    def record(number, name, passed, detail, seconds):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {name} | {detail} | {seconds:.1f}s"
        ACCEPTANCE_LINES.append(line)
        print(line, flush=True)
        return passed

    return record
