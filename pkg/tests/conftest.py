"""Shared pytest hooks: the acceptance verdict table in the terminal summary."""

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(criterion: int, passed: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (passed, detail)
    print(f"ACCEPTANCE {criterion}: {'PASS' if passed else 'FAIL'} - {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, 9):
        if n in ACCEPTANCE:
            passed, detail = ACCEPTANCE[n]
            terminalreporter.write_line(f"criterion {n}: {'PASS' if passed else 'FAIL'} - {detail}")
        else:
            terminalreporter.write_line(f"criterion {n}: NOT RUN")
