from __future__ import annotations

from functools import lru_cache

import pytest

from tetracode.code import carve_tetrahedral_code


@lru_cache(maxsize=None)
def code_for(d: int):
    return carve_tetrahedral_code(d)


@pytest.fixture(scope="session")
def code3():
    return code_for(3)


@pytest.fixture(scope="session")
def code5():
    return code_for(5)


@pytest.fixture(scope="session")
def code7():
    return code_for(7)


ACCEPTANCE_LINES: list[str] = []


def report(number: int, ok: bool | None, detail: str) -> None:
    """One line per criterion; ``ok=None`` marks a skipped criterion."""
    status = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
    line = f"criterion {number:2d}: {status}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
