from pathlib import Path

import pytest

from ptw.statespace import StateSpace
from ptw.syntax import VarDecl

ROOT = Path(__file__).resolve().parent.parent
SPECS = ROOT / "specs"


@pytest.fixture
def xy32():
    return StateSpace([VarDecl.interval("x", 0, 31), VarDecl.interval("y", 0, 31)])


@pytest.fixture
def cat_space():
    return StateSpace([VarDecl.boolean(n) for n in ("open", "dead", "spill")])


@pytest.fixture
def x5():
    return StateSpace([VarDecl.interval("x", 0, 4)])


# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
