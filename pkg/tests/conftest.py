import numpy as np
import pytest

from dde_steps.core import DdeProblem, FunctionRhs

_ACCEPTANCE = []


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""

    def record(label: str, passed: bool, detail: str = "") -> bool:
        _ACCEPTANCE.append((label, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}")


@pytest.fixture
def pure_delay():
    """z'(t) = z(t - 1), z = 1 on [-1, 0], two windows."""
    return DdeProblem(FunctionRhs(lambda t, y, zs: zs[0]), tau=1.0, eta=[1.0], n=1, name="pure_delay")


def pure_delay_exact(t):
    t = np.asarray(t, dtype=float)
    return np.where(t <= 1.0, 1.0 + t, 2.0 + (t**2 - 1.0) / 2.0)
