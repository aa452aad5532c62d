import time

import pytest

from nonlocal_fb.model import make_kernel, make_reaction_logistic


@pytest.fixture(scope="session")
def laplace():
    return make_kernel("laplace", {"scale": 1.0})


@pytest.fixture(scope="session")
def compact():
    return make_kernel("polynomial-compact", {"radius": 1.0})


@pytest.fixture(scope="session")
def fat2():
    return make_kernel("algebraic-tail", {"gamma": 2.0})


@pytest.fixture(scope="session")
def logistic11():
    return make_reaction_logistic(1.0, 1.0)


# ---------------------------------------------------------------- acceptance reporting

_ACCEPTANCE_LINES = []


class AcceptanceCheck:
    """Collects the named checks of one acceptance criterion and prints one verdict line."""

    def __init__(self, label: str, budget: float):
        self.label = label
        self.budget = budget
        self.checks = {}
        self.start = time.perf_counter()

    def check(self, name: str, ok) -> bool:
        self.checks[name] = bool(ok)
        return bool(ok)

    def finish(self, detail: str = ""):
        elapsed = time.perf_counter() - self.start
        self.checks[f"runtime < {self.budget:g} s"] = elapsed < self.budget
        failed = [k for k, v in self.checks.items() if not v]
        line = f"{self.label}: {'PASS' if not failed else 'FAIL'} [{elapsed:.1f} s] {detail}"
        if failed:
            line += " | failed: " + "; ".join(failed)
        print(line)
        _ACCEPTANCE_LINES.append(line)
        assert not failed, line


@pytest.fixture
def acceptance():
    return AcceptanceCheck


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
