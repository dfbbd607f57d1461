import time
from contextlib import contextmanager

import pytest

_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES] = []


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.fixture
def criterion(request):
    """Context manager that times a criterion and records one PASS/FAIL line."""

    @contextmanager
    def run(number: int, title: str, budget: float):
        start = time.perf_counter()
        ok = False
        try:
            yield
            elapsed = time.perf_counter() - start
            assert elapsed < budget, f"took {elapsed:.2f} s, budget {budget} s"
            ok = True
        finally:
            elapsed = time.perf_counter() - start
            line = f"{number}. [{'PASS' if ok else 'FAIL'}] {title} ({elapsed:.2f} s, budget {budget:g} s)"
            request.config.stash[_LINES].append(line)
            print(line)

    return run
