import os
from functools import lru_cache

import pytest
from hypothesis import HealthCheck, settings

from thuefam.family import isolate_roots, make_instance
from thuefam.reduction import reduce_case

settings.register_profile(
    "repo", derandomize=True, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

FULL_SWEEP = os.environ.get("THUEFAM_FULL_SWEEP") == "1"

ACCEPTANCE_LINES = []


@lru_cache(maxsize=None)
def roots_for(n: int, prec: int = 256):
    inst = make_instance(n)
    return inst, isolate_roots(inst, prec)


@lru_cache(maxsize=None)
def certificate(n: int, j: int):
    return reduce_case(n, j)


@pytest.fixture
def acceptance():
    """Record one verdict line per criterion; printed in the terminal summary."""

    def record(number: int, passed: bool, detail: str):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
