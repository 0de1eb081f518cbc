import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from sompkit.harness.config import ExperimentConfig  # noqa: E402
from sompkit.harness.experiment import experiment_matrix  # noqa: E402


@pytest.fixture(scope="session")
def designed():
    """The default designed 100 x 200 matrix (shared with the harness's matrix cache)."""
    return experiment_matrix(ExperimentConfig())


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def unit_columns(a):
    return a / np.linalg.norm(a, axis=0)


# acceptance report: one line per criterion, shown in the terminal summary

import time  # noqa: E402

ACCEPTANCE_LINES = []
SUITE_BUDGET_S = 30 * 60
_session_start = [None]


def record_criterion(number, title, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}" + (f" ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_sessionstart(session):
    _session_start[0] = time.perf_counter()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    elapsed = time.perf_counter() - _session_start[0]
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
    ok = elapsed < SUITE_BUDGET_S
    terminalreporter.write_line(
        f"[{'PASS' if ok else 'FAIL'}] suite runtime: {elapsed / 60:.1f} min (budget {SUITE_BUDGET_S / 60:.0f} min)")


def pytest_sessionfinish(session, exitstatus):
    if ACCEPTANCE_LINES and time.perf_counter() - _session_start[0] >= SUITE_BUDGET_S and exitstatus == 0:
        session.exitstatus = 1
