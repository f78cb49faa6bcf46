import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

DATA = Path(__file__).parent / "data"

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def data_dir():
    return DATA


def run_cli(args, cwd=None, threads=None):
    """Run the installed console entry point in a fresh interpreter."""
    env = dict(os.environ)
    if threads is not None:
        env["DISPERSIA_THREADS"] = str(threads)
    return subprocess.run([sys.executable, "-m", "dispersia.cli", *args], capture_output=True,
                          cwd=cwd, env=env, timeout=600)


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one acceptance verdict line; the lines are echoed in the terminal summary."""
    def record(number, ok, detail):
        ACCEPTANCE_LINES.append((number, f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
