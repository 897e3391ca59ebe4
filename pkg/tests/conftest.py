import numpy as np
import pytest

from minenergy import LtiSystem, random_system, run_experiments


def rel(a, b):
    """Relative 2-norm distance of ``a`` from ``b``."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300)


def low_rank(rng, rows, cols, r):
    return rng.standard_normal((rows, r)) @ rng.standard_normal((r, cols))


def zero_x0_data(sys, T, U):
    return run_experiments(sys, np.zeros(sys.n), U, T)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def scalar_integrator():
    return LtiSystem([[1.0]], [[1.0]])


@pytest.fixture
def small_random_system():
    return random_system(4, 2, seed=3)


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
