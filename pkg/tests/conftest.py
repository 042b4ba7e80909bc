import numpy as np
import pytest

from jpcem.solver import WeightedLassoProblem, augment

ACCEPTANCE_LINES = []


def random_lasso_problem(rng):
    """d, K in [4, 8], weights in [0, 2]; ridge weight > 0 keeps the minimizer unique."""
    d = int(rng.integers(4, 9))
    k = int(rng.integers(4, 9))
    D = rng.standard_normal((d, k))
    y = rng.standard_normal(d)
    lam = float(rng.uniform(0.05, 1.0))
    w = rng.uniform(0.0, 2.0, size=k)
    return WeightedLassoProblem(augment(D, y, lam), w)


def soft_threshold(v, t):
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
