import os

import numpy as np
import pytest

from attnmgmt.quadratic import QuadraticModel
from attnmgmt.simplex import THREE_STATES

SEED = int(os.environ.get("ATTN_SEED", "20240613"))
UNIFORM = np.full(3, 1.0 / 3.0)
SKEWED = np.array([0.2, 0.5, 0.3])


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture
def uniform_model():
    return lambda kappa=1.0: QuadraticModel(THREE_STATES, UNIFORM, kappa)


def random_interior(rng, k=3, floor=0.05):
    """Dirichlet draw kept away from the boundary."""
    while True:
        x = rng.dirichlet(np.ones(k))
        if x.min() > floor:
            return x


def random_policy_parts(rng, k=3, n=None, min_weight=0.05):
    """Affinely independent support with weights bounded below; returns (support, weights, prior)."""
    from attnmgmt.simplex import affinely_independent

    n = n or int(rng.integers(2, k + 1))
    while True:
        S = rng.dirichlet(np.ones(k), size=n)
        w = rng.dirichlet(np.ones(n))
        if w.min() < min_weight or not affinely_independent(S):
            continue
        mu = w @ S
        if mu.min() > 1e-3:
            return S, w, mu


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
