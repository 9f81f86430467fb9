import logging

import numpy as np
import pytest

from augmented_krylov.core.problems import deriv2
from augmented_krylov.logging_config import SOLVER_LOGGERS


def make_conditioned_matrix(n: int, cond: float = 1e3, seed: int = 0) -> np.ndarray:
    """Random nonsymmetric n×n matrix with singular values log-spaced from 1 to 1/cond."""
    rng = np.random.default_rng(seed)
    left, _ = np.linalg.qr(rng.standard_normal((n, n)))
    right, _ = np.linalg.qr(rng.standard_normal((n, n)))
    singular_values = np.logspace(0.0, -np.log10(cond), n)
    return (left * singular_values) @ right.T


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def conditioned_system():
    """Factory returning (A, x_true, b) for a seeded conditioned system."""

    def factory(n: int = 30, cond: float = 1e3, seed: int = 0):
        A = make_conditioned_matrix(n, cond, seed)
        x_true = np.random.default_rng(seed + 1000).standard_normal(n)
        return A, x_true, A @ x_true

    return factory


@pytest.fixture
def small_deriv2():
    return deriv2(32)


@pytest.fixture(autouse=True)
def reset_solver_log_levels():
    yield
    for name in SOLVER_LOGGERS:
        logging.getLogger(name).setLevel(logging.NOTSET)
    logging.captureWarnings(False)
