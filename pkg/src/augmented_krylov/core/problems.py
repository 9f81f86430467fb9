"""Discretized ill-posed test problems and augmentation bases.

Both problems are first-kind Fredholm integral equations on [0, 1],
discretized by midpoint collocation: s_i = (i − 1/2)/n and
A_ij = K(s_i, s_j)/n.
"""

import logging

import numpy as np

from augmented_krylov.config import DEFAULT_DEPTH, DEFAULT_DISCONTINUITY, MISLOCATED_DISCONTINUITY

from .exceptions import ValidationError
from .models import ExperimentConfig, ProblemKind, TestProblem

logger = logging.getLogger(__name__)


def midpoint_grid(n: int) -> np.ndarray:
    return (np.arange(1, n + 1) - 0.5) / n


def _check_size(n: int) -> None:
    if n < 2:
        raise ValidationError(f"Problem size must be at least 2, got {n}")


def deriv2(n: int) -> TestProblem:
    """Green's function of the second derivative, with f(t) = t.

    The exact data g(s) = (s³ − s)/6 is sampled at the nodes, so A·x_true
    and b_true differ by the midpoint quadrature error, O(n⁻²).
    """
    _check_size(n)
    s = midpoint_grid(n)
    S, T = np.meshgrid(s, s, indexing="ij")
    A = np.where(S <= T, S * (T - 1.0), T * (S - 1.0)) / n
    b_true = (s**3 - s) / 6.0
    return TestProblem(
        name="deriv2",
        A=A,
        x_true=s.copy(),
        b_true=b_true,
        b_noisy=b_true.copy(),
        consistency_bound=5.0 / n**2,
    )


def gravity(
    n: int, depth: float = DEFAULT_DEPTH, discontinuity_at: float | None = None
) -> TestProblem:
    """1-D gravity surveying with a mass source at the given depth.

    x_true(t) = sin(πt) + 0.5·sin(2πt), plus a unit step for t > τ when
    ``discontinuity_at`` is τ. The data is b_true = A·x_true.
    """
    _check_size(n)
    if depth <= 0:
        raise ValidationError(f"Depth must be positive, got {depth}")

    s = midpoint_grid(n)
    diff = s[:, None] - s[None, :]
    A = depth * (depth**2 + diff**2) ** -1.5 / n
    x_true = np.sin(np.pi * s) + 0.5 * np.sin(2.0 * np.pi * s)
    if discontinuity_at is not None:
        x_true = x_true + (s > discontinuity_at)
    b_true = A @ x_true
    return TestProblem(
        name="gravity",
        A=A,
        x_true=x_true,
        b_true=b_true,
        b_noisy=b_true.copy(),
    )


def standard_normal(size: int, seed: int) -> np.ndarray:
    """Box–Muller normals from a PCG64 stream of uniform doubles.

    Uniforms are consumed in pairs (u1, u2); the cosine and sine branches
    fill consecutive entries.
    """
    pairs = (size + 1) // 2
    rng = np.random.Generator(np.random.PCG64(seed))
    u = rng.random(2 * pairs)
    radius = np.sqrt(-2.0 * np.log1p(-u[0::2]))
    theta = 2.0 * np.pi * u[1::2]
    out = np.empty(2 * pairs)
    out[0::2] = radius * np.cos(theta)
    out[1::2] = radius * np.sin(theta)
    return out[:size]


def add_noise(b: np.ndarray, rel_level: float, seed: int) -> np.ndarray:
    """Return b + e with ‖e‖ = rel_level·‖b‖."""
    if rel_level < 0:
        raise ValidationError(f"Noise level must be non-negative, got {rel_level}")
    b = np.asarray(b, dtype=float)
    if rel_level == 0:
        return b.copy()
    e = standard_normal(b.shape[0], seed)
    e *= rel_level * np.linalg.norm(b) / np.linalg.norm(e)
    return b + e


def aug_basis_boundary(n: int) -> np.ndarray:
    """Constant and linear vectors, spanning the boundary behavior."""
    _check_size(n)
    return np.column_stack([np.ones(n), np.arange(1, n + 1, dtype=float)])


def aug_basis_step(n: int, jump_index: int) -> np.ndarray:
    """Unit step starting at the 1-based ``jump_index``."""
    if not 1 <= jump_index <= n:
        raise ValidationError(f"Jump index must lie in [1, {n}], got {jump_index}")
    column = np.zeros((n, 1))
    column[jump_index - 1 :] = 1.0
    return column


def jump_index_for(n: int, tau: float) -> int:
    """1-based index of the first midpoint node to the right of tau."""
    after = np.flatnonzero(midpoint_grid(n) > tau)
    if after.size == 0:
        raise ValidationError(f"No grid node of size {n} lies beyond t = {tau}")
    return int(after[0]) + 1


def build_problem(config: ExperimentConfig) -> TestProblem:
    """Assemble the problem a config names, with noisy data."""
    if config.problem == ProblemKind.DERIV2:
        problem = deriv2(config.n)
    elif config.problem == ProblemKind.GRAVITY:
        tau = DEFAULT_DISCONTINUITY if config.discontinuity is None else config.discontinuity
        problem = gravity(config.n, config.depth, tau)
    else:
        tau = MISLOCATED_DISCONTINUITY if config.discontinuity is None else config.discontinuity
        problem = gravity(config.n, config.depth, tau)
        problem.name = "gravity-mislocated"

    problem.b_noisy = add_noise(problem.b_true, config.noise_level, config.seed)
    problem.noise_level = config.noise_level
    problem.seed = config.seed
    logger.debug(
        "Built %s problem: n=%d, noise=%.1e, seed=%d",
        problem.name,
        config.n,
        config.noise_level,
        config.seed,
    )
    return problem
