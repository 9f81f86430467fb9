import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from augmented_krylov.config import DEFAULT_DEPTH, DEFAULT_MAXIT, DEFAULT_N, DEFAULT_TOL


class Method(str, Enum):
    """Solvers selectable from the experiment harness."""

    GMRES = "gmres"
    RRGMRES = "rrgmres"
    R3GMRES = "r3gmres"
    R3GMRES_REF = "r3gmres-ref"
    GCRO = "gcro"
    FGMRES_AUG = "fgmres-aug"


class ProblemKind(str, Enum):
    """Test problems reproduced by the harness."""

    DERIV2 = "deriv2"
    GRAVITY = "gravity"
    GRAVITY_MISLOCATED = "gravity-mislocated"


class AugKind(str, Enum):
    """Augmentation bases known to the harness."""

    NONE = "none"
    BOUNDARY = "boundary"
    STEP = "step"


@dataclass(frozen=True)
class GivensPair:
    """Plane rotation [[c, s], [-s, c]]."""

    c: float
    s: float

    @classmethod
    def identity(cls) -> "GivensPair":
        return cls(1.0, 0.0)

    def apply(self, a, b):
        """Rotate the pair (a, b); works on scalars and on equal-length rows."""
        return self.c * a + self.s * b, -self.s * a + self.c * b

    def is_orthogonal(self, tol: float = 1e-14) -> bool:
        return math.isclose(self.c * self.c + self.s * self.s, 1.0, rel_tol=0.0, abs_tol=tol)


@dataclass
class IterationRecord:
    """One row of a convergence history."""

    iteration: int
    residual_estimate: float
    true_residual: float | None = None
    relative_error: float | None = None


@dataclass
class SolveReport:
    """Result of a solve, with per-iteration history and work counters."""

    x: np.ndarray
    iterations: int
    converged: bool
    method: str
    r0_norm: float
    history: list[IterationRecord] = field(default_factory=list)
    matvec_count: int = 0
    augmentation_flops: int = 0
    residual_checks: int = 0
    breakdown: bool = False
    degenerate_iterations: list[int] = field(default_factory=list)
    best_error_iteration: int | None = None
    best_error: float | None = None
    best_x: np.ndarray | None = None
    iterates: list[np.ndarray] = field(default_factory=list)
    krylov_basis: np.ndarray | None = None
    krylov_coefficients: np.ndarray | None = None
    augmentation_coefficients: np.ndarray | None = None

    @property
    def residual_estimates(self) -> np.ndarray:
        return np.array([rec.residual_estimate for rec in self.history])

    @property
    def true_residuals(self) -> np.ndarray:
        return np.array(
            [np.nan if rec.true_residual is None else rec.true_residual for rec in self.history]
        )

    @property
    def relative_errors(self) -> np.ndarray:
        return np.array(
            [np.nan if rec.relative_error is None else rec.relative_error for rec in self.history]
        )

    @property
    def final_relative_error(self) -> float | None:
        for rec in reversed(self.history):
            if rec.relative_error is not None:
                return rec.relative_error
        return None

    def track_best(self, iteration: int, error: float, x: np.ndarray) -> None:
        """Remember the iterate with the smallest relative error seen so far."""
        if self.best_error is None or error < self.best_error:
            self.best_error = error
            self.best_error_iteration = iteration
            self.best_x = x.copy()


@dataclass
class TestProblem:
    """Discretized ill-posed problem with exact and noisy data."""

    __test__ = False

    name: str
    A: np.ndarray
    x_true: np.ndarray
    b_true: np.ndarray
    b_noisy: np.ndarray
    noise_level: float = 0.0
    seed: int = 0
    consistency_bound: float = 0.0

    @property
    def n(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True)
class ExperimentConfig:
    """A single harness run: problem, solver and output."""

    problem: ProblemKind = ProblemKind.DERIV2
    n: int = DEFAULT_N
    noise_level: float = 1e-5
    seed: int = 0
    method: Method = Method.R3GMRES
    tol: float = DEFAULT_TOL
    maxit: int = DEFAULT_MAXIT
    aug: AugKind = AugKind.NONE
    jump_index: int | None = None
    depth: float = DEFAULT_DEPTH
    discontinuity: float | None = None
    plain: bool = False
    strict: bool = False
    diagnostics: bool | None = None
    output_path: Path | None = None

    @property
    def label(self) -> str:
        if self.aug == AugKind.NONE:
            return self.method.value
        return f"{self.method.value}+{self.aug.value}"

    def problem_key(self) -> tuple:
        """Fields that define the linear system; runs are comparable when these agree."""
        return (
            self.problem,
            self.n,
            self.noise_level,
            self.seed,
            self.depth,
            self.discontinuity,
        )


@dataclass
class ComparisonTable:
    """Per-iteration histories of several runs joined on the iteration number."""

    labels: list[str]
    reports: list[SolveReport]
    header: list[str]
    rows: list[list]
