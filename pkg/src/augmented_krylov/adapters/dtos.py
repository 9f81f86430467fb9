import json
from pathlib import Path
from typing import Any

from pydantic import AliasChoices, BaseModel, ConfigDict, Field, model_validator
from pydantic import ValidationError as PydanticValidationError

from augmented_krylov.config import DEFAULT_DEPTH, DEFAULT_MAXIT, DEFAULT_N, DEFAULT_TOL
from augmented_krylov.core.exceptions import ValidationError
from augmented_krylov.core.models import AugKind, ExperimentConfig, Method, ProblemKind


class ExperimentConfigDTO(BaseModel):
    """Experiment configuration as given on the command line or in a config file."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    problem: ProblemKind = ProblemKind.DERIV2
    n: int = Field(DEFAULT_N, ge=2)
    noise_level: float = Field(
        1e-5, ge=0.0, lt=1.0, validation_alias=AliasChoices("noise_level", "noise")
    )
    seed: int = Field(0, ge=0)
    method: Method = Method.R3GMRES
    tol: float = Field(DEFAULT_TOL, gt=0.0)
    maxit: int = Field(DEFAULT_MAXIT, ge=1)
    aug: AugKind = AugKind.NONE
    jump_index: int | None = Field(None, ge=1)
    depth: float = Field(DEFAULT_DEPTH, gt=0.0)
    discontinuity: float | None = Field(None, gt=0.0, lt=1.0)
    plain: bool = False
    strict: bool = False
    diagnostics: bool | None = None
    output_path: Path | None = Field(None, validation_alias=AliasChoices("output_path", "out"))

    @model_validator(mode="after")
    def _check_jump_index(self) -> "ExperimentConfigDTO":
        if self.jump_index is not None and self.jump_index > self.n:
            raise ValueError(f"jump_index {self.jump_index} exceeds n = {self.n}")
        return self

    def to_domain(self) -> ExperimentConfig:
        """Convert to the frozen domain config."""
        return ExperimentConfig(
            problem=self.problem,
            n=self.n,
            noise_level=self.noise_level,
            seed=self.seed,
            method=self.method,
            tol=self.tol,
            maxit=self.maxit,
            aug=self.aug,
            jump_index=self.jump_index,
            depth=self.depth,
            discontinuity=self.discontinuity,
            plain=self.plain,
            strict=self.strict,
            diagnostics=self.diagnostics,
            output_path=self.output_path,
        )


class ComparisonFileDTO(BaseModel):
    """Contents of a `compare` config file: a list of runs on one problem."""

    model_config = ConfigDict(extra="forbid")

    configs: list[ExperimentConfigDTO] = Field(min_length=1)

    @classmethod
    def from_data(cls, data: Any) -> "ComparisonFileDTO":
        """Accept either a bare list of configs or {"configs": [...]}."""
        if isinstance(data, list):
            data = {"configs": data}
        return cls.model_validate(data)

    def to_domain(self) -> list[ExperimentConfig]:
        return [config.to_domain() for config in self.configs]


def parse_experiment_config(data: dict[str, Any]) -> ExperimentConfig:
    """Validate raw option values into an ExperimentConfig."""
    try:
        return ExperimentConfigDTO.model_validate(data).to_domain()
    except PydanticValidationError as e:
        raise ValidationError(_describe(e)) from e


def load_comparison_file(path: Path) -> list[ExperimentConfig]:
    """Read and validate a JSON comparison file."""
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path} is not valid JSON: {e}") from e
    try:
        return ComparisonFileDTO.from_data(data).to_domain()
    except PydanticValidationError as e:
        raise ValidationError(_describe(e)) from e


def _describe(error: PydanticValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "config"
        parts.append(f"{location}: {item['msg']}")
    return "Invalid configuration: " + "; ".join(parts)
