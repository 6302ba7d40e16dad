from __future__ import annotations

from pathlib import Path
from typing import Literal

from pydantic import AliasChoices, BaseModel, ConfigDict, Field, field_validator

from frame_criterion.config import (
    DEFAULT_DECAY_EXPONENT,
    DEFAULT_DECAY_THRESHOLD,
    DEFAULT_GRID_BOUNDARY,
    DEFAULT_GRID_INTERIOR,
    DEFAULT_N_LIST,
    DEFAULT_PLATEAU_SLOPE,
    DEFAULT_STABILIZATION_TOL,
    DEFAULT_TOL,
    WINDING_MIN_DELTA,
    ReportFormat,
)


class AnalysisSettings(BaseModel):
    """Parameters of the criterion, the probes and the frame-bound sweep."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_list: tuple[int, ...] = Field(
        default=DEFAULT_N_LIST,
        min_length=1,
        validation_alias=AliasChoices("n_list", "N_list"),
        description="Truncation sizes, strictly increasing.",
    )
    tol: float = Field(default=DEFAULT_TOL, gt=0, description="Membership and kernel tolerance.")
    decay_threshold: float = Field(
        default=DEFAULT_DECAY_THRESHOLD,
        gt=0,
        description="Lower-bound estimate below which a sweep counts as decayed.",
    )
    stabilization_tol: float = Field(
        default=DEFAULT_STABILIZATION_TOL,
        gt=0,
        description="Relative change under which a sweep counts as stabilized.",
    )
    decay_exponent: float = Field(
        default=DEFAULT_DECAY_EXPONENT,
        gt=0,
        description="Minimal log-log decay rate accepted as algebraic decay.",
    )
    plateau_slope: float = Field(
        default=DEFAULT_PLATEAU_SLOPE,
        gt=0,
        description="Log-log slope magnitude under which a sweep counts as a plateau.",
    )
    grid_boundary: int = Field(default=DEFAULT_GRID_BOUNDARY, gt=0, description="Boundary probe points.")
    grid_interior: int = Field(default=DEFAULT_GRID_INTERIOR, ge=0, description="Interior probe points.")
    workers: int = Field(default=1, gt=0, description="Threads for probe grids and sweeps.")

    @field_validator("n_list")
    @classmethod
    def _check_n_list(cls, value: tuple[int, ...]) -> tuple[int, ...]:
        if any(n < 1 for n in value):
            msg = "N_list entries must be positive"
            raise ValueError(msg)
        if any(b <= a for a, b in zip(value, value[1:], strict=False)):
            msg = "N_list not increasing"
            raise ValueError(msg)
        return value

    def tolerances(self) -> dict[str, float]:
        """All tolerances in force, for reports."""
        return {
            "tol": self.tol,
            "decay_threshold": self.decay_threshold,
            "stabilization_tol": self.stabilization_tol,
            "decay_exponent": self.decay_exponent,
            "plateau_slope": self.plateau_slope,
            "winding_min_delta": max(self.tol, WINDING_MIN_DELTA),
        }


class OutputSettings(BaseModel):
    """Where and how reports are written."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    report: Path | None = Field(default=None, description="Report file; stdout when unset.")
    csv: Path | None = Field(default=None, description="CSV file for the bound sweep.")
    format: ReportFormat = Field(default=ReportFormat.TEXT, description="Report format.")
    verbosity: Literal["debug", "info", "warning", "error"] = Field(
        default="warning",
        description="Log level.",
    )
    timings: bool = Field(default=False, description="Include stage timings in JSON reports.")


class CommandSettings(BaseModel):
    """Parsed command line; unset options fall back to the scenario's values."""

    model_config = ConfigDict(frozen=True)

    command: Literal["check", "probe", "bounds", "examples"]
    scenario: str | None = None
    format: ReportFormat | None = None
    csv: Path | None = None
    output: Path | None = None
    tol: float | None = Field(default=None, gt=0)
    max_n: int | None = Field(default=None, gt=0)
    workers: int | None = Field(default=None, gt=0)
    timings: bool = False
    log_file: Path | None = None
    verbosity: Literal["debug", "info", "warning", "error"] | None = None
