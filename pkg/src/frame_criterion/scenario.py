"""Scenario documents: the operator, the function and the analysis settings of one run.

Scenarios are TOML (default) or YAML documents::

    name = "example1_k1"
    description = "right shift, f = 1 + z"
    operator = "right_shift"
    function = [1, 1]

    [analysis]
    N_list = [50, 100, 200, 500, 1000, 2000]
    tol = 1e-10

``operator`` is a kind name or a table with ``kind`` and its parameters; ``function`` is a list
of ascending polynomial coefficients or a table (``kind = "polynomial"`` or ``kind = "series"``).
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import TYPE_CHECKING, Any, Literal

import tomlkit
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator
from tomlkit.exceptions import TOMLKitError

from frame_criterion.exceptions import ScenarioValidationError
from frame_criterion.functions import HoloFunction
from frame_criterion.logging import logger
from frame_criterion.operators import OperatorStructure
from frame_criterion.settings import AnalysisSettings, OutputSettings

if TYPE_CHECKING:
    from pydantic_core import ErrorDetails

ScenarioFormat = Literal["toml", "yaml"]

_SHIPPED_PACKAGE = "frame_criterion.scenarios"
_SUFFIX_FORMATS: dict[str, ScenarioFormat] = {".toml": "toml", ".yaml": "yaml", ".yml": "yaml"}


class Scenario(BaseModel):
    """One run of the criterion: operator ``T``, function ``f`` and settings."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = "scenario"
    description: str = ""
    operator: OperatorStructure
    function: HoloFunction
    analysis: AnalysisSettings = Field(default_factory=AnalysisSettings)
    outputs: OutputSettings = Field(default_factory=OutputSettings)

    @field_validator("operator", mode="before")
    @classmethod
    def _operator_shorthand(cls, value: Any) -> Any:  # noqa: ANN401
        return {"kind": value} if isinstance(value, str) else value

    @field_validator("function", mode="before")
    @classmethod
    def _function_shorthand(cls, value: Any) -> Any:  # noqa: ANN401
        if isinstance(value, list | tuple):
            return {"kind": "polynomial", "coefficients": list(value)}
        return value


def _describe(error: ErrorDetails) -> str:
    loc = error["loc"]
    where = ".".join(str(part) for part in loc)
    match error["type"]:
        case "extra_forbidden":
            parent = ".".join(str(part) for part in loc[:-1]) or "document"
            return f"unknown key '{loc[-1]}' in {parent}"
        case "missing" if loc and loc[-1] == "tail":
            return f"{where}: tail bound required"
        case "missing":
            return f"{where}: missing field"
        case "union_tag_invalid":
            tag = error.get("ctx", {}).get("tag")
            return f"{where}: unknown kind '{tag}'"
        case "union_tag_not_found":
            return f"{where}: missing field 'kind'"
    message = error["msg"].removeprefix("Value error, ")
    return f"{where}: {message}" if where else message


def _load_document(text: str, fmt: ScenarioFormat) -> Any:  # noqa: ANN401
    try:
        if fmt == "toml":
            return tomlkit.parse(text).unwrap()
        return yaml.safe_load(text)
    except (TOMLKitError, yaml.YAMLError) as exc:
        raise ScenarioValidationError(errors=(f"malformed {fmt.upper()} document: {exc}",)) from exc


def parse_scenario(text: str, fmt: ScenarioFormat = "toml") -> Scenario:
    """Parse and validate a scenario document.

    Args:
        text: The document.
        fmt: ``toml`` or ``yaml``.

    Raises:
        ScenarioValidationError: With every validation error of the document, not just the first.

    Returns:
        Scenario: The validated scenario with defaults filled in.
    """
    document = _load_document(text, fmt)
    if not isinstance(document, dict):
        raise ScenarioValidationError(errors=("a scenario document must be a table of keys",))
    try:
        scenario = Scenario.model_validate(document)
    except ValidationError as exc:
        errors = tuple(_describe(error) for error in exc.errors())
        logger.debug("scenario_invalid", errors=list(errors))
        raise ScenarioValidationError(errors=errors) from exc
    logger.debug("scenario_parsed", name=scenario.name, operator=scenario.operator.kind)
    return scenario


def _shipped_root() -> Any:  # noqa: ANN401
    return resources.files(_SHIPPED_PACKAGE)


def load_scenario(source: str | Path) -> Scenario:
    """Load a scenario from a file path, or by the name of a shipped scenario.

    The format follows the suffix (``.toml``, ``.yaml``, ``.yml``); other suffixes read as TOML.

    Raises:
        FileNotFoundError: If ``source`` is neither a file nor a shipped scenario name.
        ScenarioValidationError: If the document is invalid.
    """
    path = Path(source)
    if path.is_file():
        fmt = _SUFFIX_FORMATS.get(path.suffix.lower(), "toml")
        return parse_scenario(path.read_text(encoding="utf-8"), fmt)
    shipped = _shipped_root() / f"{path.stem}.toml"
    if path.parent == Path() and shipped.is_file():
        return parse_scenario(shipped.read_text(encoding="utf-8"), "toml")
    msg = f"no scenario file or shipped scenario named {str(source)!r}"
    raise FileNotFoundError(msg)


def shipped_scenarios() -> list[Scenario]:
    """The example scenarios shipped with the package, sorted by name."""
    documents = sorted(
        (entry for entry in _shipped_root().iterdir() if entry.name.endswith(".toml")),
        key=lambda entry: entry.name,
    )
    return [parse_scenario(entry.read_text(encoding="utf-8"), "toml") for entry in documents]
