import pytest
from pydantic import ValidationError

from frame_criterion.config import DEFAULT_N_LIST, ReportFormat
from frame_criterion.settings import AnalysisSettings, CommandSettings, OutputSettings


@pytest.mark.unit
def test_analysis_defaults() -> None:
    settings = AnalysisSettings()

    assert settings.n_list == DEFAULT_N_LIST
    assert settings.tol == 1e-10
    assert settings.workers == 1


@pytest.mark.unit
def test_n_list_accepts_both_spellings() -> None:
    assert AnalysisSettings.model_validate({"N_list": [5, 10]}).n_list == (5, 10)
    assert AnalysisSettings.model_validate({"n_list": [5, 10]}).n_list == (5, 10)


@pytest.mark.unit
@pytest.mark.parametrize(
    ("values", "message"),
    [([10, 10], "N_list not increasing"), ([0, 10], "must be positive"), ([], "at least 1")],
)
def test_n_list_validation(values: list[int], message: str) -> None:
    with pytest.raises(ValidationError, match=message):
        AnalysisSettings.model_validate({"N_list": values})


@pytest.mark.unit
def test_analysis_rejects_unknown_keys_and_bad_tolerances() -> None:
    with pytest.raises(ValidationError, match="Extra inputs are not permitted"):
        AnalysisSettings.model_validate({"tolerance": 1e-6})
    with pytest.raises(ValidationError, match="greater than 0"):
        AnalysisSettings(tol=0)


@pytest.mark.unit
def test_tolerances_list_everything_in_force() -> None:
    tolerances = AnalysisSettings(tol=1e-12).tolerances()

    assert set(tolerances) == {
        "tol",
        "decay_threshold",
        "stabilization_tol",
        "decay_exponent",
        "plateau_slope",
        "winding_min_delta",
    }
    assert tolerances["winding_min_delta"] == 1e-6


@pytest.mark.unit
def test_output_defaults() -> None:
    outputs = OutputSettings()

    assert outputs.format is ReportFormat.TEXT
    assert outputs.report is None
    assert outputs.verbosity == "warning"
    assert outputs.timings is False


@pytest.mark.unit
def test_command_settings_validate_overrides() -> None:
    with pytest.raises(ValidationError):
        CommandSettings(command="check", max_n=0)
    with pytest.raises(ValidationError):
        CommandSettings(command="plot")


@pytest.mark.unit
def test_analysis_has_no_separate_kernel_knobs() -> None:
    with pytest.raises(ValidationError, match="Extra inputs are not permitted"):
        AnalysisSettings.model_validate({"max_iterations": 5})
    assert "kernel" not in AnalysisSettings.model_fields
