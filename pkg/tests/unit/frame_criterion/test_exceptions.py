import pytest

from frame_criterion.exceptions import (
    ConvergenceError,
    DomainError,
    FrameCriterionError,
    MethodMismatchError,
    ProvenanceMismatchError,
    ScenarioValidationError,
)


@pytest.mark.unit
def test_messages_carry_the_details() -> None:
    assert "after 7 iterations" in str(ConvergenceError(best_estimate=0.5, residual=1e-3, iterations=7))
    assert str(MethodMismatchError(root_count=(1, 0), winding_count=(0, 0))) == (
        "root/winding mismatch: roots (1, 0), winding (0, 0)"
    )
    assert "radius of convergence 1" in str(DomainError(point=1.0, radius=1.0))


@pytest.mark.unit
def test_scenario_errors_are_listed() -> None:
    error = ScenarioValidationError(errors=("operator: missing field 'kind'", "function: missing field"))

    assert str(error) == "invalid scenario:\n  - operator: missing field 'kind'\n  - function: missing field"


@pytest.mark.unit
def test_provenance_mismatch_shortens_digests() -> None:
    error = ProvenanceMismatchError(verdict_source="a" * 64, bounds_source="b" * 64)

    assert error.message == f"mismatched provenance: verdict {'a' * 12} vs bounds {'b' * 12}"


@pytest.mark.unit
def test_errors_share_a_base_and_are_frozen() -> None:
    error = DomainError(point=2.0, radius=1.0)

    assert isinstance(error, FrameCriterionError)
    with pytest.raises(DomainError):
        raise error
    with pytest.raises(AttributeError):
        error.point = 3.0  # type: ignore[misc]
