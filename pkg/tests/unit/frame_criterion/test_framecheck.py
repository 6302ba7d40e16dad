from __future__ import annotations

import math

import numpy as np
import numpy.polynomial.polynomial as npoly

import pytest
from pydantic import ValidationError

from frame_criterion.config import (
    CrossValidationOutcome,
    SequenceClass,
    SurjectivityOutcome,
    Verdict,
    ZeroLocation,
)
from frame_criterion.exceptions import ProvenanceMismatchError
from frame_criterion.framecheck import (
    FrameBoundEstimates,
    FrameVerdict,
    criterion_verdict,
    cross_validate,
    estimate_frame_bounds,
    surjectivity_probe,
)
from frame_criterion.functions import FactorialTailBound, Polynomial, PowerSeries
from frame_criterion.holocalc import functional_calculus
from frame_criterion.operators import (
    BandedToeplitz,
    Diagonal,
    LeftShift,
    RightShift,
    make_operator,
    model_of,
)
from frame_criterion.sequences import SequenceRule

SHIFT = model_of(RightShift())
SIZES = (50, 100, 200)


def _bounds(verdict: FrameVerdict, lower: tuple[float, ...], provenance: str | None = None) -> FrameBoundEstimates:
    return FrameBoundEstimates(
        n_list=SIZES[: len(lower)],
        lower=lower,
        upper=(9.0,) * len(lower),
        ap_distance_at_zero=(1.0,) * len(lower),
        bessel_bound=9.0,
        lower_nonincreasing=True,
        upper_nondecreasing=True,
        bracketed=True,
        provenance=verdict.provenance if provenance is None else provenance,
    )


@pytest.mark.unit
@pytest.mark.parametrize("k", range(1, 7))
def test_sums_of_powers_of_the_shift_are_not_frames(k: int) -> None:
    verdict = criterion_verdict(SHIFT, Polynomial.of([1] * (k + 1)))

    assert verdict.verdict is Verdict.NOT_FRAME
    assert verdict.criterion_applicable
    assert verdict.zero_location is ZeroLocation.BOUNDARY
    assert verdict.sequence_class is SequenceClass.NOT_FRAME
    assert verdict.witness is not None
    assert abs(verdict.witness) == pytest.approx(1.0, abs=1e-9)
    assert verdict.witness ** (k + 1) == pytest.approx(1.0, abs=1e-8)
    assert "boundary band" in verdict.notes


@pytest.mark.unit
def test_one_plus_shift_has_witness_minus_one() -> None:
    verdict = criterion_verdict(SHIFT, Polynomial.of([1, 1]))

    assert verdict.witness == pytest.approx(-1, abs=1e-12)


@pytest.mark.unit
def test_zero_outside_the_disk_gives_a_riesz_basis() -> None:
    verdict = criterion_verdict(SHIFT, Polynomial.of([-2, 1]))

    assert verdict.verdict is Verdict.RIESZ_BASIS
    assert verdict.zero_location is ZeroLocation.ABSENT
    assert verdict.sequence_class is SequenceClass.RIESZ_BASIS
    assert verdict.witness is None


@pytest.mark.unit
def test_exponential_of_the_shift_is_a_riesz_basis() -> None:
    exp = PowerSeries(expression="1 / factorial(j)", tail=FactorialTailBound(scale=1.0))

    verdict = criterion_verdict(SHIFT, exp)

    assert verdict.verdict is Verdict.RIESZ_BASIS
    assert verdict.band_width > 1e-10
    assert "series tail bound" in verdict.notes


@pytest.mark.unit
def test_compact_diagonal_is_not_a_frame() -> None:
    op = make_operator({"kind": "diagonal", "values": {"tail": {"kind": "reciprocal"}}})

    verdict = criterion_verdict(op, Polynomial.identity())

    assert verdict.verdict is Verdict.NOT_FRAME
    assert verdict.zero_location is ZeroLocation.INTERIOR
    assert verdict.witness == 0
    assert "compact" in verdict.notes


@pytest.mark.unit
def test_unimodular_diagonal_gives_an_orthonormal_basis() -> None:
    op = model_of(Diagonal(values=SequenceRule.constant(1j)))

    verdict = criterion_verdict(op, Polynomial.identity())

    assert verdict.verdict is Verdict.RIESZ_BASIS
    assert verdict.sequence_class is SequenceClass.ORTHONORMAL_BASIS


@pytest.mark.unit
def test_uncertified_operator_is_inconclusive() -> None:
    verdict = criterion_verdict(model_of(LeftShift()), Polynomial.of([1, 1]))

    assert verdict.verdict is Verdict.INCONCLUSIVE
    assert not verdict.criterion_applicable
    assert verdict.zero_location is ZeroLocation.NOT_APPLICABLE
    assert "not certified" in verdict.notes


@pytest.mark.unit
def test_verdict_invariants_are_enforced() -> None:
    with pytest.raises(ValidationError, match="Riesz basis verdict"):
        FrameVerdict(
            verdict=Verdict.RIESZ_BASIS,
            criterion_applicable=False,
            zero_location=ZeroLocation.NOT_APPLICABLE,
            provenance="x",
        )
    with pytest.raises(ValidationError, match="NotFrame verdict"):
        FrameVerdict(
            verdict=Verdict.NOT_FRAME,
            criterion_applicable=True,
            zero_location=ZeroLocation.INTERIOR,
            provenance="x",
        )


@pytest.mark.unit
def test_lower_estimate_closed_form_at_n_two() -> None:
    image = functional_calculus(Polynomial.of([1, 1]), SHIFT)

    bounds = estimate_frame_bounds(image, [1, 2], 1e-12)

    assert bounds.lower == pytest.approx((1.0, (3 - math.sqrt(5)) / 2), abs=1e-10)
    assert bounds.upper == pytest.approx((2.0, 3.0), abs=1e-10)
    assert bounds.ap_distance_at_zero == pytest.approx((math.sqrt(2), 1.0), abs=1e-10)
    assert bounds.bessel_bound == 4.0
    assert bounds.lower_nonincreasing
    assert bounds.upper_nondecreasing
    assert bounds.bracketed
    assert bounds.provenance == image.origin


@pytest.mark.unit
def test_lower_estimates_follow_the_closed_form() -> None:
    image = functional_calculus(Polynomial.of([1, 1]), SHIFT)

    bounds = estimate_frame_bounds(image, SIZES, 1e-12)

    for n, lower in zip(bounds.n_list, bounds.lower, strict=True):
        assert lower == pytest.approx(4 * math.cos(n * math.pi / (2 * n + 1)) ** 2, abs=1e-10)


@pytest.mark.unit
def test_identity_has_unit_frame_bounds() -> None:
    identity = model_of(BandedToeplitz(diagonals={0: 1}))

    bounds = estimate_frame_bounds(identity, SIZES)

    assert bounds.final_lower == pytest.approx(1.0, abs=1e-12)
    assert bounds.final_upper == pytest.approx(1.0, abs=1e-12)


@pytest.mark.unit
def test_bounds_do_not_depend_on_workers() -> None:
    image = functional_calculus(Polynomial.of([-2, 1]), SHIFT)

    assert estimate_frame_bounds(image, SIZES, workers=1) == estimate_frame_bounds(image, SIZES, workers=3)


@pytest.mark.unit
def test_surjectivity_probe_outcomes() -> None:
    decaying = surjectivity_probe(functional_calculus(Polynomial.of([1, 1]), SHIFT), SIZES)
    bounded = surjectivity_probe(functional_calculus(Polynomial.of([-2, 1]), SHIFT), SIZES)
    compact = surjectivity_probe(model_of(Diagonal(values=SequenceRule.reciprocal())), SIZES)

    assert decaying.outcome is SurjectivityOutcome.DECAYING
    assert bounded.outcome is SurjectivityOutcome.BOUNDED_BELOW_EVIDENCE
    assert compact.outcome is SurjectivityOutcome.DECAYING
    assert bounded.values[-1] == pytest.approx(1.0, abs=1e-3)


@pytest.mark.unit
def test_cross_validation_corroborates_a_not_frame_verdict() -> None:
    f = Polynomial.of([1, 1])
    verdict = criterion_verdict(SHIFT, f)
    bounds = estimate_frame_bounds(functional_calculus(f, SHIFT), SIZES)

    check = cross_validate(verdict, bounds)

    assert check.outcome is CrossValidationOutcome.CONSISTENT
    assert "lower estimate" in check.description
    assert "N = 200" in check.description


@pytest.mark.unit
def test_cross_validation_corroborates_a_riesz_verdict() -> None:
    f = Polynomial.of([-2, 1])
    verdict = criterion_verdict(SHIFT, f)
    bounds = estimate_frame_bounds(functional_calculus(f, SHIFT), SIZES)

    check = cross_validate(verdict, bounds)

    assert check.outcome is CrossValidationOutcome.CONSISTENT
    assert check.description.startswith("RieszBasis corroborated")


@pytest.mark.unit
def test_cross_validation_reports_tension() -> None:
    verdict = criterion_verdict(SHIFT, Polynomial.of([-2, 1]))

    check = cross_validate(verdict, _bounds(verdict, (1e-3, 1e-5, 1e-7)))

    assert check.outcome is CrossValidationOutcome.TENSION
    assert "RieszBasis expects" in check.description


@pytest.mark.unit
def test_cross_validation_tension_for_a_plateaued_not_frame() -> None:
    verdict = criterion_verdict(SHIFT, Polynomial.of([1, 1]))

    check = cross_validate(verdict, _bounds(verdict, (0.5, 0.5, 0.5)))

    assert check.outcome is CrossValidationOutcome.TENSION
    assert "NotFrame expects" in check.description


@pytest.mark.unit
def test_cross_validation_has_nothing_to_check_when_inconclusive() -> None:
    verdict = criterion_verdict(model_of(LeftShift()), Polynomial.of([1, 1]))

    check = cross_validate(verdict, _bounds(verdict, (0.5, 0.5, 0.5)))

    assert check.outcome is CrossValidationOutcome.CONSISTENT
    assert "inconclusive" in check.description


@pytest.mark.unit
def test_cross_validation_refuses_mismatched_inputs() -> None:
    verdict = criterion_verdict(SHIFT, Polynomial.of([1, 1]))

    with pytest.raises(ProvenanceMismatchError, match="mismatched provenance"):
        cross_validate(verdict, _bounds(verdict, (0.5,), provenance="0" * 64))


def _random_polynomial(rng: np.random.Generator, interior: bool) -> Polynomial:
    degree = int(rng.integers(1, 7))
    moduli = rng.uniform(1.3, 3.0, degree)
    if interior:
        moduli[0] = rng.uniform(0.0, 0.8)
    roots = moduli * np.exp(2j * np.pi * rng.random(degree))
    return Polynomial.of(complex(rng.normal(), rng.normal()) * npoly.polyfromroots(roots))


@pytest.mark.unit
def test_verdicts_agree_with_unit_disk_root_counts() -> None:
    rng = np.random.default_rng(6)

    for _ in range(50):
        degree = int(rng.integers(1, 7))
        coefficients = rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1)
        has_root_in_disk = bool(np.any(np.abs(np.roots(coefficients[::-1])) <= 1))

        verdict = criterion_verdict(SHIFT, Polynomial.of(coefficients))

        assert verdict.verdict is (Verdict.NOT_FRAME if has_root_in_disk else Verdict.RIESZ_BASIS)


@pytest.mark.unit
def test_surjectivity_evidence_matches_the_verdict() -> None:
    rng = np.random.default_rng(3)

    for i in range(16):
        interior = i % 2 == 0
        f = _random_polynomial(rng, interior)

        verdict = criterion_verdict(SHIFT, f)
        evidence = surjectivity_probe(functional_calculus(f, SHIFT), SIZES)

        if interior:
            assert verdict.verdict is Verdict.NOT_FRAME
            assert evidence.outcome is SurjectivityOutcome.DECAYING
        else:
            assert verdict.verdict is Verdict.RIESZ_BASIS
            assert evidence.outcome is SurjectivityOutcome.BOUNDED_BELOW_EVIDENCE


@pytest.mark.unit
def test_bound_estimates_lie_within_the_symbol_range() -> None:
    rng = np.random.default_rng(11)
    circle = np.exp(2j * np.pi * np.arange(4096) / 4096)

    for i in range(10):
        f = _random_polynomial(rng, interior=i % 2 == 0)
        squared = np.abs(npoly.polyval(circle, f.array)) ** 2

        bounds = estimate_frame_bounds(functional_calculus(f, SHIFT), SIZES)

        assert bounds.bracketed
        assert max(bounds.upper) <= squared.max() * (1 + 1e-3)
        if i % 2:
            assert min(bounds.lower) >= squared.min() * (1 - 1e-3)


@pytest.mark.unit
@pytest.mark.parametrize(("c", "expected"), [(2, 4.0), (0.5j, 0.25), (-3 + 4j, 25.0)])
def test_scaled_identity_has_scaled_frame_bounds(c: complex, expected: float) -> None:
    f = Polynomial.of([c])

    bounds = estimate_frame_bounds(functional_calculus(f, SHIFT), SIZES)
    verdict = criterion_verdict(SHIFT, f)

    assert bounds.lower == pytest.approx((expected,) * 3, rel=1e-12)
    assert bounds.upper == pytest.approx((expected,) * 3, rel=1e-12)
    assert bounds.bessel_bound == pytest.approx(expected, rel=1e-12)
    assert verdict.verdict is Verdict.RIESZ_BASIS
    assert verdict.sequence_class is SequenceClass.RIESZ_BASIS
