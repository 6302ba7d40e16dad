"""Verdict engine for the spectral frame criterion and the numerical sweeps that corroborate it.

The sequence ``(V e_n)`` with ``V = f(T)`` is a frame iff ``V`` is surjective, a Riesz basis iff
``V`` is invertible and an orthonormal basis iff ``V`` is unitary. When
``sigma_ap(T*) = sigma(T*)`` the first two coincide, so the verdict reduces to whether ``f``
vanishes on ``sigma(T)``.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

from pydantic import BaseModel, ConfigDict, model_validator

from frame_criterion.config import (
    DEFAULT_DECAY_THRESHOLD,
    DEFAULT_N_LIST,
    DEFAULT_PLATEAU_SLOPE,
    DEFAULT_STABILIZATION_TOL,
    DEFAULT_TOL,
    ClassTag,
    CrossValidationOutcome,
    Extremum,
    SequenceClass,
    SurjectivityOutcome,
    Verdict,
    ZeroLocation,
)
from frame_criterion.exceptions import ProvenanceMismatchError
from frame_criterion.functions import Polynomial
from frame_criterion.holocalc import functional_calculus, polynomial_part, provenance
from frame_criterion.logging import logger
from frame_criterion.numkernel import extremal_singular_value
from frame_criterion.operators import OperatorModel, adjoint, is_unitary, norm_bound, truncate_columns
from frame_criterion.regions import locate_zero
from frame_criterion.spectral import ap_distance, check_sizes, is_stabilized, ordered_map

if TYPE_CHECKING:
    from collections.abc import Sequence

    from frame_criterion.functions import PowerSeries

_IDENTITY = Polynomial.identity()


class FrameVerdict(BaseModel):
    """Outcome of the spectral criterion for ``(f(T) e_n)``.

    Attributes:
        verdict: ``RieszBasis``, ``NotFrame`` or ``Inconclusive``.
        criterion_applicable: Whether ``sigma_ap(T*) = sigma(T*)`` is certified for ``T``.
        zero_location: Where ``f`` vanishes relative to ``sigma(T)``.
        witness: A point of ``sigma(T)`` where ``f`` is (numerically) zero.
        notes: Free-form remarks (operator classes, band width, tail bounds).
        sequence_class: What the sequence is, as far as the criterion can tell.
        band_width: Width of the tolerance band used for boundary decisions.
        provenance: Digest of the ``(T, f)`` pair.
    """

    model_config = ConfigDict(frozen=True)

    verdict: Verdict
    criterion_applicable: bool
    zero_location: ZeroLocation
    witness: complex | None = None
    notes: str = ""
    sequence_class: SequenceClass = SequenceClass.UNKNOWN
    band_width: float = 0.0
    provenance: str

    @model_validator(mode="after")
    def _check_consistency(self) -> FrameVerdict:
        if self.verdict is Verdict.RIESZ_BASIS and (
            not self.criterion_applicable or self.zero_location is not ZeroLocation.ABSENT
        ):
            msg = "a Riesz basis verdict needs an applicable criterion and no zero on the spectrum"
            raise ValueError(msg)
        if (
            self.verdict is Verdict.NOT_FRAME
            and self.criterion_applicable
            and (self.zero_location not in {ZeroLocation.INTERIOR, ZeroLocation.BOUNDARY} or self.witness is None)
        ):
            msg = "a NotFrame verdict needs a located zero and a witness"
            raise ValueError(msg)
        return self


def _class_notes(op: OperatorModel) -> list[str]:
    notes = [f"operator {op.kind}"]
    labels = [str(tag) for tag in op.class_tags if tag is not ClassTag.AP_SPECTRUM_OF_ADJOINT]
    if labels:
        notes.append("classes: " + ", ".join(labels))
    return notes


def criterion_verdict(t: OperatorModel, f: Polynomial | PowerSeries, tol: float = DEFAULT_TOL) -> FrameVerdict:
    """Decide whether ``(f(T) e_n)`` is a frame or a Riesz basis from the spectrum of ``T``.

    Without the certified ``sigma_ap(T*) = sigma(T*)`` tag the verdict is ``Inconclusive``.
    Otherwise ``f`` is located on ``sigma(T)``: no zero gives ``RieszBasis`` (refined to an
    orthonormal basis when ``f(T)`` is structurally unitary); a zero inside or on the boundary
    band gives ``NotFrame`` with a witness in ``sigma(T)``. Power series are replaced by their
    truncation and the tail bound widens the band.

    Args:
        t: The operator ``T``.
        f: Polynomial or tail-bounded power series holomorphic on a neighbourhood of ``sigma(T)``.
        tol: Tolerance band for boundary decisions.

    Raises:
        DomainError: If ``sigma(T)`` reaches the radius of convergence of ``f``.
        MethodMismatchError: If root counting and winding numbers disagree.

    Returns:
        FrameVerdict: The verdict with its zero location and witness.
    """
    digest = provenance(t, f)
    notes = _class_notes(t)
    if not t.is_certified():
        notes.append("sigma_ap(T*) = sigma(T*) is not certified for this operator")
        verdict = FrameVerdict(
            verdict=Verdict.INCONCLUSIVE,
            criterion_applicable=False,
            zero_location=ZeroLocation.NOT_APPLICABLE,
            notes="; ".join(notes),
            band_width=tol,
            provenance=digest,
        )
        logger.info("criterion_verdict", verdict=str(verdict.verdict), applicable=False)
        return verdict

    p, tail = polynomial_part(f, t, tol)
    band = tol + tail
    if tail:
        notes.append(f"series tail bound {tail:.3g}")
    search = locate_zero(p, t.spectrum, band)
    if search.location is ZeroLocation.ABSENT:
        unitary = is_unitary(functional_calculus(f, t, tol=tol))
        verdict = FrameVerdict(
            verdict=Verdict.RIESZ_BASIS,
            criterion_applicable=True,
            zero_location=ZeroLocation.ABSENT,
            notes="; ".join(notes),
            sequence_class=SequenceClass.ORTHONORMAL_BASIS if unitary else SequenceClass.RIESZ_BASIS,
            band_width=band,
            provenance=digest,
        )
    else:
        if search.location is ZeroLocation.BOUNDARY:
            notes.append(f"zero within the boundary band of width {band:.3g}")
        verdict = FrameVerdict(
            verdict=Verdict.NOT_FRAME,
            criterion_applicable=True,
            zero_location=search.location,
            witness=search.witness,
            notes="; ".join(notes),
            sequence_class=SequenceClass.NOT_FRAME,
            band_width=band,
            provenance=digest,
        )
    logger.info(
        "criterion_verdict",
        verdict=str(verdict.verdict),
        zero_location=str(verdict.zero_location),
        witness=None if verdict.witness is None else str(verdict.witness),
    )
    return verdict


def _nonincreasing(values: Sequence[float], tol: float) -> bool:
    return all(b <= a + tol * max(1.0, a) for a, b in zip(values, values[1:], strict=False))


def _nondecreasing(values: Sequence[float], tol: float) -> bool:
    return all(b >= a - tol * max(1.0, a) for a, b in zip(values, values[1:], strict=False))


class FrameBoundEstimates(BaseModel):
    """Per-``N`` estimates of the frame bounds of ``(V e_n)``.

    ``lower[i]`` is the squared smallest singular value of the ``N``-section of ``V*``, an upper
    bound of the optimal lower frame bound that decreases towards it; ``upper[i]`` is the squared
    largest singular value of the column truncation of ``V``, a lower bound of the optimal upper
    frame bound that increases towards it. ``bessel_bound`` is the certified upper frame bound.
    """

    model_config = ConfigDict(frozen=True)

    n_list: tuple[int, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    ap_distance_at_zero: tuple[float, ...]
    bessel_bound: float
    tail_bound: float = 0.0
    lower_nonincreasing: bool
    upper_nondecreasing: bool
    bracketed: bool
    provenance: str

    @property
    def final_lower(self) -> float:
        return self.lower[-1]

    @property
    def final_upper(self) -> float:
        return self.upper[-1]


def estimate_frame_bounds(
    v: OperatorModel,
    n_list: Sequence[int] = DEFAULT_N_LIST,
    tol: float = DEFAULT_TOL,
    *,
    workers: int = 1,
) -> FrameBoundEstimates:
    """Sweep the frame-bound estimates of ``(V e_n)`` over ``n_list``.

    Args:
        v: The synthesis operator ``V``, usually ``functional_calculus(f, T)``.
        n_list: Strictly increasing truncation sizes.
        tol: Kernel tolerance, also the slack of the monotonicity flags.
        workers: Threads for the sweep; results do not depend on it.

    Raises:
        ValueError: If ``n_list`` is invalid.

    Returns:
        FrameBoundEstimates: Lower and upper estimates with their flags.
    """
    sizes = check_sizes(n_list)
    dual = adjoint(v)

    def estimate(n: int) -> tuple[float, float, float]:
        lower = ap_distance(dual, 0, n, tol) ** 2
        upper = extremal_singular_value(truncate_columns(v, n), Extremum.LARGEST, tol) ** 2
        return lower, upper, ap_distance(v, 0, n, tol)

    rows = ordered_map(estimate, sizes, workers)
    lower = tuple(row[0] for row in rows)
    upper = tuple(row[1] for row in rows)
    estimates = FrameBoundEstimates(
        n_list=sizes,
        lower=lower,
        upper=upper,
        ap_distance_at_zero=tuple(row[2] for row in rows),
        bessel_bound=norm_bound(v) ** 2,
        tail_bound=v.tail_bound,
        lower_nonincreasing=_nonincreasing(lower, tol),
        upper_nondecreasing=_nondecreasing(upper, tol),
        bracketed=all(a <= b + tol * max(1.0, b) for a, b in zip(lower, upper, strict=True)),
        provenance=v.origin or provenance(v, _IDENTITY),
    )
    logger.info(
        "frame_bounds",
        max_n=sizes[-1],
        lower=estimates.final_lower,
        upper=estimates.final_upper,
        bessel_bound=estimates.bessel_bound,
    )
    return estimates


class SurjectivityEvidence(BaseModel):
    model_config = ConfigDict(frozen=True)

    outcome: SurjectivityOutcome
    n_list: tuple[int, ...]
    values: tuple[float, ...]


def surjectivity_probe(
    op: OperatorModel,
    n_list: Sequence[int] = DEFAULT_N_LIST,
    tol: float = DEFAULT_TOL,
    *,
    stabilization_tol: float = DEFAULT_STABILIZATION_TOL,
    plateau_slope: float = DEFAULT_PLATEAU_SLOPE,
    workers: int = 1,
) -> SurjectivityEvidence:
    """Numerical evidence on whether ``op`` is surjective, i.e. ``op*`` is bounded below.

    Sweeps ``ap_distance(adjoint(op), 0, N)``. A last value at most ``10 * tol`` is
    ``decaying``; a sweep settled above it (see ``is_stabilized``) is
    ``bounded_below_evidence``; a sweep still strictly decreasing at the last size is
    ``decaying``; anything else is ``inconclusive``.
    """
    sizes = check_sizes(n_list)
    dual = adjoint(op)
    values = tuple(ordered_map(lambda n: ap_distance(dual, 0, n, tol), sizes, workers))
    if values[-1] <= 10 * tol:
        outcome = SurjectivityOutcome.DECAYING
    elif is_stabilized(
        values,
        sizes,
        tol=tol,
        stabilization_tol=stabilization_tol,
        plateau_slope=plateau_slope,
    ):
        outcome = SurjectivityOutcome.BOUNDED_BELOW_EVIDENCE
    elif len(values) > 1 and values[-1] < values[-2]:
        outcome = SurjectivityOutcome.DECAYING
    else:
        outcome = SurjectivityOutcome.INCONCLUSIVE
    logger.info("surjectivity_probe", outcome=str(outcome), last=values[-1])
    return SurjectivityEvidence(outcome=outcome, n_list=sizes, values=values)


class CrossValidation(BaseModel):
    model_config = ConfigDict(frozen=True)

    outcome: CrossValidationOutcome
    description: str


def cross_validate(
    verdict: FrameVerdict,
    bounds: FrameBoundEstimates,
    decay_threshold: float = DEFAULT_DECAY_THRESHOLD,
    *,
    tol: float = DEFAULT_TOL,
    stabilization_tol: float = DEFAULT_STABILIZATION_TOL,
    plateau_slope: float = DEFAULT_PLATEAU_SLOPE,
) -> CrossValidation:
    """Compare the symbolic verdict with the lower frame-bound sweep; never overrides the verdict.

    ``NotFrame`` expects the last lower estimate below ``decay_threshold`` or still decreasing
    (relative change above ``tol``). ``RieszBasis`` expects it stabilized above
    ``decay_threshold`` in the sense of ``is_stabilized``. ``Inconclusive`` verdicts have
    nothing to corroborate.

    Raises:
        ProvenanceMismatchError: If the inputs were built from different ``(T, f)`` pairs.
    """
    if verdict.provenance != bounds.provenance:
        raise ProvenanceMismatchError(verdict_source=verdict.provenance, bounds_source=bounds.provenance)
    last = bounds.final_lower
    previous = bounds.lower[-2] if len(bounds.lower) > 1 else None
    quoted = f"lower estimate {last:.6g} at N = {bounds.n_list[-1]}, decay threshold {decay_threshold:.3g}"
    match verdict.verdict:
        case Verdict.NOT_FRAME:
            decreasing = previous is not None and previous - last > tol * previous
            agrees = last < decay_threshold or decreasing
            expected = "NotFrame expects a vanishing or still decreasing lower estimate"
        case Verdict.RIESZ_BASIS:
            agrees = last > decay_threshold and is_stabilized(
                bounds.lower,
                bounds.n_list,
                tol=tol,
                stabilization_tol=stabilization_tol,
                plateau_slope=plateau_slope,
            )
            expected = "RieszBasis expects a lower estimate stabilized above the threshold"
        case _:
            return CrossValidation(
                outcome=CrossValidationOutcome.CONSISTENT,
                description="verdict inconclusive; nothing to corroborate",
            )
    outcome = CrossValidationOutcome.CONSISTENT if agrees else CrossValidationOutcome.TENSION
    if agrees:
        description = f"{verdict.verdict} corroborated: {quoted}"
    else:
        description = f"{expected}; {quoted}"
        logger.warning("cross_validation_tension", verdict=str(verdict.verdict), lower=last)
    return CrossValidation(outcome=outcome, description=description)
