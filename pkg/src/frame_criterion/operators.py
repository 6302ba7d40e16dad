"""Structured bounded operators on l2(N).

Every model has finite bandwidth (shifts, banded Toeplitz, weighted-shift polynomials) or is
diagonal, so its column truncations are exact. Spectra are declared analytically per
structure and carried on the model together with the operator class tags.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from typing import TYPE_CHECKING, Annotated, Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator

from frame_criterion.config import ClassTag, OperatorKind
from frame_criterion.exceptions import UnboundedSequenceError, UnknownOperatorKindError, UnsupportedOperationError
from frame_criterion.functions import Polynomial
from frame_criterion.logging import logger
from frame_criterion.numkernel import ComplexMatrix
from frame_criterion.regions import (
    ClosedDisk,
    ClosureOfSequence,
    FiniteSet,
    LaurentSymbolRegion,
    PolynomialImageOfDisk,
    SpectrumRegion,
)
from frame_criterion.sequences import ConjugateMap, SequenceRule

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

_UNIT_DISK = ClosedDisk(radius=1.0)
_UNIMODULAR_TOL = 4 * float(np.finfo(float).eps)


class RightShift(BaseModel):
    """``S e_n = e_{n+1}``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["right_shift"] = "right_shift"


class LeftShift(BaseModel):
    """``S* e_0 = 0``, ``S* e_n = e_{n-1}``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["left_shift"] = "left_shift"


class BandedToeplitz(BaseModel):
    """``T e_j = sum_k c_k e_{j+k}`` over the finitely many offsets ``k`` (terms with ``j + k < 0`` drop)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["banded_toeplitz"] = "banded_toeplitz"
    diagonals: dict[int, complex] = Field(..., min_length=1)

    @field_validator("diagonals")
    @classmethod
    def _check_finite(cls, value: dict[int, complex]) -> dict[int, complex]:
        if not all(np.isfinite(c) for c in value.values()):
            msg = "diagonal entries must be finite"
            raise ValueError(msg)
        return value

    @property
    def offsets(self) -> tuple[int, int]:
        return min(self.diagonals), max(self.diagonals)


class Diagonal(BaseModel):
    """``D e_n = v_n e_n``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["diagonal"] = "diagonal"
    values: SequenceRule


class WeightedShift(BaseModel):
    """Polynomial ``sum_j a_j W**j`` in the weighted shift ``W e_n = w_n e_{n+1}``.

    With ``adjoint`` set the model is the adjoint of that polynomial. A bare weighted shift
    has ``coefficients = (0, 1)``.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["weighted_shift"] = "weighted_shift"
    weights: SequenceRule
    coefficients: tuple[complex, ...] = Field(default=(0j, 1 + 0j), min_length=1)
    adjoint: bool = False


OperatorStructure = Annotated[
    RightShift | LeftShift | BandedToeplitz | Diagonal | WeightedShift,
    Field(discriminator="kind"),
]
_STRUCTURE_ADAPTER: TypeAdapter[Any] = TypeAdapter(OperatorStructure)


class OperatorModel(BaseModel):
    """Bounded operator with its declared spectrum and class tags.

    Attributes:
        structure: The defining action.
        class_tags: Operator classes the model is known to belong to.
        spectrum: Declared spectrum.
        tail_bound: Operator-norm bound of the error when the model stands for ``f(T)`` with
            ``f`` a truncated power series.
        origin: Digest of the operator and function the model was built from, if any.
    """

    model_config = ConfigDict(frozen=True)

    structure: OperatorStructure
    class_tags: tuple[ClassTag, ...]
    spectrum: SpectrumRegion
    tail_bound: float = 0.0
    origin: str | None = None

    @field_validator("class_tags")
    @classmethod
    def _sort_tags(cls, value: tuple[ClassTag, ...]) -> tuple[ClassTag, ...]:
        return tuple(sorted(set(value)))

    @property
    def kind(self) -> OperatorKind:
        return OperatorKind(self.structure.kind)

    def is_certified(self) -> bool:
        """Whether ``sigma_ap(T*) = sigma(T*)`` is certified for this model."""
        return ClassTag.AP_SPECTRUM_OF_ADJOINT in self.class_tags


def _weight_limit(weights: SequenceRule) -> complex:
    limit = weights.limit()
    if limit is None:
        msg = "weighted shifts need weights converging to a single limit"
        raise UnsupportedOperationError(detail=msg)
    return limit


def _weighted_spectrum(structure: WeightedShift) -> SpectrumRegion:
    limit = _weight_limit(structure.weights)
    polynomial = Polynomial.of(structure.coefficients)
    if limit == 0:
        region: SpectrumRegion = FiniteSet(points=(polynomial.coefficients[0],))
    elif polynomial.degree == 0:
        region = FiniteSet(points=polynomial.coefficients)
    else:
        region = PolynomialImageOfDisk(polynomial=polynomial, base=ClosedDisk(radius=abs(limit)))
    return region.conjugate() if structure.adjoint else region


def _toeplitz_spectrum(structure: BandedToeplitz) -> SpectrumRegion:
    low, high = structure.offsets
    if low == high == 0:
        return FiniteSet(points=(structure.diagonals[0],))
    if low >= 0:
        symbol = Polynomial.of([structure.diagonals.get(k, 0) for k in range(high + 1)])
        return PolynomialImageOfDisk(polynomial=symbol, base=_UNIT_DISK)
    if high <= 0:
        symbol = Polynomial.of([structure.diagonals.get(-k, 0) for k in range(-low + 1)])
        return PolynomialImageOfDisk(polynomial=symbol, base=_UNIT_DISK)
    return LaurentSymbolRegion(diagonals=dict(structure.diagonals))


def declared_spectrum(structure: OperatorStructure) -> SpectrumRegion:
    """Spectrum of a structure, known analytically per kind."""
    match structure:
        case RightShift() | LeftShift():
            return _UNIT_DISK
        case BandedToeplitz():
            return _toeplitz_spectrum(structure)
        case Diagonal(values=values):
            return ClosureOfSequence.of(values)
        case WeightedShift():
            return _weighted_spectrum(structure)
    raise UnknownOperatorKindError(kind=str(getattr(structure, "kind", structure)))


def derive_tags(structure: OperatorStructure) -> tuple[ClassTag, ...]:
    """Operator classes that follow from the structure.

    ``AP_SPECTRUM_OF_ADJOINT`` is certified for diagonal models (normal), the right shift,
    polynomials in the right shift (preserved by the calculus), compact weighted shifts and
    forward weighted shifts with a nonzero weight limit (compact perturbations of ``c S``).
    """
    tags: set[ClassTag] = set()
    match structure:
        case RightShift():
            tags |= {ClassTag.ISOMETRY, ClassTag.AP_SPECTRUM_OF_ADJOINT}
        case BandedToeplitz(diagonals=diagonals):
            low, high = structure.offsets
            if low == high == 0:
                tags |= {ClassTag.NORMAL, ClassTag.AP_SPECTRUM_OF_ADJOINT}
                if abs(abs(diagonals[0]) - 1) <= _UNIMODULAR_TOL:
                    tags.add(ClassTag.ISOMETRY)
            elif low >= 0:
                tags.add(ClassTag.AP_SPECTRUM_OF_ADJOINT)
                if len(diagonals) == 1 and abs(abs(diagonals[high]) - 1) <= _UNIMODULAR_TOL:
                    tags.add(ClassTag.ISOMETRY)
        case Diagonal(values=values):
            tags |= {ClassTag.NORMAL, ClassTag.AP_SPECTRUM_OF_ADJOINT}
            if values.accumulation() == (0j,):
                tags.add(ClassTag.COMPACT)
            if values.is_unimodular():
                tags.add(ClassTag.ISOMETRY)
        case WeightedShift(weights=weights, coefficients=coefficients, adjoint=adjoint):
            limit = _weight_limit(weights)
            if limit == 0:
                tags.add(ClassTag.AP_SPECTRUM_OF_ADJOINT)
                if coefficients[0] == 0:
                    tags.add(ClassTag.COMPACT)
            elif not adjoint:
                tags.add(ClassTag.AP_SPECTRUM_OF_ADJOINT)
    return tuple(sorted(tags))


def model_of(structure: OperatorStructure, *, tail_bound: float = 0.0, origin: str | None = None) -> OperatorModel:
    """Wrap a structure with its declared spectrum and derived class tags."""
    return OperatorModel(
        structure=structure,
        class_tags=derive_tags(structure),
        spectrum=declared_spectrum(structure),
        tail_bound=tail_bound,
        origin=origin,
    )


def make_operator(spec: OperatorStructure | Mapping[str, Any]) -> OperatorModel:
    """Build an operator model from a parsed operator description.

    Args:
        spec: A structure model, or a mapping with a ``kind`` key and the kind's parameters.

    Raises:
        UnknownOperatorKindError: If the kind is not supported.
        UnboundedSequenceError: If a value or weight rule has no finite bound.

    Returns:
        OperatorModel: The model with declared spectrum and class tags.
    """
    if isinstance(spec, Mapping):
        kind = str(spec.get("kind", ""))
        if kind not in {member.value for member in OperatorKind}:
            raise UnknownOperatorKindError(kind=kind)
        structure = _STRUCTURE_ADAPTER.validate_python(dict(spec))
    else:
        structure = spec
    match structure:
        case Diagonal(values=rule) | WeightedShift(weights=rule):
            bound = rule.bound
            if not math.isfinite(bound):
                raise UnboundedSequenceError(detail=f"magnitude bound is {bound}")
            logger.debug("rule_bound", bound=bound)
    model = model_of(structure)
    logger.info("operator_built", kind=str(model.kind), tags=list(model.class_tags))
    return model


def adjoint(op: OperatorModel) -> OperatorModel:
    """Adjoint model; ``adjoint(adjoint(op)) == op``."""
    match op.structure:
        case RightShift():
            structure: OperatorStructure = LeftShift()
        case LeftShift():
            structure = RightShift()
        case BandedToeplitz(diagonals=diagonals):
            structure = BandedToeplitz(diagonals={-k: c.conjugate() for k, c in diagonals.items()})
        case Diagonal(values=values):
            structure = Diagonal(values=values.mapped(ConjugateMap()))
        case WeightedShift() as shift:
            structure = shift.model_copy(update={"adjoint": not shift.adjoint})
        case _:
            raise UnknownOperatorKindError(kind=str(op.kind))
    return OperatorModel(
        structure=structure,
        class_tags=derive_tags(structure),
        spectrum=op.spectrum.conjugate(),
        tail_bound=op.tail_bound,
        origin=op.origin,
    )


def _weighted_diagonals(structure: WeightedShift, n: int) -> dict[int, np.ndarray]:
    """Per-column entries of the weighted-shift polynomial for columns ``0 .. n - 1``."""
    degree = len(structure.coefficients) - 1
    weights = structure.weights.values(np.arange(n + degree))
    diagonals: dict[int, np.ndarray] = {}
    for j, a_j in enumerate(structure.coefficients):
        if not structure.adjoint:
            products = np.ones(n, dtype=np.complex128)
            for step in range(j):
                products = products * weights[step : step + n]
            diagonals[j] = a_j * products
        else:
            columns = np.arange(n)
            sources = np.clip(columns - j, 0, None)
            products = np.ones(n, dtype=np.complex128)
            for step in range(j):
                products = products * weights[sources + step]
            diagonals[-j] = np.where(columns >= j, np.conj(a_j * products), 0)
    return diagonals


def truncate_columns(op: OperatorModel, n: int) -> ComplexMatrix:
    """Exact column truncation.

    Returns the ``(n + u) x n`` matrix whose column ``j`` is the coordinate vector of
    ``op(e_j)``, where ``u`` is the largest positive offset of the band.

    Raises:
        ValueError: If ``n < 1``.
        UnsupportedOperationError: If the model has no finite band.
    """
    if n < 1:
        msg = "truncation size must be at least 1"
        raise ValueError(msg)
    ones = np.ones(n, dtype=np.complex128)
    match op.structure:
        case RightShift():
            diagonals = {1: ones}
        case LeftShift():
            diagonals = {-1: ones}
        case BandedToeplitz(diagonals=entries):
            diagonals = {k: c * ones for k, c in entries.items()}
        case Diagonal(values=values):
            diagonals = {0: values.head(n)}
        case WeightedShift() as shift:
            diagonals = _weighted_diagonals(shift, n)
        case _:
            raise UnsupportedOperationError(detail=f"no finite band for {op.kind}")
    reach = max(0, *diagonals)
    return ComplexMatrix.from_diagonals(n + reach, n, diagonals)


def apply(op: OperatorModel, v: ArrayLike) -> np.ndarray:
    """Image of a finitely supported vector; the support grows by at most the bandwidth."""
    vector = np.atleast_1d(np.asarray(v, dtype=np.complex128))
    if vector.size == 0:
        return vector
    return truncate_columns(op, vector.size).entries @ vector


def norm_bound(op: OperatorModel) -> float:
    """Analytic bound of the operator norm; its square bounds the upper frame bound of ``(op e_n)``."""
    match op.structure:
        case RightShift() | LeftShift():
            return 1.0
        case BandedToeplitz(diagonals=diagonals):
            return float(sum(abs(c) for c in diagonals.values()))
        case Diagonal(values=values):
            return values.bound
        case WeightedShift(weights=weights, coefficients=coefficients):
            return Polynomial.of(np.abs(coefficients)).bound(weights.bound)
    raise UnknownOperatorKindError(kind=str(op.kind))


def is_unitary(op: OperatorModel) -> bool:
    """Structural unitarity: diagonal with unimodular values, or ``c I`` with ``|c| = 1``."""
    match op.structure:
        case Diagonal(values=values):
            return values.is_unimodular()
        case BandedToeplitz(diagonals=diagonals) if set(diagonals) == {0}:
            return abs(abs(diagonals[0]) - 1) <= _UNIMODULAR_TOL
    return False
