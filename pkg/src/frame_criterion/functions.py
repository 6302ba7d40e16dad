"""Holomorphic functions: polynomials and tail-bounded power series."""

from __future__ import annotations

import math
from typing import TYPE_CHECKING, Annotated, Literal

import numpy as np
from numpy.polynomial import polynomial as npoly
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from frame_criterion.config import DEFAULT_SERIES_DEGREE, MAX_SERIES_DEGREE
from frame_criterion.exceptions import DomainError, TailBoundUnreachableError
from frame_criterion.sequences import ClosedFormExpression

if TYPE_CHECKING:
    from numpy.typing import ArrayLike


class GeometricTailBound(BaseModel):
    """Majorant ``|a_j| <= scale * radius**-j``; converges on ``|z| < radius``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["geometric"] = "geometric"
    scale: float = Field(..., gt=0)
    radius: float = Field(..., gt=0)

    @property
    def radius_of_convergence(self) -> float:
        return self.radius

    def majorant(self, j: np.ndarray) -> np.ndarray:
        return self.scale * np.power(self.radius, -j.astype(np.float64))

    def tail(self, degree: int, r: float) -> float:
        """Bound of ``sum_{j > degree} |a_j| r**j``."""
        q = r / self.radius
        return self.scale * q ** (degree + 1) / (1.0 - q)


class FactorialTailBound(BaseModel):
    """Majorant ``|a_j| <= scale / j!``; entire."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["factorial"] = "factorial"
    scale: float = Field(..., gt=0)

    @property
    def radius_of_convergence(self) -> float:
        return math.inf

    def majorant(self, j: np.ndarray) -> np.ndarray:
        return self.scale / np.exp([math.lgamma(k + 1) for k in j.tolist()])

    def tail(self, degree: int, r: float) -> float:
        """Bound of ``sum_{j > degree} |a_j| r**j`` via ``r**(D+1) e**r / (D+1)!``."""
        if r == 0:
            return 0.0
        return self.scale * math.exp((degree + 1) * math.log(r) + r - math.lgamma(degree + 2))


TailBoundRule = Annotated[GeometricTailBound | FactorialTailBound, Field(discriminator="kind")]


def _trim(coefficients: ArrayLike) -> tuple[complex, ...]:
    values = [complex(c) for c in np.atleast_1d(np.asarray(coefficients, dtype=np.complex128))]
    while len(values) > 1 and values[-1] == 0:
        values.pop()
    return tuple(values) or (0j,)


class Polynomial(BaseModel):
    """Polynomial ``a_0 + a_1 z + ... + a_k z**k`` with ascending coefficients."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["polynomial"] = "polynomial"
    coefficients: tuple[complex, ...] = Field(..., min_length=1)

    @field_validator("coefficients")
    @classmethod
    def _check_coefficients(cls, value: tuple[complex, ...]) -> tuple[complex, ...]:
        if not all(math.isfinite(c.real) and math.isfinite(c.imag) for c in value):
            msg = "coefficients must be finite"
            raise ValueError(msg)
        if len(value) > 1 and value[-1] == 0:
            msg = "leading coefficient must be nonzero"
            raise ValueError(msg)
        return value

    @classmethod
    def of(cls, coefficients: ArrayLike) -> Polynomial:
        """Build a polynomial, dropping vanishing leading coefficients."""
        return cls(coefficients=_trim(coefficients))

    @classmethod
    def identity(cls) -> Polynomial:
        return cls(coefficients=(0j, 1 + 0j))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.coefficients, dtype=np.complex128)

    def is_zero(self) -> bool:
        return self.degree == 0 and self.coefficients[0] == 0

    def is_identity(self) -> bool:
        return self.coefficients == (0, 1)

    def conjugate(self) -> Polynomial:
        """The polynomial with conjugated coefficients."""
        return Polynomial(coefficients=tuple(c.conjugate() for c in self.coefficients))

    def bound(self, radius: float) -> float:
        """Bound of ``|p(z)|`` over ``|z| <= radius``."""
        return float(npoly.polyval(radius, np.abs(self.array)))

    def minus(self, value: complex) -> Polynomial:
        """``p - value``."""
        shifted = list(self.coefficients)
        shifted[0] -= value
        return Polynomial.of(shifted)


class PowerSeries(BaseModel):
    """Power series given by a coefficient rule, a tail-bound rule and a stored degree.

    Coefficients come either from an explicit list (zero beyond its end) or from a closed-form
    expression in ``j``; the tail rule is mandatory and is checked against the coefficients.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["series"] = "series"
    coefficients: tuple[complex, ...] | None = None
    expression: str | None = None
    degree: int = Field(default=DEFAULT_SERIES_DEGREE, ge=0, le=MAX_SERIES_DEGREE)
    tail: TailBoundRule

    @field_validator("expression")
    @classmethod
    def _check_expression(cls, value: str | None) -> str | None:
        if value is not None:
            ClosedFormExpression(value, "j")
        return value

    @model_validator(mode="after")
    def _check_rule(self) -> PowerSeries:
        if (self.coefficients is None) == (self.expression is None):
            msg = "exactly one of coefficients or expression is required"
            raise ValueError(msg)
        size = len(self.coefficients) if self.coefficients is not None else MAX_SERIES_DEGREE + 1
        values = np.abs(self.coefficients_upto(size - 1))
        allowed = self.tail.majorant(np.arange(size)) * (1 + 1e-9)
        if not np.all(np.isfinite(values)) or np.any(values > allowed):
            msg = "coefficients exceed the declared tail bound"
            raise ValueError(msg)
        return self

    @property
    def radius(self) -> float:
        """Radius of convergence."""
        return self.tail.radius_of_convergence

    def coefficients_upto(self, degree: int) -> np.ndarray:
        """Coefficients ``a_0 .. a_degree``."""
        if self.coefficients is not None:
            values = np.zeros(degree + 1, dtype=np.complex128)
            count = min(len(self.coefficients), degree + 1)
            values[:count] = self.coefficients[:count]
            return values
        assert self.expression is not None  # noqa: S101
        return ClosedFormExpression(self.expression, "j")(np.arange(degree + 1))

    def tail_bound(self, r: float, degree: int | None = None) -> float:
        """Bound of the truncation error ``sum_{j > D} |a_j| r**j``."""
        return self.tail.tail(self.degree if degree is None else degree, r)


HoloFunction = Annotated[Polynomial | PowerSeries, Field(discriminator="kind")]


class TailCertificate(BaseModel):
    """Record of a series truncation: radius, requested accuracy, degree and achieved bound."""

    model_config = ConfigDict(frozen=True)

    radius: float
    eps: float
    degree: int
    tail_bound: float


class TruncatedSeries(BaseModel):
    model_config = ConfigDict(frozen=True)

    polynomial: Polynomial
    certificate: TailCertificate


def evaluate(f: Polynomial | PowerSeries, z: ArrayLike) -> complex | np.ndarray:
    """Evaluate ``f`` at ``z`` by Horner's scheme on the stored coefficients.

    For power series the value carries an error of at most ``f.tail_bound(|z|)``.

    Raises:
        DomainError: If ``|z|`` is not below the radius of convergence of a power series.
    """
    points = np.asarray(z, dtype=np.complex128)
    if isinstance(f, PowerSeries):
        largest = float(np.max(np.abs(points))) if points.size else 0.0
        if largest >= f.radius:
            raise DomainError(point=largest, radius=f.radius)
        coefficients = f.coefficients_upto(f.degree)
    else:
        coefficients = f.array
    values = npoly.polyval(points, coefficients)
    return complex(values) if values.ndim == 0 else values


def truncate_series(f: Polynomial | PowerSeries, r: float, eps: float) -> TruncatedSeries:
    """Truncate a power series to the smallest degree whose tail on ``|z| <= r`` is below ``eps``.

    Args:
        f: Series to truncate; polynomials come back unchanged with a zero tail.
        r: Radius of the disk the truncation must be accurate on, ``0 < r < R``.
        eps: Requested tail bound.

    Raises:
        DomainError: If ``r`` is not in ``(0, R)``.
        TailBoundUnreachableError: If no degree up to the cap reaches ``eps``.

    Returns:
        TruncatedSeries: The polynomial and its tail certificate.
    """
    if isinstance(f, Polynomial):
        return TruncatedSeries(
            polynomial=f,
            certificate=TailCertificate(radius=r, eps=eps, degree=f.degree, tail_bound=0.0),
        )
    if not 0 < r < f.radius:
        raise DomainError(point=r, radius=f.radius)
    for degree in range(MAX_SERIES_DEGREE + 1):
        bound = f.tail_bound(r, degree)
        if bound <= eps:
            return TruncatedSeries(
                polynomial=Polynomial.of(f.coefficients_upto(degree)),
                certificate=TailCertificate(radius=r, eps=eps, degree=degree, tail_bound=bound),
            )
    raise TailBoundUnreachableError(eps=eps, achieved=f.tail_bound(r, MAX_SERIES_DEGREE), degree=MAX_SERIES_DEGREE)


def compose(outer: Polynomial, inner: Polynomial) -> Polynomial:
    """Coefficients of ``outer(inner(z))``."""
    result = np.zeros(1, dtype=np.complex128)
    for coefficient in reversed(outer.coefficients):
        result = npoly.polyadd(npoly.polymul(result, inner.array), [coefficient])
    return Polynomial.of(result)

