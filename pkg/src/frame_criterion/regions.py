"""Spectrum regions.

Computable descriptions of compact nonempty subsets of the plane with three-valued
membership. The ``tol`` band is never collapsed: a decision that could flip by moving ``z``
within ``tol`` is reported as ``Membership.BOUNDARY``.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING, Annotated, Literal

import numpy as np
from numpy.polynomial import polynomial as npoly
from pydantic import BaseModel, ConfigDict, Field

from frame_criterion.config import (
    CONTOUR_ZERO_FACTOR,
    DEFAULT_GRID_BOUNDARY,
    DEFAULT_GRID_INTERIOR,
    DEFAULT_TOL,
    SEQUENCE_SAMPLE_COUNT,
    SEQUENCE_SCAN_CAP,
    WINDING_MAX_DELTA,
    WINDING_MIN_DELTA,
    WINDING_MIN_SAMPLES,
    WINDING_SAMPLE_CAP,
    Membership,
    ZeroInImage,
    ZeroLocation,
)
from frame_criterion.exceptions import (
    ContourThroughZeroError,
    DomainError,
    MethodMismatchError,
    SampleCapError,
)
from frame_criterion.functions import Polynomial, PowerSeries, compose, truncate_series
from frame_criterion.logging import logger
from frame_criterion.numkernel import polynomial_roots
from frame_criterion.sequences import ConjugateMap, PolynomialMap, SequenceRule

if TYPE_CHECKING:
    from collections.abc import Iterable

_MEMBERSHIP_RANK = {Membership.OUTSIDE: 0, Membership.BOUNDARY: 1, Membership.INSIDE: 2}
_LOCATION_RANK = {ZeroLocation.ABSENT: 0, ZeroLocation.BOUNDARY: 1, ZeroLocation.INTERIOR: 2}
_MAX_CONTOUR_ATTEMPTS = 4


def _best(memberships: Iterable[Membership]) -> Membership:
    return max(memberships, key=_MEMBERSHIP_RANK.__getitem__, default=Membership.OUTSIDE)


def _point_membership(distance: float, tol: float) -> Membership:
    if distance <= tol:
        return Membership.INSIDE
    if distance <= 2 * tol:
        return Membership.BOUNDARY
    return Membership.OUTSIDE


def _unique(values: Iterable[complex]) -> tuple[complex, ...]:
    return tuple(dict.fromkeys(complex(v) for v in values))


class ClosedDisk(BaseModel):
    """``{z : |z - center| <= radius}``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["disk"] = "disk"
    center: complex = 0j
    radius: float = Field(..., ge=0)

    def membership(self, z: complex, tol: float) -> Membership:
        distance = abs(z - self.center)
        if distance < self.radius - tol:
            return Membership.INSIDE
        if distance <= self.radius + tol:
            return Membership.BOUNDARY
        return Membership.OUTSIDE

    def conjugate(self) -> ClosedDisk:
        return ClosedDisk(center=self.center.conjugate(), radius=self.radius)

    def spectral_radius_bound(self) -> float:
        return abs(self.center) + self.radius

    def grid(self, boundary: int, interior: int) -> tuple[complex, ...]:
        if self.radius == 0:
            return (self.center,)
        outer = self.center + self.radius * np.exp(2j * np.pi * np.arange(boundary) / boundary)
        inner = self.center + 0.5 * self.radius * np.exp(2j * np.pi * (np.arange(interior) + 0.5) / max(interior, 1))
        return _unique([*outer, *inner])


class FiniteSet(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["finite"] = "finite"
    points: tuple[complex, ...] = Field(..., min_length=1)

    def membership(self, z: complex, tol: float) -> Membership:
        return _point_membership(float(np.min(np.abs(np.asarray(self.points) - z))), tol)

    def conjugate(self) -> FiniteSet:
        return FiniteSet(points=tuple(p.conjugate() for p in self.points))

    def spectral_radius_bound(self) -> float:
        return max(abs(p) for p in self.points)

    def grid(self, boundary: int, interior: int) -> tuple[complex, ...]:
        return self.points[: boundary + interior]


class ClosureOfSequence(BaseModel):
    """Closure of ``{v_n}``: the values together with their declared accumulation points."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["sequence"] = "sequence"
    rule: SequenceRule
    accumulation: tuple[complex, ...] = ()

    @classmethod
    def of(cls, rule: SequenceRule) -> ClosureOfSequence:
        return cls(rule=rule, accumulation=rule.accumulation())

    def membership(self, z: complex, tol: float) -> Membership:
        centres = np.asarray(self.accumulation, dtype=np.complex128)
        to_accumulation = float(np.min(np.abs(centres - z))) if centres.size else math.inf
        best = to_accumulation
        start = 0
        while start < SEQUENCE_SCAN_CAP:
            values = self.rule.values(np.arange(start, start + SEQUENCE_SAMPLE_COUNT))
            best = min(best, float(np.min(np.abs(values - z))))
            start += SEQUENCE_SAMPLE_COUNT
            if best <= tol:
                return Membership.INSIDE
            # Values past ``start`` stay within the tail radius of the accumulation points.
            if to_accumulation - self.rule.tail_radius(start) > 2 * tol:
                return _point_membership(best, tol)
        return Membership.BOUNDARY if best > 2 * tol else _point_membership(best, tol)

    def conjugate(self) -> ClosureOfSequence:
        return ClosureOfSequence(
            rule=self.rule.mapped(ConjugateMap()),
            accumulation=tuple(p.conjugate() for p in self.accumulation),
        )

    def spectral_radius_bound(self) -> float:
        return max([self.rule.bound, *(abs(p) for p in self.accumulation)])

    def grid(self, boundary: int, interior: int) -> tuple[complex, ...]:
        total = boundary + interior
        values = self.rule.head(total)
        return _unique([*self.accumulation, *values])[:total]


class UnionRegion(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["union"] = "union"
    parts: tuple[SpectrumRegion, ...] = Field(..., min_length=1)

    def membership(self, z: complex, tol: float) -> Membership:
        return _best(part.membership(z, tol) for part in self.parts)

    def conjugate(self) -> UnionRegion:
        return UnionRegion(parts=tuple(part.conjugate() for part in self.parts))

    def spectral_radius_bound(self) -> float:
        return max(part.spectral_radius_bound() for part in self.parts)

    def grid(self, boundary: int, interior: int) -> tuple[complex, ...]:
        return _unique(p for part in self.parts for p in part.grid(boundary, interior))


class PolynomialImageOfDisk(BaseModel):
    """``p(disk)``, widened by ``slack`` when ``p`` stands for a truncated series."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["polynomial_image"] = "polynomial_image"
    polynomial: Polynomial
    base: ClosedDisk
    slack: float = Field(default=0.0, ge=0)

    def membership(self, z: complex, tol: float) -> Membership:
        shifted = self.polynomial.minus(z)
        band = tol + self.slack
        if shifted.degree == 0:
            return _point_membership(abs(shifted.coefficients[0]), band)
        try:
            outcome = zero_in_image(shifted, self.base, band)
        except (MethodMismatchError, ContourThroughZeroError, SampleCapError) as exc:
            logger.warning("membership_undecided", z=str(z), error=str(exc))
            return Membership.BOUNDARY
        return {
            ZeroInImage.YES_INTERIOR: Membership.INSIDE,
            ZeroInImage.YES_BOUNDARY: Membership.BOUNDARY,
            ZeroInImage.NO: Membership.OUTSIDE,
        }[outcome]

    def conjugate(self) -> PolynomialImageOfDisk:
        return PolynomialImageOfDisk(
            polynomial=self.polynomial.conjugate(),
            base=self.base.conjugate(),
            slack=self.slack,
        )

    def spectral_radius_bound(self) -> float:
        return self.polynomial.bound(self.base.spectral_radius_bound()) + self.slack

    def grid(self, boundary: int, interior: int) -> tuple[complex, ...]:
        base = np.asarray(self.base.grid(boundary, interior), dtype=np.complex128)
        return _unique(npoly.polyval(base, self.polynomial.array))


class LaurentSymbolRegion(BaseModel):
    """Spectrum of a two-sided banded Toeplitz operator with symbol ``a(w) = sum c_k w**k``.

    That is the symbol curve ``a(T)`` together with every point about which the curve winds.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["laurent"] = "laurent"
    diagonals: dict[int, complex] = Field(..., min_length=1)

    def symbol(self, w: np.ndarray) -> np.ndarray:
        return sum((c * np.power(w, k) for k, c in self.diagonals.items()), np.zeros_like(w))

    def _shifted_polynomial(self, z: complex) -> tuple[Polynomial, int]:
        low = max(0, -min(self.diagonals))
        coefficients = np.zeros(low + max(0, max(self.diagonals)) + 1, dtype=np.complex128)
        for k, c in self.diagonals.items():
            coefficients[k + low] += c
        coefficients[low] -= z
        return Polynomial.of(coefficients), low

    def membership(self, z: complex, tol: float) -> Membership:
        shifted, low = self._shifted_polynomial(z)
        if shifted.degree == 0:
            return _point_membership(abs(shifted.coefficients[0]), tol)
        moduli = np.abs(polynomial_roots(shifted.array))
        if np.any(np.abs(moduli - 1.0) <= tol):
            return Membership.BOUNDARY
        winding = int(np.count_nonzero(moduli < 1.0)) - low
        return Membership.INSIDE if winding else Membership.OUTSIDE

    def conjugate(self) -> LaurentSymbolRegion:
        return LaurentSymbolRegion(diagonals={-k: c.conjugate() for k, c in self.diagonals.items()})

    def spectral_radius_bound(self) -> float:
        return float(sum(abs(c) for c in self.diagonals.values()))

    def grid(self, boundary: int, interior: int) -> tuple[complex, ...]:
        curve = self.symbol(np.exp(2j * np.pi * np.arange(boundary) / boundary))
        centre = complex(np.mean(self.symbol(np.exp(2j * np.pi * np.arange(256) / 256))))
        candidates = [centre] + [centre + s * (p - centre) for s in (0.25, 0.5, 0.75) for p in curve]
        inside = [c for c in candidates if self.membership(c, DEFAULT_TOL) is Membership.INSIDE]
        return _unique([*curve, *inside[:interior]])


class MappedRegion(BaseModel):
    """Image of an arbitrary region under a polynomial."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["mapped"] = "mapped"
    polynomial: Polynomial
    base: SpectrumRegion

    def membership(self, z: complex, tol: float) -> Membership:
        shifted = self.polynomial.minus(z)
        if shifted.degree == 0:
            return _point_membership(abs(shifted.coefficients[0]), tol)
        return _best(self.base.membership(complex(root), tol) for root in polynomial_roots(shifted.array))

    def conjugate(self) -> MappedRegion:
        return MappedRegion(polynomial=self.polynomial.conjugate(), base=self.base.conjugate())

    def spectral_radius_bound(self) -> float:
        return self.polynomial.bound(self.base.spectral_radius_bound())

    def grid(self, boundary: int, interior: int) -> tuple[complex, ...]:
        base = np.asarray(self.base.grid(boundary, interior), dtype=np.complex128)
        return _unique(npoly.polyval(base, self.polynomial.array))


SpectrumRegion = Annotated[
    ClosedDisk
    | FiniteSet
    | ClosureOfSequence
    | UnionRegion
    | PolynomialImageOfDisk
    | LaurentSymbolRegion
    | MappedRegion,
    Field(discriminator="kind"),
]

UnionRegion.model_rebuild()
MappedRegion.model_rebuild()


class ZeroSearch(BaseModel):
    """Where a polynomial vanishes on a region, with a witness point of the region."""

    model_config = ConfigDict(frozen=True)

    location: ZeroLocation
    witness: complex | None = None


def region_membership(region: SpectrumRegion, z: complex, tol: float = DEFAULT_TOL) -> Membership:
    """Decide whether ``z`` is inside, on the boundary band of, or outside ``region``.

    Raises:
        ValueError: If ``tol`` is not positive.
    """
    if tol <= 0:
        msg = "tol must be positive"
        raise ValueError(msg)
    return region.membership(complex(z), tol)


def default_grid(
    region: SpectrumRegion,
    boundary: int = DEFAULT_GRID_BOUNDARY,
    interior: int = DEFAULT_GRID_INTERIOR,
) -> tuple[complex, ...]:
    """Probe points: ``boundary`` points on the boundary and ``interior`` inside, where defined."""
    return region.grid(boundary, interior)


def _as_polynomial(f: Polynomial | PowerSeries, radius: float) -> tuple[Polynomial, float]:
    if isinstance(f, Polynomial):
        return f, 0.0
    if radius >= f.radius:
        raise DomainError(point=radius, radius=f.radius)
    r = radius if radius > 0 else min(1.0, f.radius / 2)
    truncated = truncate_series(f, r, DEFAULT_TOL)
    return truncated.polynomial, truncated.certificate.tail_bound


def image_region(f: Polynomial | PowerSeries, region: SpectrumRegion, *, slack: float = 0.0) -> SpectrumRegion:
    """Image of a region under ``f`` (holomorphic spectral mapping).

    Power series are truncated on the spectral-radius bound of the region first; their tail
    bound widens the result.

    Raises:
        DomainError: If the region reaches the radius of convergence of ``f``.
    """
    polynomial, tail = _as_polynomial(f, region.spectral_radius_bound())
    slack += tail
    if polynomial.is_identity() and slack == 0:
        return region

    def values_of(points: Iterable[complex]) -> np.ndarray:
        return npoly.polyval(np.asarray(points, dtype=np.complex128), polynomial.array)

    match region:
        case FiniteSet(points=points):
            return FiniteSet(points=_unique(values_of(points)))
        case ClosureOfSequence(rule=rule, accumulation=accumulation):
            return ClosureOfSequence(
                rule=rule.mapped(PolynomialMap(coefficients=polynomial.coefficients)),
                accumulation=_unique(values_of(accumulation)),
            )
        case ClosedDisk():
            return PolynomialImageOfDisk(polynomial=polynomial, base=region, slack=slack)
        case PolynomialImageOfDisk(polynomial=inner, base=base, slack=inner_slack):
            lipschitz = PolynomialMap(coefficients=polynomial.coefficients).lipschitz(region.spectral_radius_bound())
            return PolynomialImageOfDisk(
                polynomial=compose(polynomial, inner),
                base=base,
                slack=lipschitz * inner_slack + slack,
            )
        case UnionRegion(parts=parts):
            return UnionRegion(parts=tuple(image_region(polynomial, part, slack=slack) for part in parts))
        case MappedRegion(polynomial=inner, base=base):
            return MappedRegion(polynomial=compose(polynomial, inner), base=base)
    return MappedRegion(polynomial=polynomial, base=region)


def winding_number(
    f: Polynomial,
    circle: ClosedDisk,
    samples: int = WINDING_MIN_SAMPLES,
    *,
    cap: int = WINDING_SAMPLE_CAP,
) -> int:
    """Count the zeros of ``f`` inside ``circle`` by the argument principle.

    The argument of ``f`` is accumulated over equally spaced samples; the sample count is
    doubled while any single step turns by ``pi / 2`` or more.

    Raises:
        ValueError: If ``samples`` is below the minimum or the circle is degenerate.
        ContourThroughZeroError: If ``|f|`` nearly vanishes on a sample.
        SampleCapError: If the sample count would exceed ``cap``.
    """
    if samples < WINDING_MIN_SAMPLES:
        msg = f"samples must be at least {WINDING_MIN_SAMPLES}"
        raise ValueError(msg)
    if circle.radius <= 0:
        msg = "winding contour needs a positive radius"
        raise ValueError(msg)
    coefficients = f.array
    scale = float(npoly.polyval(abs(circle.center) + circle.radius, np.abs(coefficients)))
    count = samples
    while count <= cap:
        theta = 2 * np.pi * np.arange(count) / count
        values = npoly.polyval(circle.center + circle.radius * np.exp(1j * theta), coefficients)
        smallest = float(np.min(np.abs(values)))
        if smallest <= CONTOUR_ZERO_FACTOR * scale:
            raise ContourThroughZeroError(min_modulus=smallest)
        steps = np.angle(np.roll(values, -1) / values)
        if float(np.max(np.abs(steps))) < np.pi / 2:
            return round(float(np.sum(steps)) / (2 * np.pi))
        count *= 2
    raise SampleCapError(samples=count)


def contour_deltas(gaps: np.ndarray, tol: float) -> list[float]:
    """Relative contour offsets for the winding cross-check, best separated first.

    ``gaps`` are the relative distances ``||root - center| / radius - 1|`` of the computed
    roots. Each candidate ``delta`` lies in a root-free interval of ``[0, WINDING_MAX_DELTA]``, at least
    ``max(tol, WINDING_MIN_DELTA)``, so neither circle ``1 -/+ delta`` comes near a root.
    """
    floor = max(tol, WINDING_MIN_DELTA)
    ceiling = max(WINDING_MAX_DELTA, 4 * floor)
    edges = np.unique(np.concatenate([[0.0], gaps[gaps < ceiling], [ceiling]]))
    candidates: list[tuple[float, float]] = []
    for low, high in zip(edges[:-1], edges[1:], strict=True):
        delta = max(float(low + high) / 2, floor)
        separation = min(delta - float(low), float(high) - delta)
        if separation > 0:
            candidates.append((separation, delta))
    candidates.sort(reverse=True)
    return [delta for _, delta in candidates[:_MAX_CONTOUR_ATTEMPTS]]


def _cross_check(f: Polynomial, disk: ClosedDisk, distances: np.ndarray, tol: float) -> None:
    deltas = contour_deltas(np.abs(distances / disk.radius - 1.0), tol)
    failure: ContourThroughZeroError | SampleCapError | None = None
    for delta in deltas:
        inner = ClosedDisk(center=disk.center, radius=disk.radius * (1 - delta))
        outer = ClosedDisk(center=disk.center, radius=disk.radius * (1 + delta))
        try:
            winding = (winding_number(f, inner), winding_number(f, outer))
        except (ContourThroughZeroError, SampleCapError) as exc:
            # Computed roots were off; try the next root-free band.
            failure = exc
            continue
        counts = (
            int(np.count_nonzero(distances < inner.radius)),
            int(np.count_nonzero(distances < outer.radius)),
        )
        if counts != winding:
            raise MethodMismatchError(root_count=counts, winding_count=winding)
        return
    assert failure is not None  # noqa: S101
    raise failure


def _disk_roots(f: Polynomial, disk: ClosedDisk, tol: float) -> tuple[ZeroInImage, np.ndarray]:
    if f.degree == 0:
        outcome = ZeroInImage.YES_INTERIOR if f.is_zero() else ZeroInImage.NO
        return outcome, np.empty(0, dtype=np.complex128)
    roots = polynomial_roots(f.array)
    distances = np.abs(roots - disk.center)
    if disk.radius == 0:
        return (ZeroInImage.YES_BOUNDARY if distances.min() <= tol else ZeroInImage.NO), roots
    _cross_check(f, disk, distances, tol)
    if np.any(distances <= disk.radius * (1 - tol)):
        return ZeroInImage.YES_INTERIOR, roots
    if np.any(distances <= disk.radius * (1 + tol)):
        return ZeroInImage.YES_BOUNDARY, roots
    return ZeroInImage.NO, roots


def zero_in_image(f: Polynomial, disk: ClosedDisk, tol: float = DEFAULT_TOL) -> ZeroInImage:
    """Decide whether ``0`` lies in ``f(disk)``.

    Roots of ``f`` are classified against the disk with a relative ``tol`` band. The interior
    root counts are cross-checked against winding numbers on the circles of radius
    ``(1 -/+ delta) * radius``. ``delta`` is at least ``max(tol, 1e-6)`` and is picked from the
    root moduli so that no computed root lies near either circle.

    Raises:
        MethodMismatchError: If root counting and winding numbers disagree.
    """
    if tol <= 0:
        msg = "tol must be positive"
        raise ValueError(msg)
    outcome, _ = _disk_roots(f, disk, tol)
    return outcome


def _locate_on_disk(f: Polynomial, disk: ClosedDisk, tol: float) -> ZeroSearch:
    if f.is_zero():
        return ZeroSearch(location=ZeroLocation.INTERIOR, witness=disk.center)
    outcome, roots = _disk_roots(f, disk, tol)
    if outcome is ZeroInImage.NO:
        return ZeroSearch(location=ZeroLocation.ABSENT)
    offsets = roots - disk.center
    if outcome is ZeroInImage.YES_INTERIOR:
        return ZeroSearch(location=ZeroLocation.INTERIOR, witness=complex(roots[np.argmin(np.abs(offsets))]))
    nearest = offsets[np.argmin(np.abs(np.abs(offsets) - disk.radius))]
    if abs(nearest) > disk.radius:
        nearest = nearest * disk.radius / abs(nearest)
    return ZeroSearch(location=ZeroLocation.BOUNDARY, witness=complex(disk.center + nearest))


def _locate_by_roots(f: Polynomial, region: SpectrumRegion, tol: float) -> ZeroSearch:
    if f.degree == 0:
        if f.is_zero():
            return ZeroSearch(location=ZeroLocation.INTERIOR, witness=default_grid(region)[0])
        return ZeroSearch(location=ZeroLocation.ABSENT)
    found = ZeroSearch(location=ZeroLocation.ABSENT)
    for root in polynomial_roots(f.array):
        membership = region.membership(complex(root), tol)
        location = {
            Membership.INSIDE: ZeroLocation.INTERIOR,
            Membership.BOUNDARY: ZeroLocation.BOUNDARY,
            Membership.OUTSIDE: ZeroLocation.ABSENT,
        }[membership]
        if _LOCATION_RANK[location] > _LOCATION_RANK[found.location]:
            found = ZeroSearch(location=location, witness=complex(root))
    return found


def locate_zero(f: Polynomial, region: SpectrumRegion, tol: float = DEFAULT_TOL) -> ZeroSearch:
    """Find where ``f`` vanishes on ``region``: interior, boundary band, or absent.

    Disks and polynomial images of disks go through ``zero_in_image`` and its cross-check;
    other regions classify the roots of ``f`` by membership. The witness is a point of the
    region (boundary roots just outside a disk are projected onto its circle).
    """
    match region:
        case ClosedDisk():
            return _locate_on_disk(f, region, tol)
        case PolynomialImageOfDisk(polynomial=inner, base=base, slack=slack):
            found = _locate_on_disk(compose(f, inner), base, tol + slack)
        case MappedRegion(polynomial=inner, base=base):
            found = locate_zero(compose(f, inner), base, tol)
        case UnionRegion(parts=parts):
            searches = [locate_zero(f, part, tol) for part in parts]
            return max(searches, key=lambda s: _LOCATION_RANK[s.location])
        case _:
            return _locate_by_roots(f, region, tol)
    if found.witness is None:
        return found
    return ZeroSearch(location=found.location, witness=complex(npoly.polyval(found.witness, inner.array)))
