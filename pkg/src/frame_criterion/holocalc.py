"""Holomorphic functional calculus on structured operator models.

``f(T)`` is computed structurally: composition of symbols for Toeplitz models, pointwise maps
for diagonals, polynomial composition for weighted shifts. Power series are truncated first
with a certified tail bound.
"""

from __future__ import annotations

import hashlib

from frame_criterion.config import DEFAULT_TOL
from frame_criterion.exceptions import DomainError, UnsupportedOperationError
from frame_criterion.functions import Polynomial, PowerSeries, compose, truncate_series
from frame_criterion.logging import logger
from frame_criterion.operators import (
    BandedToeplitz,
    Diagonal,
    LeftShift,
    OperatorModel,
    OperatorStructure,
    RightShift,
    WeightedShift,
    derive_tags,
    norm_bound,
)
from frame_criterion.regions import image_region
from frame_criterion.sequences import PolynomialMap


def provenance(op: OperatorModel, f: Polynomial | PowerSeries) -> str:
    """SHA-256 digest identifying the pair ``(T, f)``."""
    payload = f"{op.model_dump_json(exclude={'origin'})}|{f.model_dump_json()}"
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def polynomial_part(f: Polynomial | PowerSeries, op: OperatorModel, eps: float = DEFAULT_TOL) -> tuple[Polynomial, float]:
    """Polynomial standing for ``f`` on ``op`` and the operator-norm bound of the remainder.

    Series are truncated on the disk of radius ``norm_bound(op)`` when it lies inside the disk
    of convergence, which makes the tail bound a bound on ``||f(T) - p(T)||``; otherwise on the
    spectral-radius bound.

    Raises:
        DomainError: If the spectral radius of ``op`` reaches the radius of convergence.
    """
    if isinstance(f, Polynomial):
        return f, 0.0
    spectral_radius = op.spectrum.spectral_radius_bound()
    if spectral_radius >= f.radius:
        raise DomainError(point=spectral_radius, radius=f.radius)
    bound = norm_bound(op)
    r = bound if 0 < bound < f.radius else spectral_radius
    if r <= 0:
        r = min(1.0, f.radius / 2)
    truncated = truncate_series(f, r, eps)
    logger.debug(
        "series_truncated",
        radius=truncated.certificate.radius,
        degree=truncated.certificate.degree,
        tail_bound=truncated.certificate.tail_bound,
    )
    return truncated.polynomial, truncated.certificate.tail_bound


def _toeplitz_image(p: Polynomial, diagonals: dict[int, complex]) -> dict[int, complex]:
    low, high = min(diagonals), max(diagonals)
    if low >= 0:
        symbol = Polynomial.of([diagonals.get(k, 0) for k in range(high + 1)])
        return _as_diagonals(compose(p, symbol), sign=1)
    if high <= 0:
        symbol = Polynomial.of([diagonals.get(-k, 0) for k in range(-low + 1)])
        return _as_diagonals(compose(p, symbol), sign=-1)
    if p.degree > 1:
        msg = "only affine functions apply to two-sided Toeplitz models"
        raise UnsupportedOperationError(detail=msg)
    a0, a1 = (*p.coefficients, 0j)[:2]
    image = {k: a1 * c for k, c in diagonals.items()}
    image[0] = image.get(0, 0j) + a0
    return {k: c for k, c in image.items() if c != 0} or {0: 0j}


def _as_diagonals(p: Polynomial, sign: int) -> dict[int, complex]:
    diagonals = {sign * j: c for j, c in enumerate(p.coefficients) if c != 0}
    return diagonals or {0: 0j}


def _apply_polynomial(p: Polynomial, structure: OperatorStructure) -> OperatorStructure:
    match structure:
        case RightShift():
            return BandedToeplitz(diagonals=_as_diagonals(p, sign=1))
        case LeftShift():
            return BandedToeplitz(diagonals=_as_diagonals(p, sign=-1))
        case BandedToeplitz(diagonals=diagonals):
            return BandedToeplitz(diagonals=_toeplitz_image(p, diagonals))
        case Diagonal(values=values):
            return Diagonal(values=values.mapped(PolynomialMap(coefficients=p.coefficients)))
        case WeightedShift(coefficients=coefficients, adjoint=adjoint):
            inner = Polynomial.of(coefficients)
            # f(h(W)*) = (conj(f) o h)(W)*
            outer = p.conjugate() if adjoint else p
            return structure.model_copy(update={"coefficients": compose(outer, inner).coefficients})
    msg = f"no functional calculus for {structure!r}"
    raise UnsupportedOperationError(detail=msg)


def functional_calculus(f: Polynomial | PowerSeries, op: OperatorModel, *, tol: float = DEFAULT_TOL) -> OperatorModel:
    """Build the model of ``f(T)``.

    The spectrum of the result is ``image_region(f, spectrum(T))``; the certified
    ``sigma_ap = sigma`` tag carries over from ``T``. The result records the digest of
    ``(T, f)`` as its origin.

    Args:
        f: Polynomial or tail-bounded power series.
        op: The operator ``T``.
        tol: Truncation accuracy for power series.

    Raises:
        DomainError: If the spectral radius of ``T`` reaches the radius of convergence of ``f``.
        UnsupportedOperationError: If ``f`` is not affine and ``T`` is a two-sided Toeplitz model.

    Returns:
        OperatorModel: The model of ``f(T)``.
    """
    origin = provenance(op, f)
    p, tail = polynomial_part(f, op, tol)
    if p.is_identity() and tail == 0:
        return op.model_copy(update={"origin": origin})
    structure = _apply_polynomial(p, op.structure)
    model = OperatorModel(
        structure=structure,
        class_tags=derive_tags(structure),
        spectrum=image_region(p, op.spectrum, slack=tail),
        tail_bound=op.tail_bound + tail,
        origin=origin,
    )
    logger.info("functional_calculus", kind=str(model.kind), degree=p.degree, tail_bound=model.tail_bound)
    return model
