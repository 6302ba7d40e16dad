"""Numerical approximate-point-spectrum probes on exact truncations."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import TYPE_CHECKING

from pydantic import BaseModel, ConfigDict

from frame_criterion.config import (
    DEFAULT_DECAY_EXPONENT,
    DEFAULT_N_LIST,
    DEFAULT_PLATEAU_SLOPE,
    DEFAULT_STABILIZATION_TOL,
    DEFAULT_TOL,
    Extremum,
    Membership,
    PointStatus,
    ProbeOutcome,
)
from frame_criterion.logging import logger
from frame_criterion.numkernel import extremal_singular_value
from frame_criterion.operators import OperatorModel, adjoint, truncate_columns
from frame_criterion.regions import default_grid, region_membership

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable, Sequence


def ordered_map[T, R](fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    """Map ``fn`` over ``items`` on up to ``workers`` threads, keeping input order."""
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def check_sizes(n_list: Sequence[int]) -> tuple[int, ...]:
    """Validate a truncation-size list.

    Raises:
        ValueError: If the list is empty, holds a size below 1, or is not strictly increasing.
    """
    sizes = tuple(int(n) for n in n_list)
    if not sizes or min(sizes) < 1:
        msg = "N_list needs at least one positive size"
        raise ValueError(msg)
    if any(b <= a for a, b in zip(sizes, sizes[1:], strict=False)):
        msg = "N_list not increasing"
        raise ValueError(msg)
    return sizes


def ap_distance(op: OperatorModel, lam: complex, n: int, tol: float = DEFAULT_TOL) -> float:
    """``inf ||(T - lam) x||`` over unit vectors supported on ``e_0 .. e_{n-1}``.

    Columns of the truncation are exact, so the value is nonincreasing in ``n`` and tends to
    zero exactly when ``lam`` is in the approximate point spectrum.
    """
    return extremal_singular_value(truncate_columns(op, n).shifted(complex(lam)), Extremum.SMALLEST, tol)


def _loglog_slope(values: Sequence[float], n_list: Sequence[int]) -> float:
    if values[0] <= 0 or values[-1] <= 0:
        return -math.inf
    return math.log(values[-1] / values[0]) / math.log(n_list[-1] / n_list[0])


def is_stabilized(
    values: Sequence[float],
    n_list: Sequence[int],
    *,
    tol: float = DEFAULT_TOL,
    stabilization_tol: float = DEFAULT_STABILIZATION_TOL,
    plateau_slope: float = DEFAULT_PLATEAU_SLOPE,
) -> bool:
    """Whether a sweep has settled above ``10 * tol`` over its last three sizes.

    Settled means a relative change below ``stabilization_tol`` between consecutive sizes, or a
    log-log slope of magnitude at most ``plateau_slope`` (sections of Toeplitz operators
    approach their limit like ``N**-2``, which is flat on that scale).
    """
    window = list(values[-3:])
    sizes = list(n_list[-3:])
    if len(window) < 2 or window[-1] <= 10 * tol:  # noqa: PLR2004
        return False
    change = max(abs(b - a) / max(a, b, tol) for a, b in zip(window, window[1:], strict=False))
    return change < stabilization_tol or abs(_loglog_slope(window, sizes)) <= plateau_slope


def classify_sweep(
    values: Sequence[float],
    n_list: Sequence[int],
    *,
    tol: float = DEFAULT_TOL,
    stabilization_tol: float = DEFAULT_STABILIZATION_TOL,
    decay_exponent: float = DEFAULT_DECAY_EXPONENT,
    plateau_slope: float = DEFAULT_PLATEAU_SLOPE,
) -> PointStatus:
    """Classify a sweep of ``d_N`` values over increasing ``N``.

    ``vanishing``: the last value is at most ``tol``. ``decaying``: strictly decreasing over the
    last three sizes with log-log slope at most ``-decay_exponent``. ``stabilized``: settled
    above ``10 * tol`` in the sense of ``is_stabilized``.
    """
    if values[-1] <= tol:
        return PointStatus.VANISHING
    window = list(values[-3:])
    sizes = list(n_list[-3:])
    if len(window) < 2:  # noqa: PLR2004
        return PointStatus.UNDETERMINED
    decreasing = all(b < a for a, b in zip(window, window[1:], strict=False))
    if decreasing and _loglog_slope(window, sizes) <= -decay_exponent:
        return PointStatus.DECAYING
    if is_stabilized(
        values,
        n_list,
        tol=tol,
        stabilization_tol=stabilization_tol,
        plateau_slope=plateau_slope,
    ):
        return PointStatus.STABILIZED
    return PointStatus.UNDETERMINED


class ProbePoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    point: complex
    membership: Membership
    distances: tuple[float, ...]
    status: PointStatus


class ProbeResult(BaseModel):
    """Outcome of the ``sigma_ap(T*) = sigma(T*)`` probe with its per-point table."""

    model_config = ConfigDict(frozen=True)

    outcome: ProbeOutcome
    witness: complex | None = None
    n_list: tuple[int, ...]
    points: tuple[ProbePoint, ...] = ()
    skipped: int = 0


def probe_ap_equals_spectrum(
    op: OperatorModel,
    grid: Sequence[complex] | None = None,
    n_list: Sequence[int] = DEFAULT_N_LIST,
    tol: float = DEFAULT_TOL,
    *,
    stabilization_tol: float = DEFAULT_STABILIZATION_TOL,
    decay_exponent: float = DEFAULT_DECAY_EXPONENT,
    plateau_slope: float = DEFAULT_PLATEAU_SLOPE,
    workers: int = 1,
) -> ProbeResult:
    """Probe whether ``sigma_ap(T*)`` fills the declared spectrum of ``T*`` on a grid.

    For each grid point inside (or on the boundary of) the declared spectrum of ``T*`` the
    distances ``d_N`` of ``T*`` are swept over ``n_list``. Vanishing or decaying sweeps are
    consistent with membership in ``sigma_ap(T*)``; a sweep settled above ``10 * tol`` is a
    violation witness; anything else is inconclusive. A violation dominates, then
    inconclusive, then consistent. Finite sections cannot refute membership rigorously, so
    ``violation_found`` is evidence, not proof.

    Args:
        op: The operator ``T``.
        grid: Probe points; defaults to ``default_grid`` of the spectrum of ``T*``.
        n_list: Strictly increasing truncation sizes.
        tol: Vanishing threshold and membership tolerance.
        stabilization_tol: Relative change under which a sweep is stabilized.
        decay_exponent: Minimal algebraic decay rate accepted as decaying.
        plateau_slope: Log-log slope magnitude accepted as a plateau.
        workers: Threads for the sweep.

    Raises:
        ValueError: If the grid is empty or ``n_list`` is invalid.

    Returns:
        ProbeResult: Aggregate outcome, witness and per-point table.
    """
    sizes = check_sizes(n_list)
    target = adjoint(op)
    points = tuple(complex(p) for p in (default_grid(target.spectrum) if grid is None else grid))
    if not points:
        msg = "probe grid must be nonempty"
        raise ValueError(msg)
    memberships = [region_membership(target.spectrum, p, tol) for p in points]
    probed = [(p, m) for p, m in zip(points, memberships, strict=True) if m is not Membership.OUTSIDE]
    tasks = [(p, n) for p, _ in probed for n in sizes]
    distances = ordered_map(lambda task: ap_distance(target, task[0], task[1], tol), tasks, workers)

    table: list[ProbePoint] = []
    for index, (point, membership) in enumerate(probed):
        sweep = tuple(distances[index * len(sizes) : (index + 1) * len(sizes)])
        status = classify_sweep(
            sweep,
            sizes,
            tol=tol,
            stabilization_tol=stabilization_tol,
            decay_exponent=decay_exponent,
            plateau_slope=plateau_slope,
        )
        table.append(ProbePoint(point=point, membership=membership, distances=sweep, status=status))

    witness = next((row.point for row in table if row.status is PointStatus.STABILIZED), None)
    if witness is not None:
        outcome = ProbeOutcome.VIOLATION_FOUND
    elif not table or any(row.status is PointStatus.UNDETERMINED for row in table):
        outcome = ProbeOutcome.INCONCLUSIVE
    else:
        outcome = ProbeOutcome.CONSISTENT
    logger.info(
        "ap_spectrum_probe",
        outcome=str(outcome),
        probed=len(table),
        skipped=len(points) - len(table),
        max_n=sizes[-1],
    )
    return ProbeResult(
        outcome=outcome,
        witness=witness,
        n_list=sizes,
        points=tuple(table),
        skipped=len(points) - len(table),
    )
