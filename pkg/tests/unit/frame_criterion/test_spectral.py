from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
import pytest

from frame_criterion.config import Membership, PointStatus, ProbeOutcome
from frame_criterion.operators import BandedToeplitz, Diagonal, LeftShift, OperatorModel, RightShift, model_of
from frame_criterion.sequences import PeriodicTail, SequenceRule
from frame_criterion.spectral import (
    ap_distance,
    check_sizes,
    classify_sweep,
    is_stabilized,
    ordered_map,
    probe_ap_equals_spectrum,
)

if TYPE_CHECKING:
    from pytest_mock import MockerFixture

SHIFT = model_of(RightShift())
BACKWARD = model_of(LeftShift())
SIZES = (50, 100, 200)


@pytest.mark.unit
def test_ordered_map_keeps_input_order() -> None:
    assert ordered_map(lambda x: x * x, range(10), workers=4) == [x * x for x in range(10)]
    assert ordered_map(str, [3, 1], workers=1) == ["3", "1"]


@pytest.mark.unit
@pytest.mark.parametrize(
    ("sizes", "message"),
    [((), "at least one positive size"), ((0, 10), "at least one positive size"), ((10, 10), "not increasing")],
)
def test_check_sizes_rejects_bad_lists(sizes: tuple[int, ...], message: str) -> None:
    with pytest.raises(ValueError, match=message):
        check_sizes(sizes)


@pytest.mark.unit
def test_ap_distance_of_an_isometry() -> None:
    assert ap_distance(SHIFT, 0, 50) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.unit
def test_ap_distance_inside_the_disk_vanishes() -> None:
    assert ap_distance(BACKWARD, 0.5, 40) <= 1e-8


@pytest.mark.unit
def test_ap_distance_outside_the_disk() -> None:
    # Finite sections of S* - 2 satisfy ||M^-1|| < 1, and approach 1 like N**-2.
    value = ap_distance(BACKWARD, 2, 200)

    assert 1.0 - 1e-12 <= value <= 1.0 + 1e-3


@pytest.mark.unit
def test_ap_distance_is_nonincreasing_in_n() -> None:
    values = [ap_distance(BACKWARD, 1, n) for n in (10, 20, 40, 80)]

    assert all(b <= a + 1e-12 for a, b in zip(values, values[1:], strict=False))


@pytest.mark.unit
@pytest.mark.parametrize(
    ("values", "sizes", "expected"),
    [
        ((1e-12,), (10,), PointStatus.VANISHING),
        ((1.0,), (10,), PointStatus.UNDETERMINED),
        ((1 / 50, 1 / 100, 1 / 200), SIZES, PointStatus.DECAYING),
        ((1.0, 1.0, 1.0), SIZES, PointStatus.STABILIZED),
        ((1 + 4e-4, 1 + 1e-4, 1 + 2.5e-5), SIZES, PointStatus.STABILIZED),
        ((1.0, 1.2, 1.5), SIZES, PointStatus.UNDETERMINED),
        ((1.0, 0.87, 0.76), SIZES, PointStatus.UNDETERMINED),
    ],
)
def test_classify_sweep(values: tuple[float, ...], sizes: tuple[int, ...], expected: PointStatus) -> None:
    assert classify_sweep(values, sizes) is expected


@pytest.mark.unit
def test_is_stabilized_needs_a_value_above_the_noise_floor() -> None:
    assert not is_stabilized((1e-10, 1e-10, 1e-10), SIZES, tol=1e-10)
    assert is_stabilized((2.0, 2.0), (10, 20))
    assert not is_stabilized((2.0,), (10,))


@pytest.mark.unit
def test_probe_on_the_right_shift_is_consistent() -> None:
    result = probe_ap_equals_spectrum(SHIFT, n_list=SIZES)

    assert result.outcome is ProbeOutcome.CONSISTENT
    assert result.witness is None
    assert result.skipped == 0
    assert len(result.points) == 24
    boundary = [row for row in result.points if row.membership is Membership.BOUNDARY]
    assert len(boundary) == 16
    assert all(row.status is PointStatus.DECAYING for row in boundary)


@pytest.mark.unit
def test_probe_detects_a_bounded_below_adjoint() -> None:
    result = probe_ap_equals_spectrum(BACKWARD, grid=[0], n_list=SIZES)

    assert result.outcome is ProbeOutcome.VIOLATION_FOUND
    assert result.witness == 0
    assert result.points[0].status is PointStatus.STABILIZED
    assert result.points[0].distances == pytest.approx((1.0, 1.0, 1.0), abs=1e-12)


@pytest.mark.unit
def test_probe_on_a_compact_diagonal_is_consistent() -> None:
    op = model_of(Diagonal(values=SequenceRule.reciprocal()))

    result = probe_ap_equals_spectrum(op, n_list=SIZES)

    assert result.outcome is ProbeOutcome.CONSISTENT
    assert result.points[0].point == 0
    assert result.points[0].status is PointStatus.DECAYING
    assert all(row.status is PointStatus.VANISHING for row in result.points[1:])


@pytest.mark.unit
def test_probe_skips_points_outside_the_spectrum() -> None:
    result = probe_ap_equals_spectrum(SHIFT, grid=[5], n_list=SIZES)

    assert result.outcome is ProbeOutcome.INCONCLUSIVE
    assert result.skipped == 1
    assert result.points == ()


@pytest.mark.unit
def test_probe_needs_a_grid() -> None:
    with pytest.raises(ValueError, match="nonempty"):
        probe_ap_equals_spectrum(SHIFT, grid=[], n_list=SIZES)


@pytest.mark.unit
def test_probe_does_not_depend_on_workers() -> None:
    grid = [0, 0.5, 1, 1j]

    single = probe_ap_equals_spectrum(SHIFT, grid=grid, n_list=SIZES, workers=1)
    threaded = probe_ap_equals_spectrum(SHIFT, grid=grid, n_list=SIZES, workers=3)

    assert single == threaded


@pytest.mark.unit
def test_probe_logs_its_outcome(mocker: MockerFixture) -> None:
    info = mocker.patch("frame_criterion.spectral.logger.info")

    probe_ap_equals_spectrum(BACKWARD, grid=[0], n_list=SIZES)

    info.assert_called_once()
    assert info.call_args.args == ("ap_spectrum_probe",)
    assert info.call_args.kwargs["outcome"] == "violation_found"


@pytest.mark.unit
def test_ap_distance_is_one_lipschitz_in_the_point() -> None:
    rng = np.random.default_rng(5)
    models = [SHIFT, BACKWARD, model_of(BandedToeplitz(diagonals={0: 1, 1: 1}))]

    for op in models:
        points = 1.5 * (rng.uniform(-1, 1, 10) + 1j * rng.uniform(-1, 1, 10))
        for lam, mu in zip(points[:-1], points[1:], strict=True):
            gap = abs(ap_distance(op, lam, 60) - ap_distance(op, mu, 60))
            assert gap <= abs(lam - mu) + 1e-9


@pytest.mark.unit
@pytest.mark.parametrize(
    "op",
    [
        SHIFT,
        model_of(BandedToeplitz(diagonals={0: 1, 1: 1})),
        model_of(Diagonal(values=SequenceRule.reciprocal())),
        model_of(Diagonal(values=SequenceRule(tail=PeriodicTail(pattern=(1, 1j, -1))))),
    ],
    ids=["shift", "one_plus_shift", "compact_diagonal", "periodic_diagonal"],
)
def test_certified_models_never_contradict_their_spectrum(op: OperatorModel) -> None:
    assert op.is_certified()

    result = probe_ap_equals_spectrum(op, n_list=SIZES)

    assert result.outcome is not ProbeOutcome.VIOLATION_FOUND
    inside = [row for row in result.points if row.membership is Membership.INSIDE]
    assert inside
    assert all(row.status is not PointStatus.STABILIZED for row in inside)
