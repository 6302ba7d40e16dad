from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
import pytest

from frame_criterion.config import ClassTag, OperatorKind, PointStatus, ProbeOutcome
from frame_criterion.exceptions import UnboundedSequenceError, UnknownOperatorKindError, UnsupportedOperationError
from frame_criterion.operators import (
    BandedToeplitz,
    Diagonal,
    LeftShift,
    OperatorModel,
    RightShift,
    WeightedShift,
    adjoint,
    apply,
    declared_spectrum,
    is_unitary,
    make_operator,
    model_of,
    norm_bound,
    truncate_columns,
)
from frame_criterion.regions import ClosedDisk, ClosureOfSequence, LaurentSymbolRegion, PolynomialImageOfDisk
from frame_criterion.sequences import GeometricTail, PeriodicTail, SequenceRule
from frame_criterion.spectral import probe_ap_equals_spectrum

if TYPE_CHECKING:
    from pytest_mock import MockerFixture


def _operators() -> list[OperatorModel]:
    return [
        model_of(RightShift()),
        model_of(LeftShift()),
        model_of(BandedToeplitz(diagonals={0: 1, 1: 2 - 1j})),
        model_of(BandedToeplitz(diagonals={-1: 1j, 2: 3})),
        model_of(Diagonal(values=SequenceRule.reciprocal())),
        model_of(WeightedShift(weights=SequenceRule.reciprocal(), coefficients=(1, 2, 1j))),
    ]


@pytest.mark.unit
def test_make_operator_from_a_mapping() -> None:
    op = make_operator({"kind": "right_shift"})

    assert op.kind is OperatorKind.RIGHT_SHIFT
    assert op.spectrum == ClosedDisk(radius=1.0)
    assert op.is_certified()


@pytest.mark.unit
def test_make_operator_rejects_unknown_kinds() -> None:
    with pytest.raises(UnknownOperatorKindError, match="'bilateral_shift'"):
        make_operator({"kind": "bilateral_shift"})


@pytest.mark.unit
def test_make_operator_rejects_unbounded_rules() -> None:
    with pytest.raises(UnboundedSequenceError):
        make_operator({"kind": "diagonal", "values": {"tail": {"kind": "geometric", "ratio": 2}}})


@pytest.mark.unit
def test_unbounded_rules_are_rejected_without_debug_logging(mocker: MockerFixture) -> None:
    debug = mocker.patch("frame_criterion.operators.logger.debug")

    with pytest.raises(UnboundedSequenceError, match="modulus above 1"):
        make_operator({"kind": "weighted_shift", "weights": {"tail": {"kind": "geometric", "ratio": 3}}})
    debug.assert_not_called()


@pytest.mark.unit
def test_weighted_shift_needs_converging_weights() -> None:
    with pytest.raises(UnsupportedOperationError, match="single limit"):
        make_operator(WeightedShift(weights=SequenceRule(tail=PeriodicTail(pattern=(1, 2)))))


@pytest.mark.unit
def test_class_tags() -> None:
    shift = model_of(RightShift())
    diagonal = model_of(Diagonal(values=SequenceRule.reciprocal()))
    backward = model_of(WeightedShift(weights=SequenceRule.constant(1), adjoint=True))

    assert set(shift.class_tags) == {ClassTag.ISOMETRY, ClassTag.AP_SPECTRUM_OF_ADJOINT}
    assert set(diagonal.class_tags) == {ClassTag.NORMAL, ClassTag.COMPACT, ClassTag.AP_SPECTRUM_OF_ADJOINT}
    assert not model_of(LeftShift()).is_certified()
    assert not backward.is_certified()


@pytest.mark.unit
def test_declared_spectra() -> None:
    assert isinstance(declared_spectrum(Diagonal(values=SequenceRule.reciprocal())), ClosureOfSequence)
    assert isinstance(declared_spectrum(BandedToeplitz(diagonals={0: 1, 1: 1})), PolynomialImageOfDisk)
    assert isinstance(declared_spectrum(BandedToeplitz(diagonals={-1: 1, 1: 1})), LaurentSymbolRegion)


@pytest.mark.unit
@pytest.mark.parametrize("op", _operators(), ids=lambda op: str(op.kind))
def test_adjoint_is_an_involution(op: OperatorModel) -> None:
    assert adjoint(adjoint(op)) == op


@pytest.mark.unit
def test_adjoint_conjugates_the_spectrum() -> None:
    op = model_of(Diagonal(values=SequenceRule.constant(1 + 2j)))

    assert adjoint(op).spectrum.membership(1 - 2j, 1e-10).value == "inside"


@pytest.mark.unit
@pytest.mark.parametrize("op", _operators()[:4], ids=lambda op: str(op.kind))
def test_adjoint_inner_product_identity_is_exact(op: OperatorModel) -> None:
    rng = np.random.default_rng(5)
    n = 12
    x = rng.integers(-4, 5, n) + 1j * rng.integers(-4, 5, n)
    image = apply(op, x)
    y = rng.integers(-4, 5, image.size) + 1j * rng.integers(-4, 5, image.size)

    lhs = np.vdot(y, image)
    rhs = np.vdot(apply(adjoint(op), y)[:n], x)

    assert lhs == rhs


@pytest.mark.unit
@pytest.mark.parametrize("op", _operators()[4:], ids=lambda op: str(op.kind))
def test_adjoint_inner_product_identity_for_weighted_models(op: OperatorModel) -> None:
    rng = np.random.default_rng(6)
    n = 12
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    image = apply(op, x)
    y = rng.standard_normal(image.size) + 1j * rng.standard_normal(image.size)

    assert np.vdot(y, image) == pytest.approx(np.vdot(apply(adjoint(op), y)[:n], x), abs=1e-12)


@pytest.mark.unit
def test_truncation_shapes() -> None:
    shift = truncate_columns(model_of(RightShift()), 5)

    assert (shift.rows, shift.cols) == (6, 5)
    assert truncate_columns(model_of(LeftShift()), 5).rows == 5
    assert truncate_columns(model_of(BandedToeplitz(diagonals={-1: 1, 2: 3})), 5).rows == 7


@pytest.mark.unit
def test_truncation_size_must_be_positive() -> None:
    with pytest.raises(ValueError, match="at least 1"):
        truncate_columns(model_of(RightShift()), 0)


@pytest.mark.unit
def test_apply_shifts() -> None:
    np.testing.assert_array_equal(apply(model_of(RightShift()), [1]), [0, 1])
    np.testing.assert_array_equal(apply(model_of(LeftShift()), [1, 0]), [0, 0])
    np.testing.assert_array_equal(apply(model_of(LeftShift()), [0, 1]), [1, 0])


@pytest.mark.unit
def test_apply_weighted_shift_adjoint() -> None:
    shift = WeightedShift(weights=SequenceRule.constant(2), coefficients=(-1j, 1), adjoint=True)

    np.testing.assert_allclose(apply(model_of(shift), [0, 1]), [2, 1j])


@pytest.mark.unit
def test_norm_bounds() -> None:
    assert norm_bound(model_of(RightShift())) == 1.0
    assert norm_bound(model_of(BandedToeplitz(diagonals={0: -2, 1: 1}))) == 3.0
    assert norm_bound(model_of(Diagonal(values=SequenceRule.reciprocal()))) == 1.0


@pytest.mark.unit
def test_structural_unitarity() -> None:
    assert is_unitary(model_of(Diagonal(values=SequenceRule(tail=PeriodicTail(pattern=(1, 1j))))))
    assert is_unitary(model_of(BandedToeplitz(diagonals={0: -1})))
    assert not is_unitary(model_of(RightShift()))
    assert not is_unitary(model_of(Diagonal(values=SequenceRule(tail=GeometricTail(ratio=0.5)))))


def _padded(vector: np.ndarray, size: int) -> np.ndarray:
    return np.concatenate([vector, np.zeros(size - vector.size, dtype=np.complex128)])


@pytest.mark.unit
def test_right_shift_is_an_isometry() -> None:
    rng = np.random.default_rng(1)
    shift = model_of(RightShift())

    for size in (1, 7, 60):
        v = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        assert np.linalg.norm(apply(shift, v)) == pytest.approx(np.linalg.norm(v), rel=1e-14)


@pytest.mark.unit
def test_right_shift_is_not_normal() -> None:
    shift, backward = model_of(RightShift()), model_of(LeftShift())

    forward_then_back = apply(shift, apply(backward, [1]))
    back_then_forward = apply(backward, apply(shift, [1]))

    size = max(forward_then_back.size, back_then_forward.size)
    commutator = _padded(forward_then_back, size) - _padded(back_then_forward, size)
    assert np.linalg.norm(commutator) == 1.0


@pytest.mark.unit
@pytest.mark.parametrize("op", _operators(), ids=lambda op: str(op.kind))
def test_truncation_is_the_leading_block_of_the_next_one(op: OperatorModel) -> None:
    for n in (1, 4, 9):
        block = truncate_columns(op, n).to_dense()
        larger = truncate_columns(op, n + 1).to_dense()

        np.testing.assert_allclose(larger[: block.shape[0], :n], block, rtol=0, atol=1e-15)
        np.testing.assert_array_equal(larger[block.shape[0] :, :n], 0)


@pytest.mark.unit
def test_declared_spectrum_of_the_shift_matches_the_approximate_point_spectrum() -> None:
    rng = np.random.default_rng(20)
    interior = rng.uniform(0, 0.9, 12) * np.exp(2j * np.pi * rng.random(12))
    boundary = np.exp(2j * np.pi * (np.arange(8) + 0.25) / 8)
    grid = [complex(p) for p in (*interior, *boundary)]

    result = probe_ap_equals_spectrum(model_of(RightShift()), grid=grid, n_list=(50, 100, 200))

    assert result.outcome is ProbeOutcome.CONSISTENT
    assert len(result.points) == 20
    assert all(row.status in {PointStatus.VANISHING, PointStatus.DECAYING} for row in result.points)
