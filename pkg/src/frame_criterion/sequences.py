"""Complex sequence rules.

A ``SequenceRule`` describes an infinite bounded sequence ``(v_n)_{n >= 0}`` by an explicit
prefix, a tail rule evaluated at the global index ``n`` and an optional chain of value maps
(polynomials and complex conjugation). Rules are used for diagonal entries and shift weights.
"""

from __future__ import annotations

import ast
import math
from functools import cached_property
from typing import TYPE_CHECKING, Annotated, Literal

import numpy as np
import scipy.special as sps
from numpy.polynomial import polynomial as npoly
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from frame_criterion.config import SEQUENCE_SAMPLE_COUNT
from frame_criterion.exceptions import UnboundedSequenceError, UnsupportedOperationError

if TYPE_CHECKING:
    from collections.abc import Callable

    from numpy.typing import ArrayLike

_FUNCTIONS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "exp": np.exp,
    "sqrt": np.sqrt,
    "sin": np.sin,
    "cos": np.cos,
    "log": np.log,
    "abs": np.abs,
    "factorial": lambda x: sps.gamma(x + 1),
}
_CONSTANTS = {"pi": math.pi, "e": math.e}
_BINARY: dict[type[ast.operator], Callable[[np.ndarray, np.ndarray], np.ndarray]] = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.divide,
    ast.Pow: np.power,
}


class ClosedFormExpression:
    """Closed-form formula in a single index variable, evaluated with numpy.

    Only numbers, the index variable, ``pi``, ``e``, the arithmetic operators and the
    functions ``exp, sqrt, sin, cos, log, abs, factorial`` are accepted; complex literals are
    written ``2j``.
    """

    def __init__(self, formula: str, variable: str) -> None:
        try:
            tree = ast.parse(formula, mode="eval")
        except SyntaxError as exc:
            msg = f"invalid formula {formula!r}: {exc.msg}"
            raise ValueError(msg) from exc
        self._variable = variable
        self._check(tree.body)
        self._tree = tree.body

    def _check(self, node: ast.AST) -> None:
        match node:
            case ast.Constant(value=value) if isinstance(value, int | float | complex) and not isinstance(value, bool):
                return
            case ast.Name(id=name) if name == self._variable or name in _CONSTANTS:
                return
            case ast.BinOp(left=left, op=op, right=right) if type(op) in _BINARY:
                self._check(left)
                self._check(right)
            case ast.UnaryOp(op=ast.USub() | ast.UAdd(), operand=operand):
                self._check(operand)
            case ast.Call(func=ast.Name(id=name), args=[arg], keywords=[]) if name in _FUNCTIONS:
                self._check(arg)
            case _:
                msg = f"unsupported expression element: {ast.unparse(node)!r}"
                raise ValueError(msg)

    def _evaluate(self, node: ast.AST, index: np.ndarray) -> np.ndarray:
        match node:
            case ast.Constant(value=value):
                return np.full(index.shape, value, dtype=np.complex128 if isinstance(value, complex) else np.float64)
            case ast.Name(id=name) if name == self._variable:
                return index
            case ast.Name(id=name):
                return np.full(index.shape, _CONSTANTS[name])
            case ast.BinOp(left=left, op=op, right=right):
                return _BINARY[type(op)](self._evaluate(left, index), self._evaluate(right, index))
            case ast.UnaryOp(op=ast.USub(), operand=operand):
                return -self._evaluate(operand, index)
            case ast.UnaryOp(operand=operand):
                return self._evaluate(operand, index)
            case ast.Call(func=ast.Name(id=name), args=[arg]):
                return np.asarray(_FUNCTIONS[name](self._evaluate(arg, index)))
        msg = f"unsupported expression element: {ast.unparse(node)!r}"
        raise ValueError(msg)

    def __call__(self, index: ArrayLike) -> np.ndarray:
        """Evaluate the formula at every index."""
        points = np.asarray(index, dtype=np.float64)
        with np.errstate(all="ignore"):
            return np.asarray(self._evaluate(self._tree, points), dtype=np.complex128)


class ConstantTail(BaseModel):
    """``v_n = value``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["constant"] = "constant"
    value: complex


class GeometricTail(BaseModel):
    """``v_n = start * ratio**n``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["geometric"] = "geometric"
    start: complex = 1.0
    ratio: complex


class ReciprocalTail(BaseModel):
    """``v_n = scale / (n + offset)``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["reciprocal"] = "reciprocal"
    scale: complex = 1.0
    offset: float = Field(default=1.0, gt=0)


class PeriodicTail(BaseModel):
    """``v_n = pattern[n mod len(pattern)]``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["periodic"] = "periodic"
    pattern: tuple[complex, ...] = Field(..., min_length=1)


class ExpressionTail(BaseModel):
    """Closed-form tail with a declared magnitude bound and accumulation points."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["expression"] = "expression"
    formula: str
    bound: float = Field(..., gt=0)
    accumulation: tuple[complex, ...] = ()

    @field_validator("formula")
    @classmethod
    def _check_formula(cls, value: str) -> str:
        ClosedFormExpression(value, "n")
        return value


TailRule = Annotated[
    ConstantTail | GeometricTail | ReciprocalTail | PeriodicTail | ExpressionTail,
    Field(discriminator="kind"),
]


class PolynomialMap(BaseModel):
    """Apply a polynomial (ascending coefficients) to every value."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["polynomial"] = "polynomial"
    coefficients: tuple[complex, ...] = Field(..., min_length=1)

    def __call__(self, values: np.ndarray) -> np.ndarray:
        return npoly.polyval(values, np.asarray(self.coefficients, dtype=np.complex128))

    def bound(self, radius: float) -> float:
        """Bound of ``|p(z)|`` over ``|z| <= radius``."""
        return float(npoly.polyval(radius, np.abs(self.coefficients)))

    def lipschitz(self, radius: float) -> float:
        """Bound of ``|p'(z)|`` over ``|z| <= radius``."""
        slope = npoly.polyder(np.abs(np.asarray(self.coefficients, dtype=np.complex128)))
        return float(np.abs(npoly.polyval(radius, slope))) if slope.size else 0.0


class ConjugateMap(BaseModel):
    """Complex conjugation."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["conjugate"] = "conjugate"

    def __call__(self, values: np.ndarray) -> np.ndarray:
        return np.conj(values)

    def bound(self, radius: float) -> float:
        return radius

    def lipschitz(self, radius: float) -> float:  # noqa: ARG002
        return 1.0


ValueMap = Annotated[PolynomialMap | ConjugateMap, Field(discriminator="kind")]


class SequenceRule(BaseModel):
    """Bounded complex sequence: explicit prefix, tail rule and value maps.

    The tail rule is evaluated at the global index, so ``v_n`` for ``n >= len(prefix)`` is
    ``tail(n)`` pushed through ``maps`` in order. Prefix values go through the maps as well.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    prefix: tuple[complex, ...] = ()
    tail: TailRule
    maps: tuple[ValueMap, ...] = ()

    @model_validator(mode="after")
    def _check_finite(self) -> SequenceRule:
        if not all(math.isfinite(abs(v)) for v in self.prefix):
            msg = "prefix values must be finite"
            raise ValueError(msg)
        return self

    @classmethod
    def constant(cls, value: complex) -> SequenceRule:
        """The constant sequence."""
        return cls(tail=ConstantTail(value=value))

    @classmethod
    def reciprocal(cls, scale: complex = 1.0, offset: float = 1.0) -> SequenceRule:
        """``scale / (n + offset)``."""
        return cls(tail=ReciprocalTail(scale=scale, offset=offset))

    def _tail_values(self, index: np.ndarray) -> np.ndarray:
        n = index.astype(np.float64)
        match self.tail:
            case ConstantTail(value=value):
                return np.full(index.shape, value, dtype=np.complex128)
            case GeometricTail(start=start, ratio=ratio):
                return start * np.power(complex(ratio), n)
            case ReciprocalTail(scale=scale, offset=offset):
                return scale / (n + offset)
            case PeriodicTail(pattern=pattern):
                return np.asarray(pattern, dtype=np.complex128)[index % len(pattern)]
            case ExpressionTail(formula=formula):
                return ClosedFormExpression(formula, "n")(n)
        msg = f"unsupported tail rule {self.tail!r}"
        raise UnsupportedOperationError(detail=msg)

    def _base_values(self, index: np.ndarray) -> np.ndarray:
        values = self._tail_values(index).astype(np.complex128)
        if self.prefix:
            head = index < len(self.prefix)
            values[head] = np.asarray(self.prefix, dtype=np.complex128)[index[head]]
        return values

    def _apply_maps(self, values: np.ndarray) -> np.ndarray:
        for value_map in self.maps:
            values = value_map(values)
        return values

    def values(self, index: ArrayLike) -> np.ndarray:
        """Evaluate the sequence at nonnegative integer indices."""
        points = np.atleast_1d(np.asarray(index, dtype=np.int64))
        if points.size and points.min() < 0:
            msg = "sequence indices must be nonnegative"
            raise ValueError(msg)
        return self._apply_maps(self._base_values(points))

    def value(self, n: int) -> complex:
        """Evaluate the sequence at a single index."""
        return complex(self.values([n])[0])

    def head(self, count: int) -> np.ndarray:
        """The first ``count`` values."""
        return self.values(np.arange(count))

    @cached_property
    def raw_bound(self) -> float:
        start = len(self.prefix)
        match self.tail:
            case ConstantTail(value=value):
                tail = abs(value)
            case GeometricTail(start=first, ratio=ratio):
                if abs(ratio) > 1:
                    raise UnboundedSequenceError(detail=f"geometric ratio {ratio} has modulus above 1")
                if abs(ratio) == 1:
                    raise UnsupportedOperationError(detail="geometric tails need |ratio| < 1")
                tail = abs(first) * abs(ratio) ** start
            case ReciprocalTail(scale=scale, offset=offset):
                tail = abs(scale) / (start + offset)
            case PeriodicTail(pattern=pattern):
                tail = max(abs(v) for v in pattern)
            case ExpressionTail(bound=bound, formula=formula):
                sample = np.abs(self._tail_values(np.arange(start, start + SEQUENCE_SAMPLE_COUNT)))
                if not np.all(np.isfinite(sample)):
                    raise UnboundedSequenceError(detail=f"{formula!r} is not finite on every index")
                if float(sample.max()) > bound * (1 + 1e-12):
                    raise UnboundedSequenceError(
                        detail=f"{formula!r} reaches {float(sample.max()):.6g} above its declared bound {bound:.6g}",
                    )
                tail = bound
            case _:
                tail = math.inf
        return max([tail, *(abs(v) for v in self.prefix)])

    @property
    def bound(self) -> float:
        """Upper bound of ``sup_n |v_n|``.

        Raises:
            UnboundedSequenceError: If the rule has no finite bound.
        """
        radius = self.raw_bound
        for value_map in self.maps:
            radius = value_map.bound(radius)
        return radius

    def _base_accumulation(self) -> tuple[complex, ...]:
        match self.tail:
            case ConstantTail(value=value):
                return (complex(value),)
            case GeometricTail() | ReciprocalTail():
                return (0j,)
            case PeriodicTail(pattern=pattern):
                return tuple(dict.fromkeys(complex(v) for v in pattern))
            case ExpressionTail(accumulation=points):
                return tuple(complex(v) for v in points)
        return ()

    def accumulation(self) -> tuple[complex, ...]:
        """Accumulation points of the sequence, after the value maps."""
        points = np.asarray(self._base_accumulation(), dtype=np.complex128)
        return tuple(dict.fromkeys(complex(v) for v in self._apply_maps(points)))

    def limit(self) -> complex | None:
        """The limit of the sequence, or ``None`` when it does not converge."""
        points = self.accumulation()
        return points[0] if len(points) == 1 else None

    def tail_radius(self, n0: int) -> float:
        """Bound of ``dist(v_n, accumulation)`` for every ``n >= n0``."""
        start = max(n0, len(self.prefix))
        match self.tail:
            case ConstantTail() | PeriodicTail():
                radius = 0.0
            case GeometricTail(start=first, ratio=ratio):
                radius = abs(first) * abs(ratio) ** start
            case ReciprocalTail(scale=scale, offset=offset):
                radius = abs(scale) / (start + offset)
            case ExpressionTail(accumulation=points) if points:
                window = self._tail_values(np.arange(start, start + SEQUENCE_SAMPLE_COUNT))
                centres = np.asarray(points, dtype=np.complex128)
                radius = float(np.max(np.min(np.abs(window[:, None] - centres[None, :]), axis=1)))
            case _:
                radius = math.inf
        scale = self.raw_bound
        for value_map in self.maps:
            lipschitz = value_map.lipschitz(scale)
            radius = 0.0 if lipschitz == 0 else radius * lipschitz
            scale = value_map.bound(scale)
        return radius

    def mapped(self, value_map: PolynomialMap | ConjugateMap) -> SequenceRule:
        """Compose a value map after the existing ones; two conjugations cancel."""
        if isinstance(value_map, ConjugateMap) and self.maps and isinstance(self.maps[-1], ConjugateMap):
            return self.model_copy(update={"maps": self.maps[:-1]})
        return self.model_copy(update={"maps": (*self.maps, value_map)})

    def is_unimodular(self) -> bool:
        """Whether every value has modulus one; decided exactly for constant and periodic tails."""
        match self.tail:
            case ConstantTail(value=value):
                tail_values = np.asarray([value], dtype=np.complex128)
            case PeriodicTail(pattern=pattern):
                tail_values = np.asarray(pattern, dtype=np.complex128)
            case _:
                return False
        values = self._apply_maps(np.concatenate([np.asarray(self.prefix, dtype=np.complex128), tail_values]))
        return bool(np.all(np.abs(np.abs(values) - 1.0) <= 4 * np.finfo(float).eps))
