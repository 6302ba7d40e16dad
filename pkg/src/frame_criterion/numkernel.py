"""Complex linear algebra kernel.

Extremal singular values of dense and banded rectangular matrices, and polynomial
roots through balanced companion matrices. Everything here is a pure function of its
inputs, so callers may use it from several threads at once.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from numpy.polynomial import polynomial as npoly
from pydantic import BaseModel, ConfigDict, Field, model_validator

from frame_criterion.config import (
    DEFAULT_TOL,
    LEADING_COEFFICIENT_UNDERFLOW,
    MAX_ITERATIONS,
    ROOT_RESIDUAL_BOUND,
    Extremum,
)
from frame_criterion.exceptions import (
    ConvergenceError,
    DegreeError,
    LeadingCoefficientError,
    RootResidualError,
)
from frame_criterion.logging import logger

if TYPE_CHECKING:
    from collections.abc import Mapping, Sequence

    from numpy.typing import ArrayLike

_EPS = float(np.finfo(float).eps)


class Bandwidth(BaseModel):
    """Band structure of a matrix.

    Attributes:
        lower: Number of sub-diagonals (entries with row > col).
        upper: Number of super-diagonals (entries with row < col).
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    lower: int = Field(..., ge=0)
    upper: int = Field(..., ge=0)

    @property
    def total(self) -> int:
        """Bandwidth of the Gram matrix ``M^H M``."""
        return self.lower + self.upper


class ComplexMatrix(BaseModel):
    """Rectangular complex matrix in compressed row storage.

    The optional band hint is a contract: entries outside the declared band are
    exactly zero, which is checked at construction.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    entries: sp.csr_array
    bandwidth: Bandwidth | None = None

    @model_validator(mode="after")
    def _check_shape_and_band(self) -> ComplexMatrix:
        rows, cols = self.entries.shape
        if rows < 1 or cols < 1:
            msg = f"matrix must have rows >= 1 and cols >= 1, got {rows}x{cols}"
            raise ValueError(msg)
        if self.bandwidth is not None:
            coo = self.entries.tocoo()
            nonzero = coo.data != 0
            offsets = coo.row.astype(np.int64)[nonzero] - coo.col.astype(np.int64)[nonzero]
            if offsets.size and (offsets.max() > self.bandwidth.lower or offsets.min() < -self.bandwidth.upper):
                msg = "entries outside the declared band must be zero"
                raise ValueError(msg)
        return self

    @classmethod
    def from_dense(cls, array: ArrayLike, bandwidth: Bandwidth | None = None) -> ComplexMatrix:
        """Build a matrix from a dense 2-D array.

        Args:
            array: Row-major 2-D array of complex entries.
            bandwidth: Optional band hint.

        Raises:
            ValueError: If ``array`` is not two-dimensional.

        Returns:
            ComplexMatrix: The matrix.
        """
        dense = np.asarray(array, dtype=np.complex128)
        if dense.ndim != 2:  # noqa: PLR2004
            msg = f"expected a 2-D array, got shape {dense.shape}"
            raise ValueError(msg)
        return cls(entries=sp.csr_array(dense), bandwidth=bandwidth)

    @classmethod
    def from_diagonals(
        cls,
        rows: int,
        cols: int,
        diagonals: Mapping[int, ArrayLike],
    ) -> ComplexMatrix:
        """Build a banded matrix from its diagonals.

        ``diagonals[k][j]`` is the entry at row ``j + k`` and column ``j``; positions
        falling outside the matrix are ignored. The band hint is derived from the keys.

        Args:
            rows: Number of rows.
            cols: Number of columns.
            diagonals: Offset (row minus column) to per-column values of length ``cols``.

        Returns:
            ComplexMatrix: The banded matrix.
        """
        data: list[np.ndarray] = []
        offsets: list[int] = []
        for k, values in sorted(diagonals.items()):
            column_values = np.broadcast_to(np.asarray(values, dtype=np.complex128), (cols,))
            lo, hi = max(0, -k), min(cols, rows - k)
            if hi <= lo:
                continue
            data.append(np.ascontiguousarray(column_values[lo:hi]))
            offsets.append(-k)
        if data:
            entries = sp.csr_array(
                sp.diags_array(data, offsets=offsets, shape=(rows, cols), dtype=np.complex128),
            )
        else:
            entries = sp.csr_array((rows, cols), dtype=np.complex128)
        keys = list(diagonals) or [0]
        bandwidth = Bandwidth(lower=max(0, *keys), upper=max(0, *(-k for k in keys)))
        return cls(entries=entries, bandwidth=bandwidth)

    @property
    def rows(self) -> int:
        """Number of rows."""
        return int(self.entries.shape[0])

    @property
    def cols(self) -> int:
        """Number of columns."""
        return int(self.entries.shape[1])

    def to_dense(self) -> np.ndarray:
        """Return the entries as a dense array."""
        return self.entries.toarray()

    def shifted(self, shift: complex) -> ComplexMatrix:
        """Return ``M - shift * I`` where ``I`` is the rectangular identity."""
        identity = sp.eye_array(self.rows, self.cols, dtype=np.complex128, format="csr")
        return ComplexMatrix(entries=sp.csr_array(self.entries - shift * identity), bandwidth=self.bandwidth)

    def permuted(self, row_order: Sequence[int], col_order: Sequence[int]) -> ComplexMatrix:
        """Return the matrix with rows and columns reordered (band hint dropped)."""
        dense = self.to_dense()[np.ix_(list(row_order), list(col_order))]
        return ComplexMatrix.from_dense(dense)


def _gram_diagonals(matrix: ComplexMatrix, bandwidth: int) -> tuple[sp.csr_array, int]:
    a = matrix.entries
    gram = sp.csr_array(a.conj().T @ a)
    return gram, min(bandwidth, matrix.cols - 1)


def _upper_band(gram: sp.csr_array, p: int) -> np.ndarray:
    n = gram.shape[0]
    ab = np.zeros((p + 1, n), dtype=np.complex128)
    for d in range(p + 1):
        ab[p - d, d:] = gram.diagonal(d)
    return ab


def _general_band(gram: sp.csr_array, p: int, shift: float) -> np.ndarray:
    n = gram.shape[0]
    ab = np.zeros((2 * p + 1, n), dtype=np.complex128)
    for d in range(p + 1):
        ab[p - d, d:] = gram.diagonal(d)
        if d:
            ab[p + d, : n - d] = gram.diagonal(-d)
    ab[p, :] -= shift
    return ab


def _smallest_banded(matrix: ComplexMatrix, tol: float, max_iterations: int) -> float:
    assert matrix.bandwidth is not None  # noqa: S101
    gram, p = _gram_diagonals(matrix, matrix.bandwidth.total)
    n = matrix.cols
    ab = _upper_band(gram, p)
    lowest = float(sla.eig_banded(ab, eigvals_only=True, select="i", select_range=(0, 0))[0])
    highest = float(sla.eig_banded(ab, eigvals_only=True, select="i", select_range=(n - 1, n - 1))[0])
    scale = max(1.0, float(np.sqrt(max(highest, 0.0))))

    # Shift just below the bisection estimate so the shifted Gram matrix stays nonsingular.
    shift = lowest - 16.0 * _EPS * max(abs(highest), 1.0)
    band = _general_band(gram, p, shift)
    rng = np.random.default_rng(0)
    vector = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    vector /= np.linalg.norm(vector)
    sigma = float(np.linalg.norm(matrix.entries @ vector))

    for iteration in range(1, max_iterations + 1):
        step = sla.solve_banded((p, p), band, vector, check_finite=False)
        norm = float(np.linalg.norm(step))
        if not np.isfinite(norm) or norm == 0.0:
            return sigma
        vector = step / norm
        candidate = float(np.linalg.norm(matrix.entries @ vector))
        if abs(sigma - candidate) <= tol * scale:
            logger.debug("inverse_iteration_converged", iterations=iteration, sigma=candidate)
            return min(sigma, candidate)
        sigma = candidate
    residual = float(np.linalg.norm(gram @ vector - sigma**2 * vector))
    raise ConvergenceError(best_estimate=sigma, residual=residual, iterations=max_iterations)


def _largest_banded(matrix: ComplexMatrix) -> float:
    assert matrix.bandwidth is not None  # noqa: S101
    gram, p = _gram_diagonals(matrix, matrix.bandwidth.total)
    n = matrix.cols
    ab = _upper_band(gram, p)
    highest = float(sla.eig_banded(ab, eigvals_only=True, select="i", select_range=(n - 1, n - 1))[0])
    return float(np.sqrt(max(highest, 0.0)))


def extremal_singular_value(
    matrix: ComplexMatrix,
    which: Extremum,
    tol: float = DEFAULT_TOL,
    *,
    max_iterations: int = MAX_ITERATIONS,
) -> float:
    """Compute the smallest or largest singular value of a matrix.

    The smallest value is ``inf ||Mx||`` over unit vectors ``x``, so it is zero when the
    matrix has more columns than rows. Banded matrices go through their Hermitian band
    Gram matrix: bisection on the band-tridiagonalized form, then shifted inverse
    iteration; the returned value is ``||Mv||`` for the final vector ``v``, which keeps
    tiny singular values accurate. Matrices without a band hint use dense ``svdvals``.

    Args:
        matrix: The matrix.
        which: ``Extremum.SMALLEST`` or ``Extremum.LARGEST``.
        tol: Absolute tolerance relative to ``max(1, sigma_max)``.
        max_iterations: Inverse iteration budget.

    Raises:
        ValueError: If ``tol`` is not positive.

    Returns:
        float: The singular value.
    """
    if tol <= 0:
        msg = "tol must be positive"
        raise ValueError(msg)
    which = Extremum(which)
    if which is Extremum.SMALLEST and matrix.rows < matrix.cols:
        value = 0.0
    elif matrix.bandwidth is None:
        values = sla.svdvals(matrix.to_dense(), check_finite=False)
        value = float(values[-1] if which is Extremum.SMALLEST else values[0])
    elif which is Extremum.SMALLEST:
        value = _smallest_banded(matrix, tol, max_iterations)
    else:
        value = _largest_banded(matrix)
    logger.debug("singular_value", which=str(which), rows=matrix.rows, cols=matrix.cols, value=value)
    return value


def _polish(coeffs: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """One Newton step per root, kept only where it lowers the residual."""
    values = npoly.polyval(roots, coeffs)
    slopes = npoly.polyval(roots, npoly.polyder(coeffs))
    with np.errstate(divide="ignore", invalid="ignore"):
        candidates = roots - values / slopes
    usable = np.isfinite(candidates)
    candidates = np.where(usable, candidates, roots)
    better = np.abs(npoly.polyval(candidates, coeffs)) <= np.abs(values)
    return np.where(better, candidates, roots)


def polynomial_roots(
    coeffs: Sequence[complex] | np.ndarray,
    *,
    residual_bound: float = ROOT_RESIDUAL_BOUND,
    underflow: float = LEADING_COEFFICIENT_UNDERFLOW,
) -> np.ndarray:
    """Find all roots of a polynomial, with multiplicity.

    Roots are the eigenvalues of the balanced companion matrix, each polished by one
    Newton step.

    Args:
        coeffs: Coefficients ``a_0, ..., a_k`` in ascending degree order.
        residual_bound: Bound on ``|p(r)| / sum_j |a_j| |r|^j`` for every returned root.
        underflow: Leading coefficient threshold relative to the largest coefficient.

    Raises:
        DegreeError: If the polynomial is constant.
        LeadingCoefficientError: If the leading coefficient underflows.
        RootResidualError: If a root fails the residual check.

    Returns:
        np.ndarray: Exactly ``k`` complex roots, sorted by real then imaginary part.
    """
    a = np.atleast_1d(np.asarray(coeffs, dtype=np.complex128))
    degree = a.size - 1
    if degree < 1:
        raise DegreeError(degree=max(degree, 0))
    scale = float(np.max(np.abs(a)))
    leading = float(abs(a[-1]))
    if scale == 0.0 or leading <= underflow * scale:
        raise LeadingCoefficientError(magnitude=leading)

    companion = np.zeros((degree, degree), dtype=np.complex128)
    if degree > 1:
        companion[1:, :-1] = np.eye(degree - 1)
    companion[:, -1] = -a[:-1] / a[-1]
    balanced, _ = sla.matrix_balance(companion, permute=False)
    roots = _polish(a, sla.eigvals(balanced, check_finite=False))

    magnitudes = npoly.polyval(np.abs(roots), np.abs(a))
    residuals = np.abs(npoly.polyval(roots, a))
    worst = float(np.max(residuals - residual_bound * magnitudes))
    if worst > 0:
        index = int(np.argmax(residuals - residual_bound * magnitudes))
        raise RootResidualError(residual=float(residuals[index]), bound=float(residual_bound * magnitudes[index]))
    return roots[np.lexsort((roots.imag, roots.real))]
