from __future__ import annotations

from enum import StrEnum, auto

import numpy as np

DEFAULT_TOL = 1e-10
MAX_ITERATIONS = 10_000

LEADING_COEFFICIENT_UNDERFLOW = 1e-14
ROOT_RESIDUAL_BOUND = 1e-8

WINDING_MIN_SAMPLES = 64
WINDING_SAMPLE_CAP = 2**20
WINDING_MIN_DELTA = 1e-6
WINDING_MAX_DELTA = 0.25
CONTOUR_ZERO_FACTOR = 10.0 * float(np.finfo(float).eps)

MAX_SERIES_DEGREE = 512
DEFAULT_SERIES_DEGREE = 32

SEQUENCE_SAMPLE_COUNT = 4096
SEQUENCE_SCAN_CAP = 2**20

DEFAULT_N_LIST: tuple[int, ...] = (50, 100, 200, 500, 1000, 2000)
DEFAULT_DECAY_THRESHOLD = 1e-4
DEFAULT_STABILIZATION_TOL = 1e-6
DEFAULT_DECAY_EXPONENT = 0.5
DEFAULT_PLATEAU_SLOPE = 0.05
DEFAULT_GRID_BOUNDARY = 16
DEFAULT_GRID_INTERIOR = 8


class Extremum(StrEnum):
    """Which end of the singular spectrum to compute."""

    SMALLEST = auto()
    LARGEST = auto()


class OperatorKind(StrEnum):
    """Structured operator families on l2(N)."""

    RIGHT_SHIFT = auto()
    LEFT_SHIFT = auto()
    BANDED_TOEPLITZ = auto()
    DIAGONAL = auto()
    WEIGHTED_SHIFT = auto()


class ClassTag(StrEnum):
    """Operator classes relevant to the spectral criterion.

    ``AP_SPECTRUM_OF_ADJOINT`` certifies that the approximate point spectrum of the
    adjoint equals its spectrum, which is the hypothesis of the criterion.
    """

    NORMAL = auto()
    COMPACT = auto()
    ISOMETRY = auto()
    AP_SPECTRUM_OF_ADJOINT = auto()


class Membership(StrEnum):
    """Three-valued region membership."""

    INSIDE = auto()
    BOUNDARY = auto()
    OUTSIDE = auto()


class ZeroInImage(StrEnum):
    """Outcome of the zero-in-image test on a disk."""

    YES_INTERIOR = auto()
    YES_BOUNDARY = auto()
    NO = auto()


class ZeroLocation(StrEnum):
    """Where a zero of f sits relative to the spectrum, as reported in verdicts."""

    INTERIOR = auto()
    BOUNDARY = auto()
    ABSENT = auto()
    NOT_APPLICABLE = "n/a"


class Verdict(StrEnum):
    """Outcome of the spectral criterion."""

    RIESZ_BASIS = "RieszBasis"
    NOT_FRAME = "NotFrame"
    INCONCLUSIVE = "Inconclusive"


class SequenceClass(StrEnum):
    """What the sequence (f(T)(e_n)) is, as far as the criterion can tell."""

    ORTHONORMAL_BASIS = auto()
    RIESZ_BASIS = auto()
    NOT_FRAME = auto()
    UNKNOWN = auto()


class PointStatus(StrEnum):
    """Behaviour of the ap-distance sweep at a single probe point."""

    VANISHING = auto()
    DECAYING = auto()
    STABILIZED = auto()
    UNDETERMINED = auto()


class ProbeOutcome(StrEnum):
    """Aggregate outcome of the ap-spectrum probe."""

    CONSISTENT = auto()
    VIOLATION_FOUND = auto()
    INCONCLUSIVE = auto()


class SurjectivityOutcome(StrEnum):
    """Numerical evidence about surjectivity of an operator."""

    BOUNDED_BELOW_EVIDENCE = auto()
    DECAYING = auto()
    INCONCLUSIVE = auto()


class CrossValidationOutcome(StrEnum):
    """Agreement between the symbolic verdict and the frame-bound sweep."""

    CONSISTENT = auto()
    TENSION = auto()


class ReportFormat(StrEnum):
    """Report serialization formats."""

    JSON = auto()
    TEXT = auto()
