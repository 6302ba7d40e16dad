from dataclasses import dataclass


@dataclass(frozen=True)
class FrameCriterionError(Exception):
    """Base exception for errors in the frame_criterion package."""

    @property
    def message(self) -> str:
        """Human-readable description of the error."""
        return (self.__class__.__doc__ or self.__class__.__name__).strip()

    def __str__(self) -> str:
        return self.message


@dataclass(frozen=True)
class ConvergenceError(FrameCriterionError):
    """Raised when an iterative kernel does not converge within its iteration budget."""

    best_estimate: float
    residual: float
    iterations: int

    @property
    def message(self) -> str:
        return (
            f"no convergence after {self.iterations} iterations "
            f"(best estimate {self.best_estimate:.17g}, residual {self.residual:.3e})"
        )


@dataclass(frozen=True)
class DegreeError(FrameCriterionError):
    """Raised when a polynomial has no roots to find."""

    degree: int

    @property
    def message(self) -> str:
        return "constant has no roots"


@dataclass(frozen=True)
class LeadingCoefficientError(FrameCriterionError):
    """Raised when the leading coefficient of a polynomial underflows."""

    magnitude: float

    @property
    def message(self) -> str:
        return f"leading coefficient underflow (|a_k| = {self.magnitude:.3e})"


@dataclass(frozen=True)
class RootResidualError(FrameCriterionError):
    """Raised when a computed root does not satisfy the residual bound."""

    residual: float
    bound: float

    @property
    def message(self) -> str:
        return f"root residual {self.residual:.3e} exceeds bound {self.bound:.3e}"


@dataclass(frozen=True)
class DomainError(FrameCriterionError):
    """Raised when a point lies outside the disk of convergence of a power series."""

    point: float
    radius: float

    @property
    def message(self) -> str:
        return f"domain error: |z| = {self.point:.17g} is not below the radius of convergence {self.radius:.17g}"


@dataclass(frozen=True)
class TailBoundUnreachableError(FrameCriterionError):
    """Raised when a series cannot be truncated to the requested accuracy."""

    eps: float
    achieved: float
    degree: int

    @property
    def message(self) -> str:
        return (
            f"tail bound {self.eps:.3e} unreachable within degree {self.degree} "
            f"(achieved {self.achieved:.3e})"
        )


@dataclass(frozen=True)
class UnboundedSequenceError(FrameCriterionError):
    """Raised when a sequence rule has no finite magnitude bound."""

    detail: str

    @property
    def message(self) -> str:
        return f"unbounded sequence rule: {self.detail}"


@dataclass(frozen=True)
class UnknownOperatorKindError(FrameCriterionError):
    """Raised when an operator description names an unsupported kind."""

    kind: str

    @property
    def message(self) -> str:
        return f"unknown operator kind: {self.kind!r}"


@dataclass(frozen=True)
class UnsupportedOperationError(FrameCriterionError):
    """Raised when an operation falls outside the supported operator classes."""

    detail: str

    @property
    def message(self) -> str:
        return self.detail


@dataclass(frozen=True)
class MethodMismatchError(FrameCriterionError):
    """Raised when root counting and winding numbers disagree."""

    root_count: tuple[int, int]
    winding_count: tuple[int, int]

    @property
    def message(self) -> str:
        return f"root/winding mismatch: roots {self.root_count}, winding {self.winding_count}"


@dataclass(frozen=True)
class ContourThroughZeroError(FrameCriterionError):
    """Raised when a winding contour passes (numerically) through a zero."""

    min_modulus: float

    @property
    def message(self) -> str:
        return f"contour through zero (min |f| = {self.min_modulus:.3e})"


@dataclass(frozen=True)
class SampleCapError(FrameCriterionError):
    """Raised when adaptive contour sampling exceeds its cap."""

    samples: int

    @property
    def message(self) -> str:
        return f"winding sample cap exceeded ({self.samples} samples)"


@dataclass(frozen=True)
class ProvenanceMismatchError(FrameCriterionError):
    """Raised when a verdict and bound estimates come from different inputs."""

    verdict_source: str
    bounds_source: str

    @property
    def message(self) -> str:
        return f"mismatched provenance: verdict {self.verdict_source[:12]} vs bounds {self.bounds_source[:12]}"


@dataclass(frozen=True)
class ScenarioValidationError(FrameCriterionError):
    """Raised when a scenario document fails validation."""

    errors: tuple[str, ...]

    @property
    def message(self) -> str:
        return "invalid scenario:\n" + "\n".join(f"  - {error}" for error in self.errors)
