from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field

from frame_criterion import __version__
from frame_criterion.config import CrossValidationOutcome, ReportFormat, Verdict
from frame_criterion.framecheck import (
    CrossValidation,
    FrameBoundEstimates,
    FrameVerdict,
    SurjectivityEvidence,
)
from frame_criterion.scenario import Scenario
from frame_criterion.spectral import ProbeResult

CSV_HEADER = ("N", "lower_bound_estimate", "upper_bound_estimate", "ap_distance_at_zero")

_HEADLINES: dict[Verdict, str] = {
    Verdict.RIESZ_BASIS: "RIESZ BASIS",
    Verdict.NOT_FRAME: "NOT A FRAME",
    Verdict.INCONCLUSIVE: "INCONCLUSIVE",
}


class StageError(BaseModel):
    """An error captured while running one pipeline stage."""

    model_config = ConfigDict(frozen=True)

    stage: str
    error: str
    message: str


class Report(BaseModel):
    """Self-contained record of one run: scenario echo, tolerances and every stage result.

    Re-running the echoed scenario with the same version reproduces the report.
    """

    model_config = ConfigDict(frozen=True)

    tool: str = "frame-criterion"
    version: str = __version__
    scenario: Scenario
    tolerances: dict[str, float]
    verdict: FrameVerdict | None = None
    bounds: FrameBoundEstimates | None = None
    probe: ProbeResult | None = None
    surjectivity: SurjectivityEvidence | None = None
    cross_validation: CrossValidation | None = None
    errors: tuple[StageError, ...] = ()
    timings: dict[str, float] = Field(default_factory=dict)


def format_complex(value: complex) -> str:
    """``re+imj`` with 17 significant digits per part; parses back with ``complex()``."""
    return f"{value.real:.17g}{value.imag:+.17g}j"


def _plain(value: Any) -> Any:  # noqa: ANN401
    match value:
        case bool() | int() | float() | str() | None:
            return value
        case complex():
            return format_complex(value)
        case Path():
            return value.as_posix()
        case dict():
            return {str(key): _plain(item) for key, item in value.items()}
        case list() | tuple():
            return [_plain(item) for item in value]
        case frozenset() | set():
            return sorted(_plain(item) for item in value)
    msg = f"cannot serialize {type(value).__name__}"
    raise TypeError(msg)


def _text_report(report: Report) -> str:
    out = io.StringIO()
    verdict = report.verdict
    headline = _HEADLINES[verdict.verdict] if verdict is not None else "ERROR"
    out.write(f"VERDICT: {headline}\n")
    out.write(f"scenario: {report.scenario.name}")
    out.write(f" ({report.scenario.description})\n" if report.scenario.description else "\n")
    out.write(f"{report.tool} {report.version}\n")
    if verdict is not None:
        out.write(f"criterion applicable: {'yes' if verdict.criterion_applicable else 'no'}\n")
        out.write(f"zero location: {verdict.zero_location}\n")
        if verdict.witness is not None:
            out.write(f"witness: {format_complex(verdict.witness)}\n")
        out.write(f"sequence class: {verdict.sequence_class}\n")
        out.write(f"band width: {verdict.band_width:.3g}\n")
        if verdict.notes:
            out.write(f"notes: {verdict.notes}\n")
    out.write("tolerances: " + ", ".join(f"{key}={value:.3g}" for key, value in report.tolerances.items()) + "\n")

    if report.bounds is not None:
        bounds = report.bounds
        out.write("\nframe bound estimates\n")
        out.write(f"{'N':>8}  {'lower':>22}  {'upper':>22}  {'ap distance at 0':>22}\n")
        for n, lower, upper, distance in zip(
            bounds.n_list, bounds.lower, bounds.upper, bounds.ap_distance_at_zero, strict=True
        ):
            out.write(f"{n:>8}  {lower:>22.15g}  {upper:>22.15g}  {distance:>22.15g}\n")
        out.write(f"bessel bound: {bounds.bessel_bound:.15g}\n")
        flags = (
            f"lower nonincreasing: {bounds.lower_nonincreasing}, "
            f"upper nondecreasing: {bounds.upper_nondecreasing}, bracketed: {bounds.bracketed}"
        )
        out.write(flags + "\n")
    if report.surjectivity is not None:
        out.write(f"\nsurjectivity of f(T): {report.surjectivity.outcome}\n")
    if report.probe is not None:
        probe = report.probe
        out.write(f"\nsigma_ap(T*) = sigma(T*) probe: {probe.outcome}")
        out.write(f" (probed {len(probe.points)}, skipped {probe.skipped})\n")
        if probe.witness is not None:
            out.write(f"violation witness: {format_complex(probe.witness)}\n")
    if report.cross_validation is not None:
        check = report.cross_validation
        if check.outcome is CrossValidationOutcome.TENSION:
            out.write(f"\nCROSS-VALIDATION TENSION: {check.description}\n")
        else:
            out.write(f"\ncross-validation: {check.description}\n")
    if report.errors:
        out.write("\nerrors\n")
        for error in report.errors:
            out.write(f"  {error.stage}: {error.error}: {error.message}\n")
    if report.timings:
        out.write("\ntimings (s): " + ", ".join(f"{k}={v:.3f}" for k, v in report.timings.items()) + "\n")
    return out.getvalue()


def emit_report(report: Report, fmt: ReportFormat = ReportFormat.JSON, *, include_timings: bool = False) -> str:
    """Serialize a report.

    JSON keeps model field order, writes floats with the shortest repr that round-trips
    (at most 17 significant digits), non-finite floats as ``Infinity``/``NaN`` and complex
    numbers as strings. Timings are written only when ``include_timings`` is set, so the
    default document is deterministic; it validates back into a ``Report`` with empty
    ``timings``, and round-trip comparisons must ignore ``timings`` unless
    ``include_timings=True`` was passed.

    Args:
        report: The report.
        fmt: ``json`` or ``text``.
        include_timings: Keep stage timings in the JSON document.

    Returns:
        str: The document, newline-terminated.
    """
    if fmt is ReportFormat.TEXT:
        return _text_report(report)
    payload = report.model_dump(mode="python", exclude=None if include_timings else {"timings"})
    return json.dumps(_plain(payload), indent=2, ensure_ascii=False, allow_nan=True) + "\n"


def emit_csv(report: Report) -> str:
    """One row per truncation size of the bound sweep.

    Raises:
        ValueError: If the report has no bounds block.
    """
    if report.bounds is None:
        msg = "report has no frame bound estimates"
        raise ValueError(msg)
    bounds = report.bounds
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for n, lower, upper, distance in zip(
        bounds.n_list, bounds.lower, bounds.upper, bounds.ap_distance_at_zero, strict=True
    ):
        writer.writerow((n, repr(lower), repr(upper), repr(distance)))
    return out.getvalue()
