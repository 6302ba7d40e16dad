"""frame-criterion: decide whether (f(T) e_n) is a frame or a Riesz basis.

Overview
--------
For a bounded operator ``T`` on l2(N) whose adjoint satisfies
``sigma_ap(T*) = sigma(T*)`` and a function ``f`` holomorphic near ``sigma(T)``,
the sequence ``(f(T) e_n)`` is a frame iff it is a Riesz basis iff ``f`` does not
vanish on ``sigma(T)``. This tool:

1) **Decides** the question symbolically from the declared spectrum of ``T``
   (roots of ``f`` located against the spectrum, cross-checked by winding numbers).

2) **Corroborates** the verdict numerically: lower/upper frame-bound estimates on
   exact truncations of ``f(T)``, a surjectivity probe, and a probe of the
   ``sigma_ap(T*) = sigma(T*)`` hypothesis on a grid.

3) **Reports** everything, with every tolerance in force, as text or JSON, and
   writes the bound sweep as CSV for plotting elsewhere.

Subcommands
-----------
    check     run the whole pipeline on a scenario (exit 0, 2 when inconclusive, 1 on error)
    probe     only the sigma_ap(T*) = sigma(T*) probe
    bounds    only the frame-bound sweep
    examples  list the shipped scenarios

Usage
-----
    - Example 1 of the shipped scenarios (f = 1 + z over the right shift):
        frame-criterion check --scenario example1_k1

    - JSON report plus CSV sweep, capped at N = 500:
        frame-criterion check --scenario my.toml --format json --csv sweep.csv --max-n 500

    - Log to a file at debug level:
        frame-criterion --log-file run.log --verbosity debug bounds --scenario riesz_z_minus_2
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path
from typing import TYPE_CHECKING, Any

from frame_criterion import __version__, logger
from frame_criterion.config import ProbeOutcome, ReportFormat, Verdict
from frame_criterion.exceptions import FrameCriterionError
from frame_criterion.framecheck import criterion_verdict, cross_validate, estimate_frame_bounds, surjectivity_probe
from frame_criterion.holocalc import functional_calculus
from frame_criterion.logging import setup_logging
from frame_criterion.operators import adjoint, make_operator
from frame_criterion.output_construction import Report, StageError, emit_csv, emit_report
from frame_criterion.regions import default_grid
from frame_criterion.scenario import Scenario, load_scenario, shipped_scenarios
from frame_criterion.settings import AnalysisSettings, CommandSettings
from frame_criterion.spectral import probe_ap_equals_spectrum

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from frame_criterion.operators import OperatorModel
    from frame_criterion.spectral import ProbeResult

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2


class _Stages:
    """Runs pipeline stages, collecting results, errors and timings."""

    def __init__(self) -> None:
        self.errors: list[StageError] = []
        self.timings: dict[str, float] = {}

    def run[R](self, stage: str, fn: Callable[[], R]) -> R | None:
        start = time.perf_counter()
        try:
            return fn()
        except FrameCriterionError as exc:
            logger.error("stage_failed", stage=stage, error=type(exc).__name__, message=exc.message)
            self.errors.append(StageError(stage=stage, error=type(exc).__name__, message=exc.message))
        except Exception as exc:
            logger.exception("stage_crashed", stage=stage)
            self.errors.append(StageError(stage=stage, error=type(exc).__name__, message=str(exc)))
        finally:
            self.timings[stage] = time.perf_counter() - start
        return None


def _report(scenario: Scenario, stages: _Stages, **results: Any) -> Report:  # noqa: ANN401
    return Report(
        scenario=scenario,
        tolerances=scenario.analysis.tolerances(),
        errors=tuple(stages.errors),
        timings=dict(stages.timings),
        **results,
    )


def _probe(op: OperatorModel, analysis: AnalysisSettings) -> ProbeResult:
    grid = default_grid(adjoint(op).spectrum, analysis.grid_boundary, analysis.grid_interior)
    return probe_ap_equals_spectrum(
        op,
        grid,
        analysis.n_list,
        analysis.tol,
        stabilization_tol=analysis.stabilization_tol,
        decay_exponent=analysis.decay_exponent,
        plateau_slope=analysis.plateau_slope,
        workers=analysis.workers,
    )


def run_scenario(scenario: Scenario) -> Report:
    """Run the full pipeline on a scenario.

    Stages run in order: operator, functional calculus, verdict, frame bounds, surjectivity,
    hypothesis probe, cross-validation. A failing stage is recorded in the report's errors and
    the stages depending on it are skipped.

    Args:
        scenario: The validated scenario.

    Returns:
        Report: Every stage result, the scenario echo and the tolerances.
    """
    analysis = scenario.analysis
    stages = _Stages()
    results: dict[str, Any] = {}
    op = stages.run("operator", lambda: make_operator(scenario.operator))
    if op is None:
        return _report(scenario, stages)
    image = stages.run("functional_calculus", lambda: functional_calculus(scenario.function, op, tol=analysis.tol))
    results["verdict"] = stages.run("verdict", lambda: criterion_verdict(op, scenario.function, analysis.tol))
    if image is not None:
        results["bounds"] = stages.run(
            "bounds",
            lambda: estimate_frame_bounds(image, analysis.n_list, analysis.tol, workers=analysis.workers),
        )
        results["surjectivity"] = stages.run(
            "surjectivity",
            lambda: surjectivity_probe(
                image,
                analysis.n_list,
                analysis.tol,
                stabilization_tol=analysis.stabilization_tol,
                plateau_slope=analysis.plateau_slope,
                workers=analysis.workers,
            ),
        )
    results["probe"] = stages.run("probe", lambda: _probe(op, analysis))
    verdict, bounds = results["verdict"], results.get("bounds")
    if verdict is not None and bounds is not None:
        results["cross_validation"] = stages.run(
            "cross_validation",
            lambda: cross_validate(
                verdict,
                bounds,
                analysis.decay_threshold,
                tol=analysis.tol,
                stabilization_tol=analysis.stabilization_tol,
                plateau_slope=analysis.plateau_slope,
            ),
        )
    return _report(scenario, stages, **results)


def run_probe(scenario: Scenario) -> Report:
    """Run only the ``sigma_ap(T*) = sigma(T*)`` probe on the scenario's operator."""
    stages = _Stages()
    op = stages.run("operator", lambda: make_operator(scenario.operator))
    if op is None:
        return _report(scenario, stages)
    return _report(scenario, stages, probe=stages.run("probe", lambda: _probe(op, scenario.analysis)))


def run_bounds(scenario: Scenario) -> Report:
    """Run only the frame-bound sweep of ``f(T)``."""
    analysis = scenario.analysis
    stages = _Stages()
    op = stages.run("operator", lambda: make_operator(scenario.operator))
    image = (
        None
        if op is None
        else stages.run("functional_calculus", lambda: functional_calculus(scenario.function, op, tol=analysis.tol))
    )
    if image is None:
        return _report(scenario, stages)
    bounds = stages.run(
        "bounds",
        lambda: estimate_frame_bounds(image, analysis.n_list, analysis.tol, workers=analysis.workers),
    )
    return _report(scenario, stages, bounds=bounds)


def parse_args(argv: Sequence[str] | None = None) -> CommandSettings:
    """Parse command-line arguments into a CommandSettings object.

    Args:
        argv (Sequence[str] | None): Optional list of command-line arguments. If None, uses sys.argv.

    Returns:
        CommandSettings: The parsed options; unset options are None.
    """
    p = argparse.ArgumentParser(
        prog="frame-criterion",
        description="Decide whether (f(T) e_n) is a frame or a Riesz basis, with numerical cross-checks.",
    )
    p.add_argument(
        "--version",
        action="version",
        version=f"%(prog)s {__version__}",
    )
    p.add_argument("--log-file", type=str, default=None, help="Log file path.")
    p.add_argument(
        "--verbosity",
        choices=["debug", "info", "warning", "error"],
        default=None,
        help="Log level (default: the scenario's).",
    )
    commands = p.add_subparsers(dest="command", required=True)

    def add_run_options(sub: argparse.ArgumentParser, *, csv: bool) -> None:
        sub.add_argument(
            "--scenario",
            type=str,
            required=True,
            help="Scenario file, or the name of a shipped scenario.",
        )
        sub.add_argument(
            "--format",
            choices=[fmt.value for fmt in ReportFormat],
            default=None,
            help="Report format.",
        )
        sub.add_argument("--output", type=str, default=None, help="Report file (default: stdout).")
        sub.add_argument("--tol", type=float, default=None, help="Membership and kernel tolerance.")
        sub.add_argument("--max-n", type=int, default=None, help="Drop truncation sizes above this.")
        sub.add_argument("--workers", type=int, default=None, help="Threads for sweeps and probes.")
        sub.add_argument("--timings", action="store_true", help="Include stage timings in JSON reports.")
        if csv:
            sub.add_argument("--csv", type=str, default=None, help="CSV file for the bound sweep.")

    add_run_options(commands.add_parser("check", help="Run the criterion and all numerical checks."), csv=True)
    add_run_options(commands.add_parser("probe", help="Probe sigma_ap(T*) = sigma(T*) only."), csv=False)
    add_run_options(commands.add_parser("bounds", help="Frame-bound sweep only."), csv=True)
    commands.add_parser("examples", help="List the shipped scenarios.")
    args = p.parse_args(argv)
    return CommandSettings(**vars(args))


def apply_overrides(scenario: Scenario, settings: CommandSettings) -> Scenario:
    """Scenario with the command-line overrides applied (and validated)."""
    analysis = scenario.analysis.model_dump()
    if settings.tol is not None:
        analysis["tol"] = settings.tol
    if settings.workers is not None:
        analysis["workers"] = settings.workers
    if settings.max_n is not None:
        analysis["n_list"] = [n for n in analysis["n_list"] if n <= settings.max_n] or [settings.max_n]
    outputs = scenario.outputs.model_dump()
    for key, value in (("format", settings.format), ("csv", settings.csv), ("report", settings.output)):
        if value is not None:
            outputs[key] = value
    outputs["timings"] = outputs["timings"] or settings.timings
    if settings.verbosity is not None:
        outputs["verbosity"] = settings.verbosity
    return Scenario.model_validate({**scenario.model_dump(), "analysis": analysis, "outputs": outputs})


def _exit_code(command: str, report: Report) -> int:
    if report.errors:
        return EXIT_ERROR
    if command == "check" and report.verdict is not None and report.verdict.verdict is Verdict.INCONCLUSIVE:
        return EXIT_INCONCLUSIVE
    if command == "probe" and report.probe is not None and report.probe.outcome is ProbeOutcome.INCONCLUSIVE:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _write(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def main(argv: Sequence[str] | None = None) -> int:
    """Main entry point for the frame-criterion CLI.

    Args:
        argv (Sequence[str] | None): Optional list of command-line arguments. If None, uses sys.argv.

    Returns:
        int: Exit code (0 for a delivered verdict, 2 when inconclusive, 1 for errors).
    """
    settings = parse_args(argv)
    setup_logging(settings.log_file, settings.verbosity or "warning")
    if settings.command == "examples":
        for scenario in shipped_scenarios():
            sys.stdout.write(f"{scenario.name}: {scenario.description}\n")
        return EXIT_OK

    assert settings.scenario is not None  # noqa: S101
    try:
        scenario = apply_overrides(load_scenario(settings.scenario), settings)
    except (FrameCriterionError, FileNotFoundError, ValueError) as exc:
        sys.stderr.write(f"frame-criterion: {exc}\n")
        return EXIT_ERROR
    outputs = scenario.outputs
    setup_logging(settings.log_file, outputs.verbosity)

    runner = {"check": run_scenario, "probe": run_probe, "bounds": run_bounds}[settings.command]
    report = runner(scenario)
    _write(emit_report(report, outputs.format, include_timings=outputs.timings), outputs.report)
    if outputs.csv is not None and settings.command != "probe":
        if report.bounds is None:
            sys.stderr.write("frame-criterion: no bound sweep to write as CSV\n")
            return EXIT_ERROR
        _write(emit_csv(report), outputs.csv)
    code = _exit_code(settings.command, report)
    logger.info("run_finished", command=settings.command, scenario=scenario.name, exit_code=code)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
