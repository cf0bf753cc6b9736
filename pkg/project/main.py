from __future__ import annotations

import argparse
import asyncio
import cmath
import logging
import sys
from collections.abc import Callable, Iterable

from project.config import load_settings_from_env, load_suite_config
from project.eisenstein import eisenstein_eval, theta_eval
from project.exceptions import (
    ConfigError,
    DegenerateFormError,
    ExitCode,
    ExpressionParseError,
    ModularFoliationError,
    NumericalError,
    ReportWriteError,
    UnknownVariableError,
    exit_code_for_report,
)
from project.flows import (
    BuiltinField,
    ConservedQuantity,
    builtin_field,
    check_monitor,
    conservation_monitor,
    conserved_values,
    foliation_field,
    integrate_field,
)
from project.gauss_manin.foliation import FormSpec, foliation_from_form
from project.models import (
    ComplexValue,
    EisensteinReport,
    FlowSummary,
    FoliationReport,
    LeafReport,
    PeriodReport,
)
from project.periods import b_invariants_of, classify_b, leaf_classify, period_matrix
from project.services.reporting import emit_report, emit_trajectory
from project.services.verify_suite import SuiteName, SuiteRunner
from project.symbolic.parser import format_polynomial, parse_expression
from project.symbolic.rational import as_rational
from project.utils.cli_parsing import parse_complex, parse_point, parse_triple, positive_float
from project.utils.logging import Timer, configure_logging, log_event

_USAGE_ERRORS = (ConfigError, ExpressionParseError, UnknownVariableError, DegenerateFormError)
_FLOW_FIELDS = [f.value for f in BuiltinField] + ["custom"]


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="emf-lab", add_help=True)
    sub = p.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="Run the verification suites")
    verify.add_argument("--suite", choices=[s.value for s in SuiteName], default="all")
    verify.add_argument("--config", default=None, help="YAML suite config (default: built-in)")
    verify.add_argument("--tol", type=positive_float, default=None, help="Override tolerance")
    verify.add_argument("--seed", type=int, default=None, help="Override seed")
    verify.add_argument("--json", default=None, help="Write the report here instead of stdout")

    flow = sub.add_parser("flow", help="Integrate a vector field along a complex-time ray")
    flow.add_argument("--field", choices=_FLOW_FIELDS, default="ra")
    flow.add_argument("--p1", default=None, help="Custom field: coefficient of dx/y")
    flow.add_argument("--p2", default=None, help="Custom field: coefficient of x dx/y")
    flow.add_argument("--s", type=parse_complex, default=0j, help="Value of the parameter s")
    flow.add_argument("--start", type=parse_point, required=True, help='e.g. "0,4,1"')
    flow.add_argument("--phase", type=float, default=0.0, help="Ray direction in degrees")
    flow.add_argument("--length", type=positive_float, default=1.0)
    flow.add_argument("--tol", type=positive_float, default=1e-10)
    flow.add_argument(
        "--monitor",
        action="append",
        choices=[q.value for q in ConservedQuantity],
        default=[],
        help="Conserved quantity to record (repeatable)",
    )
    flow.add_argument("--csv", default=None, help="Write CSV here and print a JSON summary")

    periods = sub.add_parser("periods", help="Period matrix and B-invariants at t")
    periods.add_argument("--t", type=parse_triple, required=True)
    periods.add_argument("--raw", action="store_true", help="Skip the 1/sqrt(-2 pi i) factor")
    periods.add_argument("--tol", type=positive_float, default=1e-13)

    eis = sub.add_parser("eisenstein", help="Eisenstein and theta triples at z")
    eis.add_argument("--z", type=parse_complex, required=True, help='e.g. "0.1+1.2i"')
    eis.add_argument("--tol", type=positive_float, default=1e-14)

    fol = sub.add_parser("foliation", help="Modular foliation of p1 dx/y + p2 x dx/y")
    fol.add_argument("--p1", required=True)
    fol.add_argument("--p2", required=True)

    leaf = sub.add_parser("leaf", help="Leaf diagnostics at t")
    leaf.add_argument("--t", type=parse_triple, required=True)
    leaf.add_argument("--tol", type=positive_float, default=1e-8)
    return p


def _complexes(values: Iterable[complex]) -> list[ComplexValue]:
    return [ComplexValue.of(complex(v)) for v in values]


def _form(p1: str, p2: str) -> FormSpec:
    return FormSpec(p1=as_rational(parse_expression(p1)), p2=as_rational(parse_expression(p2)))


async def _verify(args: argparse.Namespace, logger: logging.Logger, parallelism: int) -> int:
    config = load_suite_config(path=args.config)
    overrides = {
        k: v for k, v in (("tolerance", args.tol), ("seed", args.seed)) if v is not None
    }
    config = config.model_copy(update=overrides)
    runner = SuiteRunner(config=config, logger=logger, parallelism=parallelism)
    report = await runner.run(suite=args.suite)
    emit_report(report, path=args.json)
    counts = report.counts()
    return exit_code_for_report(saw_failure=counts["fail"] > 0, saw_error=counts["error"] > 0)


def _flow(args: argparse.Namespace) -> int:
    if args.field == "custom":
        if args.p1 is None or args.p2 is None:
            raise ConfigError("--field custom needs --p1 and --p2")
        handle = foliation_field(foliation_from_form(_form(args.p1, args.p2)), s=args.s)
    else:
        handle = builtin_field(args.field)
    if len(args.start) != handle.dimension:
        raise ConfigError(f"--start needs {handle.dimension} coordinates for {handle.name}")
    for name in args.monitor:
        check_monitor(name, handle)

    phase = cmath.exp(1j * cmath.pi * args.phase / 180)
    trajectory = integrate_field(
        handle, args.start, phase=phase, length=args.length, tol=args.tol
    )
    drift: dict[str, float] = {}
    for name in args.monitor:
        values = conserved_values(trajectory, name)
        trajectory = trajectory.with_conserved(name, values)
        drift[name] = conservation_monitor(trajectory, name)

    if args.csv is None:
        emit_trajectory(trajectory)
        return 0
    emit_trajectory(trajectory, path=args.csv)
    emit_report(
        FlowSummary(
            field=handle.name,
            start=_complexes(trajectory.start),
            end=_complexes(trajectory.end),
            phase=ComplexValue.of(trajectory.phase),
            length=args.length,
            samples=len(trajectory.arcs),
            evaluations=trajectory.evaluations,
            max_drift=drift,
        )
    )
    return 0


def _periods(args: argparse.Namespace) -> int:
    p = period_matrix(args.t, tol=args.tol, raw=args.raw)
    b = b_invariants_of(p)
    emit_report(
        PeriodReport(
            t=_complexes(args.t),
            t0=1.0,
            raw=args.raw,
            matrix=_complexes((p.x1, p.x2, p.x3, p.x4)),
            determinant=ComplexValue.of(p.determinant),
            b_dxy=b.b_dxy,
            b_xdxy=b.b_xdxy,
            b_mixed=ComplexValue.of(b.b_mixed),
            tau=ComplexValue.of(p.tau),
            classification=classify_b(b.b_xdxy, 1e-8).value,
        )
    )
    return 0


def _eisenstein(args: argparse.Namespace) -> int:
    g = eisenstein_eval(args.z, args.tol)
    theta = theta_eval(args.z, args.tol)
    emit_report(
        EisensteinReport(
            z=ComplexValue.of(args.z),
            g=_complexes(g.values),
            theta=_complexes(theta.values),
            error_bound=max(g.error_bound, theta.error_bound),
            theta_path_steps=theta.path_steps,
        )
    )
    return 0


def _foliation(args: argparse.Namespace) -> int:
    p1, p2 = parse_expression(args.p1), parse_expression(args.p2)
    field = foliation_from_form(FormSpec(p1=as_rational(p1), p2=as_rational(p2)))
    emit_report(
        FoliationReport(
            p1=format_polynomial(p1),
            p2=format_polynomial(p2),
            components=field.formatted(),
        )
    )
    return 0


def _leaf(args: argparse.Namespace) -> int:
    info = leaf_classify(args.t, tol=args.tol)
    emit_report(
        LeafReport(
            t=_complexes(info.t),
            b_dxy=info.b_dxy,
            b_xdxy=info.b_xdxy,
            b_mixed=ComplexValue.of(info.b_mixed),
            c2=ComplexValue.of(info.c2),
            c4=ComplexValue.of(info.c4),
            classification=info.classification.value,
            near_k=info.near_k,
        )
    )
    return 0


_COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "flow": _flow,
    "periods": _periods,
    "eisenstein": _eisenstein,
    "foliation": _foliation,
    "leaf": _leaf,
}


async def _async_main(args: argparse.Namespace) -> int:
    timer = Timer.start_now()

    try:
        settings = load_settings_from_env()
        logger = configure_logging(level=settings.log_level)
    except ConfigError as e:
        logger = configure_logging(level="INFO")
        log_event(
            logger,
            subject="global",
            action="config",
            result="failed",
            duration_ms=timer.elapsed_ms(),
            level=logging.ERROR,
            message=str(e),
        )
        return int(ExitCode.USAGE)

    try:
        if args.command == "verify":
            exit_code = await _verify(args, logger, settings.parallelism)
        else:
            exit_code = _COMMANDS[args.command](args)
    except _USAGE_ERRORS as e:
        exit_code = int(ExitCode.USAGE)
        message = str(e)
    except (NumericalError, ReportWriteError) as e:
        exit_code = int(ExitCode.NUMERIC)
        message = f"{type(e).__name__}: {e}"
    except ModularFoliationError as e:  # pragma: no cover
        exit_code = int(ExitCode.NUMERIC)
        message = repr(e)
    else:
        message = ""

    log_event(
        logger,
        subject="global",
        action=args.command,
        result="ok" if exit_code == 0 else "failed",
        duration_ms=timer.elapsed_ms(),
        level=logging.INFO if exit_code == 0 else logging.ERROR,
        message=message,
        extra_fields={"exit_code": exit_code},
    )
    return exit_code


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits with 2 on usage errors and 0 after --help.
        return int(e.code or 0)
    return asyncio.run(_async_main(args))


if __name__ == "__main__":
    raise SystemExit(main(sys.argv[1:]))
