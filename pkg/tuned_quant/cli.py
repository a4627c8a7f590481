"""Command-line front end.

Exit codes: 0 success, 1 verification mismatch, 2 usage error or rejected input.
"""

import argparse
import json
import sys
from collections.abc import Sequence

from loguru import logger
from pydantic import ValidationError

from tuned_quant.config import Settings, parse_params, settings
from tuned_quant.main import configure_logging
from tuned_quant.models.check import CheckStatus
from tuned_quant.models.operator import CommuteRequest, QuantizeRequest, SpectrumRequest, TransformRequest
from tuned_quant.services.errors import TunedQuantError
from tuned_quant.services.quantize import MapKind
from tuned_quant.services.reports import run_commute, run_quantize, run_spectrum, run_transform
from tuned_quant.services.suite import run_suite

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2


def _add_map(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--map", choices=[kind.value for kind in MapKind], default=MapKind.TT2.value)
    parser.add_argument("--n", type=int, default=settings.default_n)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tuned-quant", description="Exact phase-space quantization maps")
    parser.add_argument("--json", action="store_true", help="emit JSON reports")
    parser.add_argument("--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    quantize = sub.add_parser("quantize", help="quantize one expression")
    _add_map(quantize)
    quantize.add_argument("--expr", required=True)
    quantize.add_argument("--metric", default=None, help="JSON matrix of expression strings")
    quantize.add_argument("--metric-kind", choices=["phase", "configuration"], default=settings.metric_kind)
    quantize.add_argument("--strict", action="store_true", default=settings.strict_tuning)

    commute = sub.add_parser("commute", help="commutator of two quantized expressions")
    _add_map(commute)
    commute.add_argument("--a", required=True)
    commute.add_argument("--b", required=True)
    commute.add_argument("--expect", default=None, help="operator expression, e.g. 'i*hbar*TT2(L3)'")

    transform = sub.add_parser("transform", help="transport a quantized expression along a cotangent lift")
    _add_map(transform)
    transform.add_argument("--expr", required=True)
    transform.add_argument("--transform", default="shear", help="identity | scale[(c)] | shear | rotate2d[(t)]")
    transform.add_argument("--expect", choices=["commutes", "differs"], default=None)

    spectrum = sub.add_parser("spectrum", help="finite-difference spectrum of the tuned oscillator")
    spectrum.add_argument("--grid", type=int, default=settings.grid_points)
    spectrum.add_argument("--domain", type=float, default=settings.domain_half_width)
    spectrum.add_argument("--params", default=settings.default_params)
    spectrum.add_argument("--count", type=int, default=settings.eigen_count)

    suite = sub.add_parser("check-suite", help="replay every reference identity")
    suite.add_argument("--seed", type=int, default=settings.seed)
    suite.add_argument("--grid", type=int, default=settings.grid_points)
    suite.add_argument("--domain", type=float, default=settings.domain_half_width)
    suite.add_argument("--params", default=settings.default_params)
    return parser


def _emit(args: argparse.Namespace, payload: object, text: str) -> None:
    if args.json:
        print(payload.model_dump_json(indent=2) if hasattr(payload, "model_dump_json") else json.dumps(payload, indent=2))
    else:
        print(text)


def _quantize(args: argparse.Namespace) -> int:
    request = QuantizeRequest(
        map=args.map, n=args.n, expr=args.expr, metric=args.metric, metric_kind=args.metric_kind, strict=args.strict
    )
    report = run_quantize(request)
    _emit(args, report, report.text)
    return EXIT_OK


def _commute(args: argparse.Namespace) -> int:
    report = run_commute(CommuteRequest(map=args.map, n=args.n, a=args.a, b=args.b, expect=args.expect))
    if report.matches is None:
        _emit(args, report, report.commutator.text)
        return EXIT_OK
    verdict = "PASS" if report.matches else "FAIL"
    _emit(args, report, f"{report.commutator.text}\n{verdict}")
    return EXIT_OK if report.matches else EXIT_MISMATCH


def _transform(args: argparse.Namespace) -> int:
    report = run_transform(TransformRequest(map=args.map, n=args.n, expr=args.expr, transform=args.transform))
    outcome = "commutes" if report.commutes else "differs"
    text = f"pushforward:  {report.pushed.text}\nrequantized:  {report.requantized.text}\n{outcome}"
    _emit(args, report, text)
    if args.expect is not None and args.expect != outcome:
        return EXIT_MISMATCH
    return EXIT_OK


def _spectrum(args: argparse.Namespace) -> int:
    report = run_spectrum(SpectrumRequest(grid=args.grid, domain=args.domain, params=args.params, count=args.count))
    lines = [f"{'k':>3}  {'eigenvalue':>14}  {'analytic':>10}  {'rel_error':>10}"]
    for k, (value, exact, err) in enumerate(zip(report.eigenvalues, report.analytic, report.rel_errors)):
        lines.append(f"{k:>3}  {value:>14.8f}  {exact:>10.4f}  {err:>10.2e}")
    lines.append(f"N={report.grid['N']} L={report.grid['L']}")
    _emit(args, report, "\n".join(lines))
    return EXIT_OK


def _check_suite(args: argparse.Namespace) -> int:
    parse_params(args.params)
    suite_settings: Settings = settings.model_copy(
        update={
            "seed": args.seed,
            "grid_points": args.grid,
            "domain_half_width": args.domain,
            "default_params": args.params,
        }
    )
    report = run_suite(suite_settings)
    width = max(len(r.name) for r in report.results)
    lines = [f"{'check':<{width}}  {'status':<8}  reference / detail"]
    for result in report.results:
        lines.append(f"{result.name:<{width}}  {result.status.value:<8}  {result.reference or '-'}: {result.detail}")
    passed = sum(1 for r in report.results if r.status in (CheckStatus.PASS, CheckStatus.REPORTED))
    lines.append(f"{passed}/{report.total} passed or reported")
    _emit(args, report, "\n".join(lines))
    return EXIT_OK if report.ok else EXIT_MISMATCH


_COMMANDS = {
    "quantize": _quantize,
    "commute": _commute,
    "transform": _transform,
    "spectrum": _spectrum,
    "check-suite": _check_suite,
}


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    configure_logging(settings.model_copy(update={"log_level": "DEBUG" if args.verbose else settings.log_level}))
    try:
        return _COMMANDS[args.command](args)
    except (TunedQuantError, ValidationError, ValueError) as exc:
        logger.debug("Command rejected command={} error_type={}", args.command, type(exc).__name__)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
