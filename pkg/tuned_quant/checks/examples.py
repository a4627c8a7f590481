"""Documented command-line examples, replayed through the report services."""

from tuned_quant.checks.common import mismatch, verdict
from tuned_quant.checks.references import cite
from tuned_quant.config import Settings
from tuned_quant.models.check import CheckResult
from tuned_quant.models.operator import CommuteRequest, QuantizeRequest
from tuned_quant.services.quantize import MapKind
from tuned_quant.services.reports import run_commute, run_quantize

TT2_OSCILLATOR_TEXT = "(1/2)*m*omega^2*q1^2 - (hbar^2/(2*m))*(d2/dq1^2 + d2/dp1^2)"
KS_POSITION_TEXT = "q1 + i*hbar*d/dp1"


def _quantize_example(name: str, key: str, request: QuantizeRequest, expected: str) -> CheckResult:
    text = run_quantize(request).text
    label = f"quantize --map {request.map.value} --n {request.n} --expr {request.expr!r}"
    detail = f"{label} -> {text}" if text == expected else f"{label}: {mismatch(text, expected)}"
    return verdict(name, text == expected, detail, cite(key))


def cli_oscillator_example(settings: Settings) -> CheckResult:
    request = QuantizeRequest(map=MapKind.TT2, n=1, expr="p1^2/(2*m) + (m*omega^2*q1^2)/2")
    return _quantize_example("cli_oscillator_example", "X.1", request, TT2_OSCILLATOR_TEXT)


def cli_position_example(settings: Settings) -> CheckResult:
    request = QuantizeRequest(map=MapKind.KS, n=1, expr="q1")
    return _quantize_example("cli_position_example", "X.2", request, KS_POSITION_TEXT)


def cli_angular_commutator_example(settings: Settings) -> CheckResult:
    request = CommuteRequest(map=MapKind.TT2, n=3, a="L1", b="L2", expect="i*hbar*TT2(L3)")
    report = run_commute(request)
    detail = f"commute L1 L2 --expect {request.expect!r}: matches={report.matches}"
    return verdict("cli_angular_commutator_example", report.matches is True, detail, cite("X.3"))
