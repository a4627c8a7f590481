from loguru import logger

from tuned_quant.config import parse_params
from tuned_quant.models.operator import (
    CommuteReport,
    CommuteRequest,
    OperatorReport,
    OperatorTerm,
    QuantizeRequest,
    SpectrumRequest,
    TransformReport,
    TransformRequest,
)
from tuned_quant.services.coords import builtin, cotangent_lift, transport_diagram
from tuned_quant.services.corpus import builtin_macros
from tuned_quant.services.diffop import (
    DiffOperator,
    commutator,
    format_operator,
    preserves_polarization,
    restrict_to_polarized,
    to_json,
)
from tuned_quant.services.errors import QuantizationConfigError
from tuned_quant.services.expr import PhaseContext, parse
from tuned_quant.services.quantize import MapKind, QuantizationConfig, parse_operator, quantize
from tuned_quant.services.spectral import Grid1D, SpectrumReport, sho_spectrum_report
from tuned_quant.services.symplectic import Metric


def operator_report(op: DiffOperator) -> OperatorReport:
    return OperatorReport(
        text=format_operator(op),
        terms=[OperatorTerm(**term) for term in to_json(op)],
        polarized_text=format_operator(restrict_to_polarized(op)),
        preserves_polarization=preserves_polarization(op),
    )


def build_config(
    ctx: PhaseContext,
    map_kind: MapKind,
    metric: str | None = None,
    metric_kind: str = "phase",
    strict: bool = False,
) -> QuantizationConfig:
    if metric_kind not in ("phase", "configuration"):
        raise QuantizationConfigError(f"Unknown metric kind {metric_kind!r}")
    if metric:
        chosen = Metric.from_json(ctx, metric, over=metric_kind)  # type: ignore[arg-type]
    elif metric_kind == "configuration":
        chosen = Metric.flat_configuration(ctx)
    else:
        chosen = Metric.flat(ctx)
    return QuantizationConfig(map_kind=map_kind, metric=chosen, strict=strict)


def run_quantize(request: QuantizeRequest) -> OperatorReport:
    ctx = PhaseContext(n=request.n)
    cfg = build_config(ctx, request.map, request.metric, request.metric_kind, request.strict)
    f = parse(request.expr, ctx, builtin_macros(ctx))
    op = quantize(f, cfg)
    logger.info("Quantized map={} n={} terms={}", request.map.value, request.n, len(op.terms))
    return operator_report(op)


def run_commute(request: CommuteRequest) -> CommuteReport:
    ctx = PhaseContext(n=request.n)
    cfg = build_config(ctx, request.map)
    macros = builtin_macros(ctx)
    a = quantize(parse(request.a, ctx, macros), cfg)
    b = quantize(parse(request.b, ctx, macros), cfg)
    result = commutator(a, b)
    if request.expect is None:
        logger.info("Commutator map={} n={} terms={}", request.map.value, request.n, len(result.terms))
        return CommuteReport(commutator=operator_report(result))
    expected = parse_operator(request.expect, ctx, cfg, macros)
    matches = result == expected
    logger.info("Commutator checked map={} n={} matches={}", request.map.value, request.n, matches)
    return CommuteReport(commutator=operator_report(result), expected=format_operator(expected), matches=matches)


def run_transform(request: TransformRequest) -> TransformReport:
    ctx = PhaseContext(n=request.n)
    cfg = build_config(ctx, request.map)
    lift = cotangent_lift(builtin(request.transform, ctx))
    f = parse(request.expr, ctx, builtin_macros(ctx))
    pushed, requantized = transport_diagram(f, lift, cfg)
    commutes = pushed == requantized
    logger.info("Diagram checked map={} transform={} commutes={}", request.map.value, lift.name, commutes)
    return TransformReport(
        transform=lift.name,
        pushed=operator_report(pushed),
        requantized=operator_report(requantized),
        commutes=commutes,
    )


def run_spectrum(request: SpectrumRequest) -> SpectrumReport:
    params = parse_params(request.params)
    grid = Grid1D(half_width=request.domain, points=request.grid)
    return sho_spectrum_report(grid, params, request.count)
