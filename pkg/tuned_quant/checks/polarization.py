from tuned_quant.checks.common import mismatch, verdict
from tuned_quant.checks.references import cite
from tuned_quant.config import Settings
from tuned_quant.models.check import CheckResult
from tuned_quant.services.corpus import angular_momentum, corpus
from tuned_quant.services.diffop import (
    derivative,
    format_operator,
    from_function,
    preserves_polarization,
    restrict_to_polarized,
    scale,
)
from tuned_quant.services.expr import PhaseContext, imaginary_unit, q, variable
from tuned_quant.services.quantize import MapKind, QuantizationConfig, q_ks, q_tt2


def tt2_preserves_polarization(settings: Settings) -> CheckResult:
    ctx = PhaseContext(n=3)
    cfg = QuantizationConfig.for_context(ctx, MapKind.TT2)
    offenders = [name for name, f in corpus(ctx).items() if not preserves_polarization(q_tt2(f, cfg))]
    return verdict(
        "tt2_preserves_polarization",
        not offenders,
        f"not preserved: {', '.join(offenders)}" if offenders else "qi, pi, La, H_FP, H_SHO",
        cite("V.3"),
    )


def ks_restricted_position(settings: Settings) -> CheckResult:
    ctx = PhaseContext(n=3)
    for i in range(1, 4):
        restricted = restrict_to_polarized(q_ks(q(ctx, i)))
        if restricted != from_function(q(ctx, i)):
            detail = f"restricted KS(q{i}) = {format_operator(restricted)}"
            return verdict("ks_restricted_position", False, detail, cite("V.1"))
    return verdict("ks_restricted_position", True, "restrict(KS(qi)) = qi", cite("V.1"))


def ks_breaks_polarization(settings: Settings) -> CheckResult:
    """KS(H_SHO) keeps a momentum-dependent multiplication part on polarized states."""
    ctx = PhaseContext(n=1)
    cfg = QuantizationConfig.for_context(ctx, MapKind.KS)
    preserved = preserves_polarization(q_ks(corpus(ctx)["H_SHO"], cfg))
    detail = f"preserves_polarization(KS(H_SHO)) = {preserved}"
    return verdict("ks_breaks_polarization", not preserved, detail, cite("V.2"))


def tt2_restricted_angular_momentum(settings: Settings) -> CheckResult:
    """Only the configuration rotation of TT2(L3) survives on polarized states."""
    ctx = PhaseContext(n=3)
    cfg = QuantizationConfig.for_context(ctx, MapKind.TT2)
    restricted = restrict_to_polarized(q_tt2(angular_momentum(ctx, 3), cfg))
    rotation = scale(derivative(ctx, "q1"), q(ctx, 2)) - scale(derivative(ctx, "q2"), q(ctx, 1))
    expected = scale(rotation, imaginary_unit(ctx) * variable(ctx, "hbar"))
    if restricted != expected:
        detail = f"restricted TT2(L3): {mismatch(format_operator(restricted), format_operator(expected))}"
        return verdict("tt2_restricted_angular_momentum", False, detail, cite("V.4"))
    return verdict(
        "tt2_restricted_angular_momentum", True, f"restrict(TT2(L3)) = {format_operator(expected)}", cite("V.4")
    )
