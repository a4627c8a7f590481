"""Closed-form values of the quantization maps on the reference observables."""

from tuned_quant.checks.common import mismatch, verdict
from tuned_quant.checks.references import cite
from tuned_quant.config import Settings
from tuned_quant.models.check import CheckResult
from tuned_quant.services.corpus import angular_momentum, sho_hamiltonian
from tuned_quant.services.diffop import DiffOperator, derivative, format_operator, from_function, scale
from tuned_quant.services.expr import PhaseContext, PhaseFunction, imaginary_unit, p, q, variable
from tuned_quant.services.quantize import MapKind, QuantizationConfig, quantize, theta_derivative, tuning_indicator

Case = tuple[str, PhaseFunction, DiffOperator]


def _i_hbar(ctx: PhaseContext) -> PhaseFunction:
    return imaginary_unit(ctx) * variable(ctx, "hbar")


def _compare(name: str, reference: str, kind: MapKind, cases: list[Case]) -> CheckResult:
    for label, f, target in cases:
        cfg = QuantizationConfig.for_context(f.ctx, kind)
        actual = quantize(f, cfg)
        if actual != target:
            detail = f"{kind.value}({label}): {mismatch(format_operator(actual), format_operator(target))}"
            return verdict(name, False, detail, reference)
    shown = "; ".join(f"{kind.value}({label}) = {format_operator(target)}" for label, _, target in cases)
    return verdict(name, True, shown, reference)


def ks_position_target(ctx: PhaseContext, i: int) -> DiffOperator:
    return from_function(q(ctx, i)) + scale(derivative(ctx, f"p{i}"), _i_hbar(ctx))


def momentum_target(ctx: PhaseContext, i: int) -> DiffOperator:
    return scale(derivative(ctx, f"q{i}"), -_i_hbar(ctx))


def angular_target(ctx: PhaseContext) -> DiffOperator:
    """i*hbar*(q2 d/dq1 - q1 d/dq2 + p2 d/dp1 - p1 d/dp2)."""
    rotation = (
        scale(derivative(ctx, "q1"), q(ctx, 2))
        - scale(derivative(ctx, "q2"), q(ctx, 1))
        + scale(derivative(ctx, "p1"), p(ctx, 2))
        - scale(derivative(ctx, "p2"), p(ctx, 1))
    )
    return scale(rotation, _i_hbar(ctx))


def ks_oscillator_target(ctx: PhaseContext) -> DiffOperator:
    mass, omega = variable(ctx, "m"), variable(ctx, "omega")
    field = scale(derivative(ctx, "q1"), -p(ctx, 1) / mass) + scale(derivative(ctx, "p1"), mass * omega**2 * q(ctx, 1))
    scalar = -p(ctx, 1) ** 2 / (2 * mass) + mass * omega**2 * q(ctx, 1) ** 2 / 2
    return scale(field, _i_hbar(ctx)) + scalar


def tt2_oscillator_target(ctx: PhaseContext) -> DiffOperator:
    mass, omega, hbar = variable(ctx, "m"), variable(ctx, "omega"), variable(ctx, "hbar")
    laplacian = derivative(ctx, "q1", "q1") + derivative(ctx, "p1", "p1")
    return from_function(mass * omega**2 * q(ctx, 1) ** 2 / 2) + scale(laplacian, -(hbar**2) / (2 * mass))


def _coordinates(ctx: PhaseContext, position: bool) -> list[Case]:
    if position:
        return [(f"q{i}", q(ctx, i), from_function(q(ctx, i))) for i in range(1, ctx.n + 1)]
    return [(f"p{i}", p(ctx, i), momentum_target(ctx, i)) for i in range(1, ctx.n + 1)]


def ks_position(settings: Settings) -> CheckResult:
    ctx = PhaseContext(n=3)
    cases = [(f"q{i}", q(ctx, i), ks_position_target(ctx, i)) for i in range(1, 4)]
    return _compare("ks_position", cite("K.1"), MapKind.KS, cases)


def ks_momentum(settings: Settings) -> CheckResult:
    return _compare("ks_momentum", cite("K.2"), MapKind.KS, _coordinates(PhaseContext(n=3), False))


def ks_angular_momentum(settings: Settings) -> CheckResult:
    ctx = PhaseContext(n=3)
    cases = [("L3", angular_momentum(ctx, 3), angular_target(ctx))]
    return _compare("ks_angular_momentum", cite("K.3"), MapKind.KS, cases)


def ks_oscillator(settings: Settings) -> CheckResult:
    ctx = PhaseContext(n=1)
    cases = [("H_SHO", sho_hamiltonian(ctx), ks_oscillator_target(ctx))]
    return _compare("ks_oscillator", cite("K.4"), MapKind.KS, cases)


def tt1_position(settings: Settings) -> CheckResult:
    return _compare("tt1_position", cite("T.2"), MapKind.TT1, _coordinates(PhaseContext(n=3), True))


def tt1_momentum(settings: Settings) -> CheckResult:
    return _compare("tt1_momentum", cite("T.3"), MapKind.TT1, _coordinates(PhaseContext(n=3), False))


def tt1_angular_momentum(settings: Settings) -> CheckResult:
    ctx = PhaseContext(n=3)
    cases = [("L3", angular_momentum(ctx, 3), angular_target(ctx))]
    return _compare("tt1_angular_momentum", cite("T.4"), MapKind.TT1, cases)


def tt1_oscillator(settings: Settings) -> CheckResult:
    ctx = PhaseContext(n=1)
    cases = [("H_SHO", sho_hamiltonian(ctx), ks_oscillator_target(ctx))]
    return _compare("tt1_oscillator", cite("T.5"), MapKind.TT1, cases)


def tt2_position(settings: Settings) -> CheckResult:
    return _compare("tt2_position", cite("T.6"), MapKind.TT2, _coordinates(PhaseContext(n=3), True))


def tt2_momentum(settings: Settings) -> CheckResult:
    return _compare("tt2_momentum", cite("T.7"), MapKind.TT2, _coordinates(PhaseContext(n=3), False))


def tt2_angular_momentum(settings: Settings) -> CheckResult:
    ctx = PhaseContext(n=3)
    cases = [("L3", angular_momentum(ctx, 3), angular_target(ctx))]
    return _compare("tt2_angular_momentum", cite("T.8"), MapKind.TT2, cases)


def tt2_oscillator(settings: Settings) -> CheckResult:
    ctx = PhaseContext(n=1)
    cases = [("H_SHO", sho_hamiltonian(ctx), tt2_oscillator_target(ctx))]
    return _compare("tt2_oscillator", cite("T.9"), MapKind.TT2, cases)


def tuning_indicators(settings: Settings) -> CheckResult:
    """I[X_theta q1] = 0, I[X_theta p1] = 1, I[(2 X_theta - X_theta^2) H_SHO] = 0."""
    ctx = PhaseContext(n=1)
    hamiltonian = sho_hamiltonian(ctx)
    theta_h = theta_derivative(hamiltonian)
    cases = [
        ("X_theta(q1)", theta_derivative(q(ctx, 1)), 0),
        ("X_theta(p1)", theta_derivative(p(ctx, 1)), 1),
        ("(2X_theta - X_theta^2)(H_SHO)", 2 * theta_h - theta_derivative(theta_h), 0),
    ]
    for label, g, expected in cases:
        actual = tuning_indicator(g)
        if actual != expected:
            return verdict("tuning_indicators", False, f"I[{label}]: {mismatch(actual, expected)}", cite("T.1"))
    shown = "; ".join(f"I[{label}] = {expected}" for label, _, expected in cases)
    return verdict("tuning_indicators", True, shown, cite("T.1"))
