import random

from loguru import logger

from tuned_quant.checks.common import check_reported, verdict
from tuned_quant.checks.references import cite
from tuned_quant.config import Settings
from tuned_quant.models.check import CheckResult
from tuned_quant.services.coords import (
    CotangentLift,
    cotangent_lift,
    identity,
    pushforward_function,
    pushforward_operator,
    rotate2d,
    scaling,
    shear,
    transport_diagram,
)
from tuned_quant.services.corpus import free_hamiltonian
from tuned_quant.services.diffop import apply, compose, format_operator
from tuned_quant.services.expr import PhaseContext, format_function, p
from tuned_quant.services.quantize import MapKind, QuantizationConfig, q_c
from tuned_quant.services.sampling import random_operator, random_polynomial
from tuned_quant.services.symplectic import tautological_vf


def _lifts(ctx: PhaseContext) -> list[CotangentLift]:
    return [cotangent_lift(t) for t in (identity(ctx), rotate2d(ctx), scaling(ctx, 3), shear(ctx))]


def theta_invariance(settings: Settings) -> CheckResult:
    ctx = PhaseContext(n=2)
    theta = tautological_vf(ctx)
    for lift in _lifts(ctx):
        pushed = pushforward_operator(theta, lift)
        if pushed != theta:
            detail = f"{lift.name}: pushed X_theta = {format_operator(pushed)}"
            return verdict("theta_invariance", False, detail, cite("C.1"))
    return verdict("theta_invariance", True, "identity, rotate2d, scale, shear: X_theta -> sum P_i d/dP_i", cite("C.1"))


def theta_squared_diagram(settings: Settings) -> CheckResult:
    ctx = PhaseContext(n=2)
    theta = tautological_vf(ctx)
    square = compose(theta, theta)
    pushed = pushforward_operator(square, cotangent_lift(shear(ctx)))
    return verdict(
        "theta_squared_diagram",
        pushed == square,
        f"shear: push(X_theta^2) = {format_operator(pushed)}",
        cite("C.2"),
    )


def pushforward_naturality(settings: Settings) -> CheckResult:
    ctx = PhaseContext(n=2)
    rng = random.Random(settings.seed)
    lift = cotangent_lift(shear(ctx))
    for trial in range(settings.equivariance_trials):
        op = random_operator(ctx, rng)
        f = random_polynomial(ctx, rng, degree=3, terms=3)
        lhs = apply(pushforward_operator(op, lift), pushforward_function(f, lift))
        rhs = pushforward_function(apply(op, f), lift)
        if lhs != rhs:
            return verdict("pushforward_naturality", False, f"trial {trial}: f={format_function(f)}", cite("C.3"))
    return verdict("pushforward_naturality", True, f"shear, {settings.equivariance_trials} random (A, f)", cite("C.3"))


def _equivariance(name: str, kind: MapKind, settings: Settings, reference: str) -> CheckResult:
    ctx = PhaseContext(n=2)
    cfg = QuantizationConfig.for_context(ctx, kind)
    rng = random.Random(settings.seed)
    for lift in (cotangent_lift(shear(ctx)), cotangent_lift(rotate2d(ctx))):
        for trial in range(settings.equivariance_trials):
            f = random_polynomial(ctx, rng, degree=2, terms=3)
            pushed, requantized = transport_diagram(f, lift, cfg)
            if pushed != requantized:
                return verdict(name, False, f"{lift.name} trial {trial}: f={format_function(f)}", reference)
    return verdict(name, True, f"shear and rotate2d, {settings.equivariance_trials} random f each", reference)


def ks_equivariance(settings: Settings) -> CheckResult:
    return _equivariance("ks_equivariance", MapKind.KS, settings, cite("C.4"))


def tt1_equivariance(settings: Settings) -> CheckResult:
    return _equivariance("tt1_equivariance", MapKind.TT1, settings, cite("C.5"))


def tt2_rotation_equivariance(settings: Settings) -> CheckResult:
    ctx = PhaseContext(n=2)
    cfg = QuantizationConfig.for_context(ctx, MapKind.TT2)
    rng = random.Random(settings.seed)
    lift = cotangent_lift(rotate2d(ctx))
    samples = [free_hamiltonian(ctx)]
    samples += [random_polynomial(ctx, rng, degree=2, terms=3) for _ in range(settings.equivariance_trials)]
    for f in samples:
        pushed, requantized = transport_diagram(f, lift, cfg)
        if pushed != requantized:
            return verdict("tt2_rotation_equivariance", False, f"f={format_function(f)}", cite("C.6"))
    return verdict("tt2_rotation_equivariance", True, f"rotate2d, {len(samples)} functions", cite("C.6"))


def tt2_shear_equivariance(settings: Settings) -> CheckResult:
    ctx = PhaseContext(n=2)
    cfg = QuantizationConfig.for_context(ctx, MapKind.TT2)
    pushed, requantized = transport_diagram(free_hamiltonian(ctx), cotangent_lift(shear(ctx)), cfg)
    commutes = pushed == requantized
    if not commutes:
        logger.warning("Diagram does not commute map=tt2 transform=shear f=H_FP")
    detail = "commutes" if commutes else "differs: the flat Laplacian is not preserved by the shear"
    return check_reported("tt2_shear_equivariance", f"H_FP under shear: {detail}", cite("C.7"))


def canonical_chart_dependence(settings: Settings) -> CheckResult:
    ctx = PhaseContext(n=2)
    lift = cotangent_lift(shear(ctx))
    f = p(ctx, 1) * p(ctx, 2)
    pushed = pushforward_operator(q_c(f, "X"), lift)
    requantized = q_c(pushforward_function(f, lift), "Y")
    return verdict(
        "canonical_chart_dependence",
        pushed != requantized,
        f"push(C(p1*p2)) = {format_operator(pushed)}; C(push(p1*p2)) = {format_operator(requantized)}",
        cite("C.8"),
    )
