import random

from loguru import logger

from tuned_quant.checks.common import mismatch, verdict
from tuned_quant.checks.references import cite
from tuned_quant.config import Settings
from tuned_quant.models.check import CheckResult
from tuned_quant.services.corpus import angular_momentum, free_hamiltonian, sho_hamiltonian
from tuned_quant.services.diffop import commutator, format_operator, scale
from tuned_quant.services.expr import PhaseContext, format_function, imaginary_unit, p, q, variable
from tuned_quant.services.quantize import MapKind, QuantizationConfig, canonical_pair_target, q_ks, q_tt2
from tuned_quant.services.sampling import random_polynomial
from tuned_quant.services.symplectic import poisson_bracket

_CYCLIC = ((1, 2, 3), (2, 3, 1), (3, 1, 2))


def _tt2_config(ctx: PhaseContext) -> QuantizationConfig:
    return QuantizationConfig.for_context(ctx, MapKind.TT2)


def tt2_angular_algebra(settings: Settings) -> CheckResult:
    ctx = PhaseContext(n=3)
    cfg = _tt2_config(ctx)
    i_hbar = imaginary_unit(ctx) * variable(ctx, "hbar")
    ops = {a: q_tt2(angular_momentum(ctx, a), cfg) for a in (1, 2, 3)}
    for a, b, c in _CYCLIC:
        actual = commutator(ops[a], ops[b])
        expected = scale(ops[c], i_hbar)
        if actual != expected:
            detail = f"[TT2(L{a}), TT2(L{b})]: {mismatch(format_operator(actual), format_operator(expected))}"
            return verdict("tt2_angular_algebra", False, detail, cite("T.10"))
    return verdict(
        "tt2_angular_algebra", True, "[TT2(La), TT2(Lb)] = i*hbar*TT2(Lc) for all cyclic (a,b,c)",
        cite("T.10"),
    )


def _commutes_with(name: str, hamiltonian_label: str, reference: str, free: bool) -> CheckResult:
    ctx = PhaseContext(n=3)
    cfg = _tt2_config(ctx)
    hamiltonian = q_tt2(free_hamiltonian(ctx) if free else sho_hamiltonian(ctx), cfg)
    for a in (1, 2, 3):
        bracket = commutator(q_tt2(angular_momentum(ctx, a), cfg), hamiltonian)
        if not bracket.is_zero:
            return verdict(name, False, f"[TT2(L{a}), TT2({hamiltonian_label})] = {format_operator(bracket)}", reference)
    return verdict(name, True, f"[TT2(La), TT2({hamiltonian_label})] = 0 for a = 1,2,3", reference)


def tt2_free_particle(settings: Settings) -> CheckResult:
    return _commutes_with("tt2_free_particle", "H_FP", cite("T.11"), free=True)


def tt2_isotropic_oscillator(settings: Settings) -> CheckResult:
    return _commutes_with("tt2_isotropic_oscillator", "H_SHO", cite("T.12"), free=False)


def tt2_canonical_pairs(settings: Settings) -> CheckResult:
    ctx = PhaseContext(n=3)
    cfg = _tt2_config(ctx)
    for i in range(1, 4):
        for j in range(1, 4):
            actual = commutator(q_tt2(q(ctx, i), cfg), q_tt2(p(ctx, j), cfg))
            expected = canonical_pair_target(ctx, i, j)
            if actual != expected:
                detail = f"[TT2(q{i}), TT2(p{j})]: {mismatch(format_operator(actual), format_operator(expected))}"
                return verdict("tt2_canonical_pairs", False, detail, cite("T.13"))
    return verdict("tt2_canonical_pairs", True, "[TT2(qi), TT2(pj)] = i*hbar*delta_ij", cite("T.13"))


def prequantization_sign(ctx: PhaseContext) -> int:
    """Sign s with [Q_KS(q1), Q_KS(p1)] = s*i*hbar*Q_KS({q1, p1})."""
    lhs = commutator(q_ks(q(ctx, 1)), q_ks(p(ctx, 1)))
    rhs = scale(q_ks(poisson_bracket(q(ctx, 1), p(ctx, 1))), imaginary_unit(ctx) * variable(ctx, "hbar"))
    if lhs == rhs:
        return 1
    if lhs == -rhs:
        return -1
    raise ValueError("No consistent prequantization sign for the canonical pair")


def ks_prequantization(settings: Settings) -> CheckResult:
    ctx = PhaseContext(n=2)
    rng = random.Random(settings.seed)
    sign = prequantization_sign(ctx)
    i_hbar = imaginary_unit(ctx) * variable(ctx, "hbar")
    for trial in range(settings.property_trials):
        f = random_polynomial(ctx, rng, degree=3, terms=3)
        g = random_polynomial(ctx, rng, degree=3, terms=3)
        lhs = commutator(q_ks(f), q_ks(g))
        rhs = scale(q_ks(poisson_bracket(f, g)), i_hbar * sign)
        if lhs != rhs:
            detail = f"trial {trial}: f={format_function(f)} g={format_function(g)}"
            return verdict("ks_prequantization", False, detail, cite("K.5"))
    logger.debug("Prequantization property held trials={} sign={}", settings.property_trials, sign)
    return verdict(
        "ks_prequantization", True, f"sign s={sign:+d}; {settings.property_trials} random pairs, zero failures",
        cite("K.5"),
    )
