import random

from tuned_quant.checks.common import mismatch, verdict
from tuned_quant.checks.references import cite
from tuned_quant.config import Settings
from tuned_quant.models.check import CheckResult
from tuned_quant.services.corpus import angular_momentum, sho_hamiltonian
from tuned_quant.services.diffop import apply, commutator, derivative, format_operator, scale
from tuned_quant.services.expr import PhaseContext, constant, format_function, p, q, variable
from tuned_quant.services.quantize import theta_derivative
from tuned_quant.services.sampling import random_p_homogeneous, random_polynomial
from tuned_quant.services.symplectic import hamiltonian_vf, poisson_bracket


def _triples(settings: Settings, ctx: PhaseContext):
    rng = random.Random(settings.seed)
    for _ in range(settings.property_trials):
        yield tuple(random_polynomial(ctx, rng, degree=3, terms=3) for _ in range(3))


def poisson_antisymmetry(settings: Settings) -> CheckResult:
    ctx = PhaseContext(n=2)
    for f, g, _ in _triples(settings, ctx):
        if poisson_bracket(f, g) != -poisson_bracket(g, f):
            return verdict("poisson_antisymmetry", False, f"{{f,g}} != -{{g,f}} for f={format_function(f)}", cite("P.2"))
    return verdict("poisson_antisymmetry", True, f"{settings.property_trials} random pairs", cite("P.2"))


def poisson_jacobi(settings: Settings) -> CheckResult:
    ctx = PhaseContext(n=2)
    for f, g, h in _triples(settings, ctx):
        total = (
            poisson_bracket(f, poisson_bracket(g, h))
            + poisson_bracket(g, poisson_bracket(h, f))
            + poisson_bracket(h, poisson_bracket(f, g))
        )
        if not total.is_zero:
            return verdict("poisson_jacobi", False, f"Jacobi sum {format_function(total)}", cite("P.3"))
    return verdict("poisson_jacobi", True, f"{settings.property_trials} random triples", cite("P.3"))


def hamiltonian_leibniz(settings: Settings) -> CheckResult:
    ctx = PhaseContext(n=2)
    for f, g, h in _triples(settings, ctx):
        field = hamiltonian_vf(f)
        if apply(field, g * h) != g * apply(field, h) + h * apply(field, g):
            return verdict("hamiltonian_leibniz", False, f"Leibniz rule fails for f={format_function(f)}", cite("P.4"))
    return verdict("hamiltonian_leibniz", True, f"{settings.property_trials} random triples", cite("P.4"))


def canonical_brackets(settings: Settings) -> CheckResult:
    ctx = PhaseContext(n=3)
    for i in range(1, 4):
        for j in range(1, 4):
            if poisson_bracket(q(ctx, i), p(ctx, j)) != constant(ctx, int(i == j)):
                return verdict("canonical_brackets", False, f"{{q{i}, p{j}}} != delta", cite("P.1"))
            if not poisson_bracket(q(ctx, i), q(ctx, j)).is_zero or not poisson_bracket(p(ctx, i), p(ctx, j)).is_zero:
                return verdict("canonical_brackets", False, f"{{q{i}, q{j}}} or {{p{i}, p{j}}} nonzero", cite("P.1"))
    return verdict("canonical_brackets", True, "{qi, pj} = delta_ij, {qi, qj} = {pi, pj} = 0", cite("P.1"))


def bracket_field_compatibility(settings: Settings) -> CheckResult:
    """X_{f,g} = s [X_f, X_g] with one sign s fixed from (q1^2, p1^2)."""
    ctx = PhaseContext(n=2)
    seed_f, seed_g = q(ctx, 1) ** 2, p(ctx, 1) ** 2
    lhs = hamiltonian_vf(poisson_bracket(seed_f, seed_g))
    rhs = commutator(hamiltonian_vf(seed_f), hamiltonian_vf(seed_g))
    sign = 1 if lhs == rhs else -1
    for f, g, _ in _triples(settings, ctx):
        if hamiltonian_vf(poisson_bracket(f, g)) != sign * commutator(hamiltonian_vf(f), hamiltonian_vf(g)):
            return verdict("bracket_field_compatibility", False, f"sign s={sign:+d} fails for f={format_function(f)}", cite("P.5"))
    return verdict("bracket_field_compatibility", True, f"sign s={sign:+d}; {settings.property_trials} random pairs", cite("P.5"))


def euler_property(settings: Settings) -> CheckResult:
    ctx = PhaseContext(n=2)
    rng = random.Random(settings.seed)
    for degree in range(4):
        for _ in range(10):
            f = random_p_homogeneous(ctx, rng, degree)
            if theta_derivative(f) != degree * f:
                return verdict("euler_property", False, f"X_theta f != {degree} f for f={format_function(f)}", cite("P.6"))
    return verdict("euler_property", True, "X_theta f = d f for momentum degree d = 0..3", cite("P.6"))


def hamiltonian_field_displays(settings: Settings) -> CheckResult:
    ctx3 = PhaseContext(n=3)
    rotation = (
        scale(derivative(ctx3, "q1"), q(ctx3, 2))
        - scale(derivative(ctx3, "q2"), q(ctx3, 1))
        + scale(derivative(ctx3, "p1"), p(ctx3, 2))
        - scale(derivative(ctx3, "p2"), p(ctx3, 1))
    )
    ctx1 = PhaseContext(n=1)
    mass, omega = variable(ctx1, "m"), variable(ctx1, "omega")
    oscillator = scale(derivative(ctx1, "q1"), -p(ctx1, 1) / mass) + scale(
        derivative(ctx1, "p1"), mass * omega**2 * q(ctx1, 1)
    )
    cases = [
        ("L3", hamiltonian_vf(angular_momentum(ctx3, 3)), rotation),
        ("H_SHO", hamiltonian_vf(sho_hamiltonian(ctx1)), oscillator),
    ]
    for label, actual, expected in cases:
        if actual != expected:
            detail = f"X_{label}: {mismatch(format_operator(actual), format_operator(expected))}"
            return verdict("hamiltonian_field_displays", False, detail, cite("P.7"))
    shown = "; ".join(f"X_{label} = {format_operator(expected)}" for label, _, expected in cases)
    return verdict("hamiltonian_field_displays", True, shown, cite("P.7"))
