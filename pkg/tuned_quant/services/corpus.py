from tuned_quant.services.errors import DimensionError
from tuned_quant.services.expr import PhaseContext, PhaseFunction, constant, p, q, variable

# L^a = eps_abc q^b p_c
_ANGULAR_AXES = {1: (2, 3), 2: (3, 1), 3: (1, 2)}


def angular_momentum(ctx: PhaseContext, a: int) -> PhaseFunction:
    b, c = _ANGULAR_AXES[a]
    if max(b, c) > ctx.n:
        raise DimensionError(f"L{a} needs n >= {max(b, c)}, got n={ctx.n}")
    return q(ctx, b) * p(ctx, c) - q(ctx, c) * p(ctx, b)


def free_hamiltonian(ctx: PhaseContext) -> PhaseFunction:
    mass = variable(ctx, "m")
    kinetic = sum((p(ctx, i) ** 2 for i in range(1, ctx.n + 1)), constant(ctx, 0))
    return kinetic / (2 * mass)


def sho_hamiltonian(ctx: PhaseContext) -> PhaseFunction:
    mass = variable(ctx, "m")
    omega = variable(ctx, "omega")
    potential = sum((q(ctx, i) ** 2 for i in range(1, ctx.n + 1)), constant(ctx, 0))
    return free_hamiltonian(ctx) + mass * omega**2 * potential / 2


def builtin_macros(ctx: PhaseContext) -> dict[str, PhaseFunction]:
    """Macros usable in expressions; angular momenta only where n allows them."""
    macros: dict[str, PhaseFunction] = {}
    for a, (b, c) in _ANGULAR_AXES.items():
        if max(b, c) <= ctx.n:
            macros[f"L{a}"] = angular_momentum(ctx, a)
    if {"m", "omega"} <= set(ctx.param_names):
        macros["H_FP"] = free_hamiltonian(ctx)
        macros["H_SHO"] = sho_hamiltonian(ctx)
    return macros


def corpus(ctx: PhaseContext) -> dict[str, PhaseFunction]:
    """Coordinates plus every macro: the reference set of physical observables."""
    functions = {name: variable(ctx, name) for name in ctx.phase_names}
    functions.update(builtin_macros(ctx))
    return functions
