"""Seeded random inputs for property checks.

All generators take an explicit ``random.Random`` so a run is reproducible
from its seed.
"""

import random
from collections.abc import Sequence
from fractions import Fraction

from tuned_quant.services.diffop import DiffOperator
from tuned_quant.services.expr import PhaseContext, PhaseFunction, constant, variable


def _coefficient(rng: random.Random, bound: int, gaussian: bool) -> tuple[int, int]:
    real = 0
    while real == 0:
        real = rng.randint(-bound, bound)
    imag = rng.randint(-bound, bound) if gaussian and rng.random() < 0.25 else 0
    return real, imag


def random_monomial(ctx: PhaseContext, rng: random.Random, degree: int, names: Sequence[str]) -> PhaseFunction:
    term = constant(ctx, 1)
    for _ in range(rng.randint(0, degree)):
        term = term * variable(ctx, rng.choice(list(names)))
    return term


def random_polynomial(
    ctx: PhaseContext,
    rng: random.Random,
    degree: int = 3,
    terms: int = 4,
    bound: int = 3,
    names: Sequence[str] | None = None,
    gaussian: bool = False,
) -> PhaseFunction:
    """Sum of ``terms`` random monomials of total degree <= ``degree``."""
    names = names or ctx.phase_names
    total = constant(ctx, 0)
    for _ in range(terms):
        total = total + constant(ctx, _coefficient(rng, bound, gaussian)) * random_monomial(ctx, rng, degree, names)
    return total


def random_nonzero_polynomial(ctx: PhaseContext, rng: random.Random, degree: int = 3, terms: int = 4) -> PhaseFunction:
    while True:
        candidate = random_polynomial(ctx, rng, degree=degree, terms=terms)
        if not candidate.is_zero:
            return candidate


def random_rational(ctx: PhaseContext, rng: random.Random, degree: int = 2) -> PhaseFunction:
    numer = random_polynomial(ctx, rng, degree=degree, terms=3)
    denom = random_nonzero_polynomial(ctx, rng, degree=degree, terms=2)
    return numer / denom


def random_p_homogeneous(
    ctx: PhaseContext, rng: random.Random, p_degree: int, q_degree: int = 2, terms: int = 3
) -> PhaseFunction:
    """Random function whose every monomial has momentum degree exactly ``p_degree``."""
    total = constant(ctx, 0)
    while total.is_zero:
        for _ in range(terms):
            term = constant(ctx, _coefficient(rng, 3, False))
            term = term * random_monomial(ctx, rng, q_degree, ctx.q_names)
            for _ in range(p_degree):
                term = term * variable(ctx, rng.choice(ctx.p_names))
            total = total + term
    return total


def random_q_polynomial(ctx: PhaseContext, rng: random.Random, degree: int = 3, terms: int = 3) -> PhaseFunction:
    return random_polynomial(ctx, rng, degree=degree, terms=terms, names=ctx.q_names)


def random_operator(
    ctx: PhaseContext, rng: random.Random, max_order: int = 2, degree: int = 2, terms: int = 3
) -> DiffOperator:
    """Random operator of order <= ``max_order`` with polynomial coefficients of degree <= ``degree``."""
    size = 2 * ctx.n
    pieces: dict[tuple[int, ...], PhaseFunction] = {}
    for _ in range(terms):
        index = [0] * size
        for _ in range(rng.randint(0, max_order)):
            index[rng.randrange(size)] += 1
        coeff = random_polynomial(ctx, rng, degree=degree, terms=2)
        key = tuple(index)
        pieces[key] = pieces[key] + coeff if key in pieces else coeff
    return DiffOperator(ctx, pieces)


def random_point(ctx: PhaseContext, rng: random.Random, bound: int = 7) -> dict[str, Fraction]:
    """Random rational point binding every variable and parameter."""
    point = {}
    for name in ctx.names:
        value = Fraction(rng.randint(-bound * 4, bound * 4), rng.randint(1, 4))
        if name in ctx.param_names and value <= 0:
            value = -value + 1
        point[name] = value
    return point
