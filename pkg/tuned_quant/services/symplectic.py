"""Canonical structures on T*Q in Darboux coordinates (q1..qn, p1..pn).

Sign conventions follow the coordinate formulas:

    X_f    = -(df/dp_i) d/dq^i + (df/dq^i) d/dp_i
    {f, g} = sum_i df/dq^i dg/dp_i - df/dp_i dg/dq^i
    X_theta = sum_i p_i d/dp_i

so that X_f(g) = {f, g} and [X_f, X_g] = X_{{f,g}}.
"""

import json
from collections.abc import Mapping, Sequence
from fractions import Fraction
from typing import Any, Literal

from loguru import logger
from pydantic import BaseModel, ConfigDict, model_validator

from tuned_quant.services.diffop import (
    DiffOperator,
    add,
    compose,
    derivative,
    from_function,
    scale,
    zero_operator,
)
from tuned_quant.services.errors import SingularMetricError
from tuned_quant.services.expr import (
    PhaseContext,
    PhaseFunction,
    canonical_parts,
    check_same_context,
    constant,
    differentiate,
    gaussian_parts,
    parse,
    variable,
)
from tuned_quant.services.matrices import determinant, inverse, sqrt_abs


class VectorField(DiffOperator):
    """First-order operator without a multiplication part."""

    __slots__ = ()

    def __init__(self, ctx: PhaseContext, terms: Mapping[tuple[int, ...], PhaseFunction] | None = None) -> None:
        super().__init__(ctx, terms)
        for index in self.terms:
            if sum(index) != 1:
                raise ValueError(f"Vector field term {index} is not a first-order derivative")

    @classmethod
    def from_operator(cls, op: DiffOperator) -> "VectorField":
        return cls(op.ctx, dict(op.terms))

    @classmethod
    def from_components(
        cls, ctx: PhaseContext, q_components: Sequence[PhaseFunction], p_components: Sequence[PhaseFunction]
    ) -> "VectorField":
        n = ctx.n
        if len(q_components) != n or len(p_components) != n:
            raise ValueError(f"Expected {n} q- and {n} p-components")
        terms: dict[tuple[int, ...], PhaseFunction] = {}
        for k, component in enumerate(list(q_components) + list(p_components)):
            index = [0] * (2 * n)
            index[k] = 1
            terms[tuple(index)] = component
        return cls(ctx, terms)

    def q_component(self, i: int) -> PhaseFunction:
        index = [0] * (2 * self.ctx.n)
        index[i - 1] = 1
        return self.coefficient(tuple(index))

    def p_component(self, i: int) -> PhaseFunction:
        index = [0] * (2 * self.ctx.n)
        index[self.ctx.n + i - 1] = 1
        return self.coefficient(tuple(index))


def hamiltonian_vf(f: PhaseFunction) -> VectorField:
    ctx = f.ctx
    q_components = [-differentiate(f, p) for p in ctx.p_names]
    p_components = [differentiate(f, q) for q in ctx.q_names]
    return VectorField.from_components(ctx, q_components, p_components)


def poisson_bracket(f: PhaseFunction, g: PhaseFunction) -> PhaseFunction:
    check_same_context(f.ctx, g.ctx)
    total = constant(f.ctx, 0)
    for q, p in zip(f.ctx.q_names, f.ctx.p_names):
        total = total + differentiate(f, q) * differentiate(g, p) - differentiate(f, p) * differentiate(g, q)
    return total


def tautological_vf(ctx: PhaseContext) -> VectorField:
    zeros = [constant(ctx, 0)] * ctx.n
    return VectorField.from_components(ctx, zeros, [variable(ctx, p) for p in ctx.p_names])


def theta_contract(field: VectorField) -> PhaseFunction:
    """theta(X) = sum_i p_i a^i for theta = p_i dq^i."""
    ctx = field.ctx
    total = constant(ctx, 0)
    for i, p in enumerate(ctx.p_names, start=1):
        total = total + variable(ctx, p) * field.q_component(i)
    return total


def symplectic_pairing(x: VectorField, y: VectorField) -> PhaseFunction:
    """omega(X, Y) for omega = dp_i ^ dq^i."""
    check_same_context(x.ctx, y.ctx)
    total = constant(x.ctx, 0)
    for i in range(1, x.ctx.n + 1):
        total = total + x.p_component(i) * y.q_component(i) - x.q_component(i) * y.p_component(i)
    return total


def is_vertical(field: VectorField) -> bool:
    return all(field.q_component(i).is_zero for i in range(1, field.ctx.n + 1))


def _is_real(f: PhaseFunction) -> bool:
    numer, denom = canonical_parts(f)
    return all(gaussian_parts(c)[1] == 0 for poly in (numer, denom) for c in poly.coeffs())


def _real_value(f: PhaseFunction) -> Fraction:
    numer, _ = canonical_parts(f)
    return gaussian_parts(numer.LC)[0]


class Metric(BaseModel):
    """Symmetric metric over phase space or over configuration space."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    ctx: PhaseContext
    rows: tuple[tuple[PhaseFunction, ...], ...]
    over: Literal["phase", "configuration"] = "phase"
    is_flat_identity: bool = False

    @model_validator(mode="after")
    def _check(self) -> "Metric":
        size = 2 * self.ctx.n if self.over == "phase" else self.ctx.n
        if len(self.rows) != size or any(len(row) != size for row in self.rows):
            raise SingularMetricError(f"Metric over {self.over} space must be {size}x{size}")
        for mu in range(size):
            for nu in range(mu + 1, size):
                if self.rows[mu][nu] != self.rows[nu][mu]:
                    raise SingularMetricError(f"Metric is not symmetric at ({mu}, {nu})")
        if self.is_flat_identity:
            return self
        for mu, row in enumerate(self.rows):
            for nu, entry in enumerate(row):
                if not _is_real(entry):
                    raise SingularMetricError(f"Metric entry ({mu}, {nu}) is not real")
        if determinant(self.ctx, self.matrix()).is_zero:
            raise SingularMetricError("Metric determinant is identically zero")
        # Definiteness is only decidable here for constant matrices.
        if all(entry.numer.is_ground and entry.denom.is_ground for row in self.rows for entry in row):
            for k in range(1, size + 1):
                minor = determinant(self.ctx, [list(row[:k]) for row in self.rows[:k]])
                if minor.is_zero or _real_value(minor) <= 0:
                    raise SingularMetricError(f"Constant metric is not positive definite (leading minor {k})")
        return self

    @property
    def variables(self) -> tuple[str, ...]:
        return self.ctx.phase_names if self.over == "phase" else self.ctx.q_names

    def matrix(self) -> list[list[PhaseFunction]]:
        return [list(row) for row in self.rows]

    @classmethod
    def flat(cls, ctx: PhaseContext) -> "Metric":
        return cls._identity(ctx, "phase")

    @classmethod
    def flat_configuration(cls, ctx: PhaseContext) -> "Metric":
        return cls._identity(ctx, "configuration")

    @classmethod
    def _identity(cls, ctx: PhaseContext, over: Literal["phase", "configuration"]) -> "Metric":
        size = 2 * ctx.n if over == "phase" else ctx.n
        rows = tuple(tuple(constant(ctx, int(mu == nu)) for nu in range(size)) for mu in range(size))
        return cls(ctx=ctx, rows=rows, over=over, is_flat_identity=True)

    @classmethod
    def from_rows(
        cls,
        ctx: PhaseContext,
        rows: Sequence[Sequence[str | PhaseFunction]],
        over: Literal["phase", "configuration"] = "phase",
    ) -> "Metric":
        parsed = tuple(tuple(parse(entry, ctx) if isinstance(entry, str) else entry for entry in row) for row in rows)
        size = len(parsed)
        flat = all(parsed[mu][nu] == int(mu == nu) for mu in range(size) for nu in range(len(parsed[mu])))
        return cls(ctx=ctx, rows=parsed, over=over, is_flat_identity=flat)

    @classmethod
    def from_json(cls, ctx: PhaseContext, text: str, over: Literal["phase", "configuration"] = "phase") -> "Metric":
        payload: Any = json.loads(text)
        if not isinstance(payload, list) or not all(isinstance(row, list) for row in payload):
            raise SingularMetricError("Metric JSON must be a list of rows of expression strings")
        return cls.from_rows(ctx, [[str(entry) for entry in row] for row in payload], over=over)


def laplace_beltrami(g: Metric) -> DiffOperator:
    """(1/sqrt|g|) d_mu (sqrt|g| g^{mu nu} d_nu), analyst sign (Delta q^2 = +2)."""
    ctx = g.ctx
    names = g.variables
    if g.is_flat_identity:
        return add(zero_operator(ctx), *(derivative(ctx, v, v) for v in names))
    root = sqrt_abs(determinant(ctx, g.matrix()))
    inv = inverse(ctx, g.matrix())
    pieces = []
    for mu, left in enumerate(names):
        for nu, right in enumerate(names):
            weight = root * inv[mu][nu]
            if weight.is_zero:
                continue
            inner = compose(derivative(ctx, left), compose(from_function(weight), derivative(ctx, right)))
            pieces.append(scale(inner, 1 / root))
    result = add(zero_operator(ctx), *pieces)
    logger.debug("Built Laplace-Beltrami operator over={} size={} terms={}", g.over, len(names), len(result.terms))
    return result
