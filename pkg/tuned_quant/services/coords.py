"""Cotangent lifts of rational point transformations.

A new chart reuses the variable names of the old one: after a pushforward,
``q1`` means ``Q1`` and ``p1`` means ``P1``. Bindings are kept in both
directions so functions and operators can be moved either way by
substitution.
"""

import re
from collections.abc import Sequence
from fractions import Fraction

from loguru import logger
from pydantic import BaseModel, ConfigDict, model_validator

from tuned_quant.services.diffop import DiffOperator, add, compose, derivative, from_function, scale, zero_operator
from tuned_quant.services.errors import InverseMismatchError, SingularJacobianError, UnknownIdentifierError
from tuned_quant.services.expr import (
    PhaseContext,
    PhaseFunction,
    check_same_context,
    constant,
    depends_on,
    differentiate,
    format_function,
    substitute,
    variable,
)
from tuned_quant.services.matrices import determinant, inverse
from tuned_quant.services.quantize import QuantizationConfig, quantize


class PointTransformation(BaseModel):
    """Q^i = forward_i(q) with user-supplied inverse q^i = inverse_i(Q)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    ctx: PhaseContext
    name: str
    forward: tuple[PhaseFunction, ...]
    inverse: tuple[PhaseFunction, ...]

    @model_validator(mode="after")
    def _check_inverse(self) -> "PointTransformation":
        ctx = self.ctx
        if len(self.forward) != ctx.n or len(self.inverse) != ctx.n:
            raise InverseMismatchError(f"Transformation {self.name} needs {ctx.n} forward and inverse components")
        for component in self.forward + self.inverse:
            check_same_context(ctx, component.ctx)
            if depends_on(component, ctx.p_names):
                raise InverseMismatchError(f"Point transformation {self.name} must not depend on momenta")
        to_inverse = dict(zip(ctx.q_names, self.inverse))
        to_forward = dict(zip(ctx.q_names, self.forward))
        for i, name in enumerate(ctx.q_names):
            coordinate = variable(ctx, name)
            if substitute(self.forward[i], to_inverse) != coordinate:
                raise InverseMismatchError(f"forward(inverse(Q)) differs from Q at component {name} for {self.name}")
            if substitute(self.inverse[i], to_forward) != coordinate:
                raise InverseMismatchError(f"inverse(forward(q)) differs from q at component {name} for {self.name}")
        return self

    def jacobian(self) -> list[list[PhaseFunction]]:
        """J[i][j] = dQ^i/dq^j as functions of the old chart."""
        return [[differentiate(f, q) for q in self.ctx.q_names] for f in self.forward]

    def inverse_jacobian(self) -> list[list[PhaseFunction]]:
        """K[j][i] = dq^j/dQ^i as functions of the new chart."""
        return [[differentiate(g, q) for q in self.ctx.q_names] for g in self.inverse]


class CotangentLift(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    transformation: PointTransformation
    to_new: dict[str, PhaseFunction]
    to_old: dict[str, PhaseFunction]

    @property
    def ctx(self) -> PhaseContext:
        return self.transformation.ctx

    @property
    def name(self) -> str:
        return self.transformation.name


def cotangent_lift(transformation: PointTransformation) -> CotangentLift:
    ctx = transformation.ctx
    n = ctx.n
    jac = transformation.jacobian()
    if determinant(ctx, jac).is_zero:
        raise SingularJacobianError(f"Jacobian of {transformation.name} is identically singular")
    inv_jac = transformation.inverse_jacobian()
    q_to_new = dict(zip(ctx.q_names, transformation.inverse))
    q_to_old = dict(zip(ctx.q_names, transformation.forward))
    new_p = [variable(ctx, name) for name in ctx.p_names]

    to_new: dict[str, PhaseFunction] = dict(q_to_new)
    to_old: dict[str, PhaseFunction] = dict(q_to_old)
    for j, p_name in enumerate(ctx.p_names):
        # p_j = sum_i P_i dQ^i/dq^j evaluated at q = inverse(Q)
        to_new[p_name] = sum((substitute(jac[i][j], q_to_new) * new_p[i] for i in range(n)), constant(ctx, 0))
    for i, p_name in enumerate(ctx.p_names):
        # P_i = sum_j p_j dq^j/dQ^i evaluated at Q = forward(q)
        to_old[p_name] = sum((substitute(inv_jac[j][i], q_to_old) * new_p[j] for j in range(n)), constant(ctx, 0))

    for k, p_name in enumerate(ctx.p_names):
        pairing = sum((to_old[ctx.p_names[i]] * jac[i][k] for i in range(n)), constant(ctx, 0))
        if pairing != variable(ctx, p_name):
            raise InverseMismatchError(f"Lift of {transformation.name} does not preserve the tautological one-form")
    logger.debug("Built cotangent lift name={} n={}", transformation.name, n)
    return CotangentLift(transformation=transformation, to_new=to_new, to_old=to_old)


def pushforward_function(f: PhaseFunction, lift: CotangentLift) -> PhaseFunction:
    check_same_context(f.ctx, lift.ctx)
    return substitute(f, lift.to_new)


def pullback_function(f: PhaseFunction, lift: CotangentLift) -> PhaseFunction:
    check_same_context(f.ctx, lift.ctx)
    return substitute(f, lift.to_old)


def _old_derivatives(lift: CotangentLift) -> list[DiffOperator]:
    """d/dx_k of the old chart written as first-order operators in the new chart."""
    ctx = lift.ctx
    new_coordinates = [lift.to_old[name] for name in ctx.phase_names]
    fields = []
    for old in ctx.phase_names:
        pieces = []
        for name, y in zip(ctx.phase_names, new_coordinates):
            weight = differentiate(y, old)
            if not weight.is_zero:
                pieces.append(scale(derivative(ctx, name), pushforward_function(weight, lift)))
        fields.append(add(zero_operator(ctx), *pieces))
    return fields


def pushforward_operator(op: DiffOperator, lift: CotangentLift) -> DiffOperator:
    """Operator B on the new chart with B(push f) = push(A f)."""
    check_same_context(op.ctx, lift.ctx)
    ctx = op.ctx
    chain = _old_derivatives(lift)
    pieces = []
    for index, coeff in op.terms.items():
        term = from_function(pushforward_function(coeff, lift))
        for field, count in zip(chain, index):
            for _ in range(count):
                term = compose(term, field)
        pieces.append(term)
    result = add(zero_operator(ctx), *pieces)
    logger.debug("Pushed operator lift={} terms_in={} terms_out={}", lift.name, len(op.terms), len(result.terms))
    return result


def transport_diagram(
    f: PhaseFunction, lift: CotangentLift, cfg: QuantizationConfig
) -> tuple[DiffOperator, DiffOperator]:
    """Both paths around the square: (push(Q(f)), Q(push f))."""
    pushed = pushforward_operator(quantize(f, cfg), lift)
    requantized = quantize(pushforward_function(f, lift), cfg)
    return pushed, requantized


# Built-in transformations


def _from_components(
    ctx: PhaseContext, name: str, forward: Sequence[PhaseFunction], inverse_: Sequence[PhaseFunction]
) -> PointTransformation:
    return PointTransformation(ctx=ctx, name=name, forward=tuple(forward), inverse=tuple(inverse_))


def identity(ctx: PhaseContext) -> PointTransformation:
    coordinates = [variable(ctx, q) for q in ctx.q_names]
    return _from_components(ctx, "identity", coordinates, coordinates)


def scaling(ctx: PhaseContext, factor: Fraction | int = 2) -> PointTransformation:
    factor = Fraction(factor)
    if factor == 0:
        raise SingularJacobianError("Scale factor must be nonzero")
    coordinates = [variable(ctx, q) for q in ctx.q_names]
    forward = [c * factor for c in coordinates]
    return _from_components(ctx, f"scale({factor})", forward, [c / factor for c in coordinates])


def shear(ctx: PhaseContext) -> PointTransformation:
    """Q2 = q2 + q1^2, other coordinates unchanged."""
    if ctx.n < 2:
        raise InverseMismatchError("shear needs n >= 2")
    coordinates = [variable(ctx, q) for q in ctx.q_names]
    forward = list(coordinates)
    inverse_ = list(coordinates)
    forward[1] = coordinates[1] + coordinates[0] ** 2
    inverse_[1] = coordinates[1] - coordinates[0] ** 2
    return _from_components(ctx, "shear", forward, inverse_)


def linear(ctx: PhaseContext, matrix: Sequence[Sequence[Fraction | int]], name: str = "linear") -> PointTransformation:
    """Q = M q for an invertible rational matrix acting on (q1..qk), k <= n."""
    size = len(matrix)
    if size > ctx.n or any(len(row) != size for row in matrix):
        raise InverseMismatchError(f"Linear map must be a square matrix of size <= {ctx.n}")
    rows = [[constant(ctx, Fraction(entry)) for entry in row] for row in matrix]
    if determinant(ctx, rows).is_zero:
        raise SingularJacobianError(f"Matrix of {name} is singular")
    inv_rows = inverse(ctx, rows)
    coordinates = [variable(ctx, q) for q in ctx.q_names]
    forward = list(coordinates)
    inverse_ = list(coordinates)
    for i in range(size):
        forward[i] = sum((rows[i][j] * coordinates[j] for j in range(size)), constant(ctx, 0))
        inverse_[i] = sum((inv_rows[i][j] * coordinates[j] for j in range(size)), constant(ctx, 0))
    return _from_components(ctx, name, forward, inverse_)


def rotate2d(ctx: PhaseContext, t: Fraction | int = Fraction(1, 2)) -> PointTransformation:
    """Rotation in the (q1, q2) plane with cos = (1-t^2)/(1+t^2), sin = 2t/(1+t^2)."""
    if ctx.n < 2:
        raise InverseMismatchError("rotate2d needs n >= 2")
    t = Fraction(t)
    cos = (1 - t * t) / (1 + t * t)
    sin = 2 * t / (1 + t * t)
    return linear(ctx, [[cos, -sin], [sin, cos]], name=f"rotate2d({t})")


_CALL = re.compile(r"^\s*([a-z0-9_]+)\s*(?:\(\s*([^)]*)\s*\))?\s*$")


def builtin(text: str, ctx: PhaseContext) -> PointTransformation:
    """Resolve ``identity``, ``scale``, ``scale(3)``, ``shear``, ``rotate2d`` or ``rotate2d(1/3)``."""
    match = _CALL.match(text)
    if match is None:
        raise UnknownIdentifierError(text, 0)
    name, argument = match.group(1), match.group(2)
    try:
        value = Fraction(argument) if argument else None
    except ValueError:
        raise UnknownIdentifierError(argument or "", text.index("(") + 1) from None
    if name == "identity":
        return identity(ctx)
    if name == "scale":
        return scaling(ctx, value if value is not None else 2)
    if name == "shear":
        return shear(ctx)
    if name == "rotate2d":
        return rotate2d(ctx, value if value is not None else Fraction(1, 2))
    raise UnknownIdentifierError(name, 0)


def describe(lift: CotangentLift) -> dict[str, str]:
    return {name: format_function(value) for name, value in lift.to_new.items()}
