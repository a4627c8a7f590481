import warnings
from collections.abc import Mapping
from enum import Enum
from fractions import Fraction
from typing import Any

from loguru import logger
from pydantic import BaseModel, ConfigDict, model_validator

from tuned_quant.services.diffop import (
    DiffOperator,
    apply,
    compose,
    from_function,
    identity,
    scale,
    zero_index,
)
from tuned_quant.services.errors import (
    ExpressionSyntaxError,
    NotPolynomialInMomentaError,
    QuantizationConfigError,
    UnknownIdentifierError,
)
from tuned_quant.services.expr import (
    ExpressionParser,
    PhaseContext,
    PhaseFunction,
    format_function,
    imaginary_unit,
    is_identically_zero,
    variable,
)
from tuned_quant.services.symplectic import Metric, hamiltonian_vf, laplace_beltrami, tautological_vf


class MapKind(str, Enum):
    C = "c"
    KS = "ks"
    TT1 = "tt1"
    TT2 = "tt2"


class Ordering(str, Enum):
    COEFFICIENTS_LEFT = "coefficients-left"
    MOMENTA_LEFT = "momenta-left"


class MixedHomogeneityWarning(UserWarning):
    pass


class QuantizationConfig(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    map_kind: MapKind = MapKind.TT2
    metric: Metric | None = None
    mass_symbol: str | None = "m"
    hbar_symbol: str = "hbar"
    ordering: Ordering = Ordering.COEFFICIENTS_LEFT
    strict: bool = False

    @model_validator(mode="after")
    def _check(self) -> "QuantizationConfig":
        if self.map_kind == MapKind.TT2 and (self.metric is None or not self.mass_symbol):
            raise QuantizationConfigError("Map tt2 requires a metric and a mass symbol")
        return self

    @classmethod
    def for_context(
        cls, ctx: PhaseContext, map_kind: MapKind | str = MapKind.TT2, metric_kind: str = "phase", **kwargs: Any
    ) -> "QuantizationConfig":
        metric = Metric.flat(ctx) if metric_kind == "phase" else Metric.flat_configuration(ctx)
        return cls(map_kind=MapKind(map_kind), metric=metric, **kwargs)


class TuningProfile(BaseModel):
    p_degrees: list[int]
    homogeneous: bool


def _hbar(ctx: PhaseContext, cfg: QuantizationConfig | None) -> PhaseFunction:
    symbol = cfg.hbar_symbol if cfg else "hbar"
    if symbol not in ctx.param_names:
        raise QuantizationConfigError(f"hbar symbol {symbol!r} is not a parameter of the context")
    return variable(ctx, symbol)


def theta_derivative(f: PhaseFunction) -> PhaseFunction:
    """X_theta f = sum_i p_i df/dp_i."""
    return apply(tautological_vf(f.ctx), f)


def tuning_indicator(g: PhaseFunction) -> int:
    return 0 if is_identically_zero(g) else 1


def _p_degrees(poly: Any, n: int) -> list[int]:
    return sorted({sum(monom[n : 2 * n]) for monom in poly.itermonoms()})


def tuning_profile(f: PhaseFunction) -> TuningProfile:
    n = f.ctx.n
    numer_degrees = _p_degrees(f.numer, n)
    denom_degrees = _p_degrees(f.denom, n)
    if f.is_zero:
        return TuningProfile(p_degrees=[], homogeneous=True)
    shift = denom_degrees[0] if len(denom_degrees) == 1 else 0
    degrees = [d - shift for d in numer_degrees]
    return TuningProfile(p_degrees=degrees, homogeneous=len(numer_degrees) == 1 and len(denom_degrees) == 1)


def _check_homogeneity(f: PhaseFunction, cfg: QuantizationConfig | None) -> None:
    if cfg is None or not cfg.strict:
        return
    profile = tuning_profile(f)
    if not profile.homogeneous:
        logger.warning("Mixed momentum homogeneity f={!r} degrees={}", format_function(f), profile.p_degrees)
        warnings.warn(
            f"{format_function(f)} is not homogeneous in the momenta (degrees {profile.p_degrees}); "
            "the tuning indicators depend on the global zero test",
            MixedHomogeneityWarning,
            stacklevel=3,
        )


def _hamiltonian_part(f: PhaseFunction, hbar: PhaseFunction, theta_f: PhaseFunction) -> DiffOperator:
    """i*hbar*X_f - X_theta f."""
    i = imaginary_unit(f.ctx)
    return scale(hamiltonian_vf(f), i * hbar) - theta_f


def q_ks(f: PhaseFunction, cfg: QuantizationConfig | None = None) -> DiffOperator:
    hbar = _hbar(f.ctx, cfg)
    op = from_function(f) + _hamiltonian_part(f, hbar, theta_derivative(f))
    logger.debug("Quantized map=ks n={} terms={}", f.ctx.n, len(op.terms))
    return op


def q_tt1(f: PhaseFunction, cfg: QuantizationConfig | None = None) -> DiffOperator:
    _check_homogeneity(f, cfg)
    hbar = _hbar(f.ctx, cfg)
    theta_f = theta_derivative(f)
    op = from_function(f)
    if tuning_indicator(theta_f):
        op = op + _hamiltonian_part(f, hbar, theta_f)
    logger.debug("Quantized map=tt1 n={} terms={}", f.ctx.n, len(op.terms))
    return op


def q_tt2(f: PhaseFunction, cfg: QuantizationConfig) -> DiffOperator:
    ctx = f.ctx
    if cfg.metric is None or not cfg.mass_symbol:
        raise QuantizationConfigError("Map tt2 requires a metric and a mass symbol")
    if cfg.metric.ctx != ctx:
        raise QuantizationConfigError(f"Metric context n={cfg.metric.ctx.n} does not match n={ctx.n}")
    if cfg.mass_symbol not in ctx.param_names:
        raise QuantizationConfigError(f"Mass symbol {cfg.mass_symbol!r} is not a parameter of the context")
    _check_homogeneity(f, cfg)
    hbar = _hbar(ctx, cfg)
    mass = variable(ctx, cfg.mass_symbol)
    theta_f = theta_derivative(f)
    theta2_f = theta_derivative(theta_f)

    op = from_function(f)
    if tuning_indicator(2 * theta_f - theta2_f):
        op = op + _hamiltonian_part(f, hbar, theta_f)
    if tuning_indicator(theta2_f - theta_f):
        kinetic = scale(laplace_beltrami(cfg.metric), -(hbar**2) / mass) - theta2_f + theta_f
        op = op + scale(kinetic, Fraction(1, 2))
    logger.debug("Quantized map=tt2 n={} terms={}", ctx.n, len(op.terms))
    return op


def q_c(
    f: PhaseFunction,
    chart_label: str = "canonical",
    ordering: Ordering = Ordering.COEFFICIENTS_LEFT,
    cfg: QuantizationConfig | None = None,
) -> DiffOperator:
    """Substitute p_i -> -i*hbar*d/dq^i monomial by monomial in the given chart."""
    ctx = f.ctx
    n = ctx.n
    if any(any(monom[n : 2 * n]) for monom in f.denom.itermonoms()):
        raise NotPolynomialInMomentaError(f"{format_function(f)} has momenta in its denominator")
    hbar = _hbar(ctx, cfg)
    minus_i_hbar = -imaginary_unit(ctx) * hbar
    ring = ctx.field.ring
    op = DiffOperator(ctx)
    for monom, coeff in f.numer.terms():
        beta = monom[n : 2 * n]
        rest = tuple(0 if n <= k < 2 * n else e for k, e in enumerate(monom))
        coefficient = PhaseFunction(ctx, ctx.field.new(ring({rest: coeff}), f.denom))
        index = tuple(beta) + (0,) * n
        derivative = DiffOperator(ctx, {index: minus_i_hbar ** sum(beta)})
        if ordering == Ordering.MOMENTA_LEFT:
            op = op + compose(derivative, from_function(coefficient))
        else:
            op = op + compose(from_function(coefficient), derivative)
    logger.debug("Quantized map=c chart={} ordering={} terms={}", chart_label, ordering.value, len(op.terms))
    return op


def quantize(f: PhaseFunction, cfg: QuantizationConfig) -> DiffOperator:
    kind = MapKind(cfg.map_kind)
    if kind == MapKind.C:
        return q_c(f, ordering=cfg.ordering, cfg=cfg)
    if kind == MapKind.KS:
        return q_ks(f, cfg)
    if kind == MapKind.TT1:
        return q_tt1(f, cfg)
    return q_tt2(f, cfg)


_MAP_CALLS = {"C": MapKind.C, "KS": MapKind.KS, "TT1": MapKind.TT1, "TT2": MapKind.TT2}


def parse_operator(
    text: str,
    ctx: PhaseContext,
    cfg: QuantizationConfig,
    macros: Mapping[str, PhaseFunction] | None = None,
) -> DiffOperator:
    """Evaluate operator expressions such as ``i*hbar*TT2(L3)``, ``Id`` or ``0``."""

    def resolve_name(name: str, position: int) -> DiffOperator | None:
        return identity(ctx) if name == "Id" else None

    def resolve_call(name: str, argument: Any, position: int) -> DiffOperator:
        if name not in _MAP_CALLS:
            raise UnknownIdentifierError(name, position)
        if not isinstance(argument, PhaseFunction):
            raise ExpressionSyntaxError(f"{name}(...) expects a phase-space function", position)
        return quantize(argument, cfg.model_copy(update={"map_kind": _MAP_CALLS[name]}))

    value = ExpressionParser(ctx, macros, resolve_name=resolve_name, resolve_call=resolve_call).parse(text)
    if isinstance(value, PhaseFunction):
        return from_function(value)
    return value


def canonical_pair_target(ctx: PhaseContext, i: int, j: int, hbar: str = "hbar") -> DiffOperator:
    """i*hbar*delta_ij*Id."""
    if i != j:
        return DiffOperator(ctx)
    return DiffOperator(ctx, {zero_index(ctx): imaginary_unit(ctx) * variable(ctx, hbar)})

