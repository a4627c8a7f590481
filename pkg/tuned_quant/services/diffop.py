"""Normal-ordered linear differential operators on phase space.

An operator is a finite map from a derivative multi-index (length 2n: the
q-exponents followed by the p-exponents) to a coefficient ``PhaseFunction``.
Coefficients always stand left of derivatives; zero coefficients are never
stored, so equality of operators is equality of the term maps.
"""

import itertools
import math
import re
from collections.abc import Iterable, Mapping
from fractions import Fraction
from types import MappingProxyType
from typing import Any

from loguru import logger
from sympy.polys.domains.gaussiandomains import GaussianRational

from tuned_quant.services.errors import ContextMismatchError, UnknownVariableError
from tuned_quant.services.expr import (
    PhaseContext,
    PhaseFunction,
    canonical_parts,
    check_same_context,
    constant,
    depends_on,
    format_function,
    gaussian_parts,
    join_signed,
    partial,
)

Index = tuple[int, ...]


class DiffOperator:
    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: PhaseContext, terms: Mapping[Index, PhaseFunction] | None = None) -> None:
        cleaned: dict[Index, PhaseFunction] = {}
        for index, coeff in (terms or {}).items():
            if len(index) != 2 * ctx.n or any(k < 0 for k in index):
                raise ValueError(f"Invalid derivative index {index} for n={ctx.n}")
            check_same_context(ctx, coeff.ctx)
            if not coeff.is_zero:
                cleaned[tuple(index)] = coeff
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "terms", MappingProxyType(cleaned))

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("DiffOperator is immutable")

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, index: Index) -> PhaseFunction:
        return self.terms.get(tuple(index), constant(self.ctx, 0))

    def _coerce(self, other: Any) -> "DiffOperator | None":
        if isinstance(other, DiffOperator):
            if other.ctx != self.ctx:
                raise ContextMismatchError(f"Operator context mismatch: n={self.ctx.n} vs n={other.ctx.n}")
            return other
        if isinstance(other, PhaseFunction):
            check_same_context(self.ctx, other.ctx)
            return from_function(other)
        if isinstance(other, (int, Fraction, GaussianRational)):
            return from_function(constant(self.ctx, other))
        return None

    def __add__(self, other: Any) -> "DiffOperator":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return add(self, rhs)

    def __radd__(self, other: Any) -> "DiffOperator":
        return self.__add__(other)

    def __sub__(self, other: Any) -> "DiffOperator":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return add(self, scale(rhs, -1))

    def __rsub__(self, other: Any) -> "DiffOperator":
        lhs = self._coerce(other)
        if lhs is None:
            return NotImplemented
        return add(lhs, scale(self, -1))

    def __neg__(self) -> "DiffOperator":
        return scale(self, -1)

    def __mul__(self, other: Any) -> "DiffOperator":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return compose(self, rhs)

    def __rmul__(self, other: Any) -> "DiffOperator":
        if isinstance(other, (PhaseFunction, int, Fraction, GaussianRational)):
            return scale(self, other)
        return NotImplemented

    def __matmul__(self, other: "DiffOperator") -> "DiffOperator":
        return compose(self, other)

    def __truediv__(self, other: Any) -> "DiffOperator":
        if isinstance(other, PhaseFunction):
            return scale(self, 1 / other)
        if isinstance(other, (int, Fraction, GaussianRational)):
            return scale(self, 1 / constant(self.ctx, other))
        return NotImplemented

    def __pow__(self, exponent: int) -> "DiffOperator":
        if not isinstance(exponent, int) or exponent < 0:
            return NotImplemented
        result = identity(self.ctx)
        for _ in range(exponent):
            result = compose(result, self)
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return self.ctx == other.ctx and dict(self.terms) == dict(other.terms)

    def __hash__(self) -> int:
        return hash((self.ctx.n, frozenset(self.terms.items())))

    def __str__(self) -> str:
        return format_operator(self)

    def __repr__(self) -> str:
        return f"DiffOperator({format_operator(self)!r}, n={self.ctx.n})"


def zero_index(ctx: PhaseContext) -> Index:
    return (0,) * (2 * ctx.n)


def index_for(ctx: PhaseContext, *names: str) -> Index:
    """Multi-index counting each named phase variable once per occurrence."""
    counts = [0] * (2 * ctx.n)
    for name in names:
        if name not in ctx.phase_names:
            raise UnknownVariableError(f"Cannot differentiate with respect to {name!r} for n={ctx.n}")
        counts[ctx.phase_names.index(name)] += 1
    return tuple(counts)


def from_function(f: PhaseFunction) -> DiffOperator:
    return DiffOperator(f.ctx, {zero_index(f.ctx): f})


def identity(ctx: PhaseContext) -> DiffOperator:
    return from_function(constant(ctx, 1))


def zero_operator(ctx: PhaseContext) -> DiffOperator:
    return DiffOperator(ctx)


def derivative(ctx: PhaseContext, *names: str) -> DiffOperator:
    """Pure derivative ``d/d<name>`` (repeated names give higher order)."""
    return DiffOperator(ctx, {index_for(ctx, *names): constant(ctx, 1)})


def scale(op: DiffOperator, factor: PhaseFunction | int | Fraction | GaussianRational) -> DiffOperator:
    """Left multiplication of every coefficient by ``factor``."""
    if not isinstance(factor, PhaseFunction):
        factor = constant(op.ctx, factor)
    check_same_context(op.ctx, factor.ctx)
    return DiffOperator(op.ctx, {index: factor * coeff for index, coeff in op.terms.items()})


def add(*ops: DiffOperator) -> DiffOperator:
    ctx = ops[0].ctx
    check_same_context(*(op.ctx for op in ops))
    acc: dict[Index, Any] = {}
    for op in ops:
        for index, coeff in op.terms.items():
            acc[index] = acc[index] + coeff.frac if index in acc else coeff.frac
    return DiffOperator(ctx, {index: PhaseFunction(ctx, frac) for index, frac in acc.items()})


def linear_combination(pairs: Iterable[tuple[PhaseFunction, DiffOperator]], ctx: PhaseContext) -> DiffOperator:
    return add(zero_operator(ctx), *(scale(op, c) for c, op in pairs))


def _sub_indices(alpha: Index) -> Iterable[Index]:
    return itertools.product(*(range(k + 1) for k in alpha))


def _multi_binomial(alpha: Index, gamma: Index) -> int:
    return math.prod(math.comb(a, g) for a, g in zip(alpha, gamma))


def compose(a: DiffOperator, b: DiffOperator) -> DiffOperator:
    """Normal form of ``a∘b`` by the generalized Leibniz rule.

    ``∂^α ∘ (c ∂^β) = Σ_{γ≤α} C(α,γ) (∂^γ c) ∂^{α−γ+β}``.
    """
    if a.ctx != b.ctx:
        raise ContextMismatchError(f"Operator context mismatch: n={a.ctx.n} vs n={b.ctx.n}")
    ctx = a.ctx
    acc: dict[Index, Any] = {}
    for alpha, left in a.terms.items():
        for beta, right in b.terms.items():
            for gamma in _sub_indices(alpha):
                derived = partial(right, gamma)
                if derived.is_zero:
                    continue
                target = tuple(x - g + y for x, g, y in zip(alpha, gamma, beta))
                term = left.frac * derived.frac * _multi_binomial(alpha, gamma)
                acc[target] = acc[target] + term if target in acc else term
    result = DiffOperator(ctx, {index: PhaseFunction(ctx, frac) for index, frac in acc.items()})
    logger.debug("Composed operators left_terms={} right_terms={} result_terms={}", len(a.terms), len(b.terms), len(result.terms))
    return result


def commutator(a: DiffOperator, b: DiffOperator) -> DiffOperator:
    return compose(a, b) - compose(b, a)


def apply(op: DiffOperator, f: PhaseFunction) -> PhaseFunction:
    check_same_context(op.ctx, f.ctx)
    total = constant(f.ctx, 0)
    for index, coeff in op.terms.items():
        derived = partial(f, index)
        if not derived.is_zero:
            total = total + coeff * derived
    return total


def order(op: DiffOperator) -> int:
    return max((sum(index) for index in op.terms), default=0)


def restrict_to_polarized(op: DiffOperator) -> DiffOperator:
    """Drop every term carrying a momentum derivative."""
    n = op.ctx.n
    return DiffOperator(op.ctx, {index: c for index, c in op.terms.items() if not any(index[n:])})


def preserves_polarization(op: DiffOperator) -> bool:
    p_names = op.ctx.p_names
    return all(not depends_on(c, p_names) for c in restrict_to_polarized(op).terms.values())


# Formatting

_BARE_RATIONAL = re.compile(r"^\(\d+/\d+\)$")
_RATIONAL_GROUP = re.compile(r"\(\d+/\d+\)")


def derivative_key(ctx: PhaseContext, index: Index) -> str:
    total = sum(index)
    if total == 0:
        return ""
    parts = []
    for name, exp in zip(ctx.phase_names, index):
        if exp == 1:
            parts.append(f"d{name}")
        elif exp > 1:
            parts.append(f"d{name}^{exp}")
    head = "d" if total == 1 else f"d{total}"
    return f"{head}/{''.join(parts)}"


def display_order(op: DiffOperator) -> list[Index]:
    """Order-0 term first, then by total order, q-derivatives before p-derivatives."""
    return sorted(op.terms, key=lambda index: (sum(index), tuple(-k for k in index)))


def _is_negative(f: PhaseFunction) -> bool:
    numer, _ = canonical_parts(f)
    re_part, im_part = gaussian_parts(numer.LC)
    return re_part < 0 or (re_part == 0 and im_part < 0)


def _signed(f: PhaseFunction) -> tuple[bool, PhaseFunction]:
    if _is_negative(f):
        return True, -f
    return False, f


def _times(coeff_text: str, key: str) -> str:
    # A "/" outside a bare rational would read as dividing the derivative.
    if " " in coeff_text or "/" in _RATIONAL_GROUP.sub("", coeff_text):
        coeff_text = f"({coeff_text})"
    return f"{coeff_text}*{key}"


def _term_text(coeff: PhaseFunction, key: str) -> tuple[bool, str]:
    negative, magnitude = _signed(coeff)
    if magnitude == 1:
        return negative, key
    return negative, _times(format_function(magnitude), key)


def _common_factor(coeffs: list[PhaseFunction]) -> PhaseFunction:
    ctx = coeffs[0].ctx
    parts = [canonical_parts(c) for c in coeffs]
    ring = ctx.field.ring
    exponents = None
    for numer, _ in parts:
        for monom in numer.itermonoms():
            exponents = list(monom) if exponents is None else [min(a, b) for a, b in zip(exponents, monom)]
    # Only parameter powers are pulled out of the bracket.
    for k in range(2 * ctx.n):
        exponents[k] = 0
    monomial = ring.one
    for gen, exp in zip(ring.gens, exponents):
        monomial = monomial * gen**exp
    factor = ring.ground_new(parts[0][0].LC) * monomial
    first_denom = parts[0][1]
    shared = first_denom if all(d == first_denom for _, d in parts) else ring.one
    return PhaseFunction(ctx, ctx.field.new(factor, shared))


def format_operator(op: DiffOperator) -> str:
    if op.is_zero:
        return "0"
    ctx = op.ctx
    order_zero = zero_index(ctx)
    pieces: list[tuple[bool, str]] = []
    if order_zero in op.terms:
        pieces.append((False, format_function(op.terms[order_zero])))
    indices = [index for index in display_order(op) if index != order_zero]
    if indices:
        coeffs = [op.terms[index] for index in indices]
        factor = _common_factor(coeffs)
        negative, magnitude = _signed(factor)
        inner = [_term_text(c / factor, derivative_key(ctx, index)) for c, index in zip(coeffs, indices)]
        if magnitude == 1:
            pieces.extend((neg != negative, text) for neg, text in inner)
        else:
            factor_text = format_function(magnitude)
            if ("/" in factor_text or " " in factor_text) and not _BARE_RATIONAL.match(factor_text):
                factor_text = f"({factor_text})"
            body = join_signed(inner)
            if len(inner) > 1 or body.startswith("-"):
                body = f"({body})"
            pieces.append((negative, f"{factor_text}*{body}"))
    return join_signed(pieces)


def to_json(op: DiffOperator) -> list[dict[str, Any]]:
    n = op.ctx.n
    return [
        {"coeff": format_function(op.terms[index]), "dq": list(index[:n]), "dp": list(index[n:])}
        for index in display_order(op)
    ]
