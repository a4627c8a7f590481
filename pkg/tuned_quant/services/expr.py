"""Exact rational functions of phase-space variables over the Gaussian rationals.

Values are thin immutable wrappers around ``sympy.polys`` fraction-field
elements with coefficients in ``QQ_I``. Every arithmetic result is reduced by
the polynomial GCD, so two functions are equal exactly when their stored
numerator/denominator pairs are equal.
"""

import re
from collections.abc import Callable, Iterator, Mapping
from fractions import Fraction
from functools import lru_cache
from typing import Any, Literal

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, model_validator
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.domains.gaussiandomains import GaussianRational
from sympy.polys.fields import FracElement, FracField
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement

from tuned_quant.services.errors import (
    ContextMismatchError,
    DivisionByZeroError,
    ExpressionSyntaxError,
    ParameterDifferentiationError,
    PoleError,
    SubstitutionPoleError,
    UnknownIdentifierError,
    UnknownVariableError,
)

DEFAULT_PARAMS: tuple[str, ...] = ("hbar", "m", "omega")
_PHASE_NAME = re.compile(r"^[qp]\d+$")
_IDENTIFIER = re.compile(r"^[A-Za-z_][A-Za-z_0-9]*$")

Scalar = int | Fraction | GaussianRational


class PhaseContext(BaseModel):
    """Variable registry: ``q1..qn``, ``p1..pn`` and named parameters."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    param_names: tuple[str, ...] = DEFAULT_PARAMS

    @model_validator(mode="after")
    def _check_names(self) -> "PhaseContext":
        seen: set[str] = set()
        for name in self.param_names:
            if not _IDENTIFIER.match(name) or _PHASE_NAME.match(name) or name == "i":
                raise ValueError(f"Invalid parameter name {name!r}")
            if name in seen:
                raise ValueError(f"Duplicate parameter name {name!r}")
            seen.add(name)
        return self

    @property
    def q_names(self) -> tuple[str, ...]:
        return tuple(f"q{i}" for i in range(1, self.n + 1))

    @property
    def p_names(self) -> tuple[str, ...]:
        return tuple(f"p{i}" for i in range(1, self.n + 1))

    @property
    def phase_names(self) -> tuple[str, ...]:
        return self.q_names + self.p_names

    @property
    def names(self) -> tuple[str, ...]:
        return self.phase_names + self.param_names

    @property
    def field(self) -> FracField:
        return _phase_field(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownVariableError(f"Unknown variable {name!r} for n={self.n}") from None

    def is_parameter(self, name: str) -> bool:
        return name in self.param_names


@lru_cache(maxsize=None)
def _phase_field(names: tuple[str, ...]) -> FracField:
    # Generator order q1..qn, p1..pn, params; grlex over that order.
    return FracField(list(names), QQ_I, grlex)


class PhaseFunction:
    """Immutable canonical rational function bound to one ``PhaseContext``."""

    __slots__ = ("ctx", "frac")

    def __init__(self, ctx: PhaseContext, frac: FracElement) -> None:
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "frac", frac)

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("PhaseFunction is immutable")

    @property
    def numer(self) -> PolyElement:
        return self.frac.numer

    @property
    def denom(self) -> PolyElement:
        return self.frac.denom

    @property
    def is_zero(self) -> bool:
        return not self.frac.numer

    @property
    def is_polynomial(self) -> bool:
        return self.frac.denom.is_ground

    def _coerce(self, other: Any) -> "PhaseFunction | None":
        if isinstance(other, PhaseFunction):
            _check_same_context(self.ctx, other.ctx)
            return other
        if isinstance(other, (int, Fraction, GaussianRational)):
            return constant(self.ctx, other)
        return None

    def __add__(self, other: Any) -> "PhaseFunction":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return PhaseFunction(self.ctx, self.frac + rhs.frac)

    def __radd__(self, other: Any) -> "PhaseFunction":
        return self.__add__(other)

    def __sub__(self, other: Any) -> "PhaseFunction":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return PhaseFunction(self.ctx, self.frac - rhs.frac)

    def __rsub__(self, other: Any) -> "PhaseFunction":
        lhs = self._coerce(other)
        if lhs is None:
            return NotImplemented
        return lhs.__sub__(self)

    def __mul__(self, other: Any) -> "PhaseFunction":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return PhaseFunction(self.ctx, self.frac * rhs.frac)

    def __rmul__(self, other: Any) -> "PhaseFunction":
        return self.__mul__(other)

    def __truediv__(self, other: Any) -> "PhaseFunction":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        if rhs.is_zero:
            raise DivisionByZeroError(f"Division by zero: ({format_function(self)})/0")
        return PhaseFunction(self.ctx, self.frac / rhs.frac)

    def __rtruediv__(self, other: Any) -> "PhaseFunction":
        lhs = self._coerce(other)
        if lhs is None:
            return NotImplemented
        return lhs.__truediv__(self)

    def __neg__(self) -> "PhaseFunction":
        return PhaseFunction(self.ctx, -self.frac)

    def __pow__(self, exponent: int) -> "PhaseFunction":
        if not isinstance(exponent, int) or exponent < 0:
            return NotImplemented
        return PhaseFunction(self.ctx, self.frac**exponent)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, GaussianRational)):
            other = constant(self.ctx, other)
        if not isinstance(other, PhaseFunction):
            return NotImplemented
        return self.ctx == other.ctx and self.frac == other.frac

    def __hash__(self) -> int:
        return hash((self.ctx.n, self.ctx.param_names, self.frac))

    def __str__(self) -> str:
        return format_function(self)

    def __repr__(self) -> str:
        return f"PhaseFunction({format_function(self)!r}, n={self.ctx.n})"


def _check_same_context(a: PhaseContext, b: PhaseContext) -> None:
    if a != b:
        raise ContextMismatchError(f"Context mismatch: n={a.n} params={a.param_names} vs n={b.n} params={b.param_names}")


def check_same_context(*contexts: PhaseContext) -> None:
    for other in contexts[1:]:
        _check_same_context(contexts[0], other)


def gaussian(value: Scalar | complex | tuple[Any, Any]) -> GaussianRational:
    """Convert an exact scalar (or ``(re, im)`` pair) to a ``QQ_I`` element."""
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, tuple):
        re_part, im_part = value
        return QQ_I(_to_qq(re_part), _to_qq(im_part))
    if isinstance(value, complex):
        return QQ_I(_to_qq(value.real), _to_qq(value.imag))
    return QQ_I(_to_qq(value), QQ.zero)


def _to_qq(value: int | float | Fraction) -> Any:
    fraction = Fraction(value)
    return QQ(fraction.numerator, fraction.denominator)


def gaussian_parts(value: GaussianRational) -> tuple[Fraction, Fraction]:
    return (
        Fraction(int(value.x.numerator), int(value.x.denominator)),
        Fraction(int(value.y.numerator), int(value.y.denominator)),
    )


def constant(ctx: PhaseContext, value: Scalar | complex | tuple[Any, Any]) -> PhaseFunction:
    return PhaseFunction(ctx, ctx.field.ground_new(gaussian(value)))


def zero(ctx: PhaseContext) -> PhaseFunction:
    return PhaseFunction(ctx, ctx.field.zero)


def one(ctx: PhaseContext) -> PhaseFunction:
    return PhaseFunction(ctx, ctx.field.one)


def imaginary_unit(ctx: PhaseContext) -> PhaseFunction:
    return constant(ctx, (0, 1))


def variable(ctx: PhaseContext, name: str) -> PhaseFunction:
    return PhaseFunction(ctx, ctx.field.gens[ctx.index(name)])


def q(ctx: PhaseContext, i: int) -> PhaseFunction:
    return variable(ctx, f"q{i}")


def p(ctx: PhaseContext, i: int) -> PhaseFunction:
    return variable(ctx, f"p{i}")


def arithmetic(kind: Literal["add", "sub", "mul", "div"], a: PhaseFunction, b: PhaseFunction) -> PhaseFunction:
    _check_same_context(a.ctx, b.ctx)
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        return a / b
    raise ValueError(f"Unknown arithmetic kind {kind!r}")


def is_identically_zero(f: PhaseFunction) -> bool:
    return f.is_zero


def free_names(f: PhaseFunction) -> frozenset[str]:
    used: set[int] = set()
    for poly in (f.numer, f.denom):
        for monom in poly.itermonoms():
            used.update(idx for idx, exp in enumerate(monom) if exp)
    return frozenset(f.ctx.names[idx] for idx in used)


def depends_on(f: PhaseFunction, names: tuple[str, ...] | frozenset[str]) -> bool:
    return not free_names(f).isdisjoint(names)


def is_momentum_free(f: PhaseFunction) -> bool:
    return not depends_on(f, f.ctx.p_names)


def canonical_parts(f: PhaseFunction) -> tuple[PolyElement, PolyElement]:
    """Numerator and denominator scaled so the denominator's leading coefficient is 1."""
    lc = f.denom.LC
    return f.numer.quo_ground(lc), f.denom.quo_ground(lc)


def differentiate(f: PhaseFunction, v: str) -> PhaseFunction:
    ctx = f.ctx
    if ctx.is_parameter(v):
        raise ParameterDifferentiationError(f"Cannot differentiate with respect to parameter {v!r}")
    if v not in ctx.phase_names:
        raise UnknownVariableError(f"Unknown variable {v!r} for n={ctx.n}")
    x = ctx.field.ring.gens[ctx.index(v)]
    numer, denom = f.numer, f.denom
    if denom.is_ground:
        return PhaseFunction(ctx, ctx.field.new(numer.diff(x), denom))
    return PhaseFunction(ctx, ctx.field.new(numer.diff(x) * denom - numer * denom.diff(x), denom**2))


@lru_cache(maxsize=8192)
def partial(f: PhaseFunction, index: tuple[int, ...]) -> PhaseFunction:
    """Mixed partial derivative; ``index`` counts derivatives over (q1..qn, p1..pn)."""
    result = f
    for name, count in zip(f.ctx.phase_names, index):
        for _ in range(count):
            if result.is_zero:
                return result
            result = differentiate(result, name)
    return result


def _compose(poly: PolyElement, images: list[FracElement], field: FracField) -> FracElement:
    total = field.zero
    for monom, coeff in poly.iterterms():
        term = field.ground_new(coeff)
        for image, exp in zip(images, monom):
            if exp:
                term = term * image**exp
        total = total + term
    return total


def substitute(f: PhaseFunction, bindings: Mapping[str, PhaseFunction]) -> PhaseFunction:
    """Simultaneously replace phase variables by functions of the same context."""
    ctx = f.ctx
    for name, value in bindings.items():
        if ctx.is_parameter(name) or name not in ctx.phase_names:
            raise UnknownVariableError(f"Substitution target {name!r} is not a phase variable of n={ctx.n}")
        _check_same_context(ctx, value.ctx)
    if not bindings:
        return f
    field = ctx.field
    images = [bindings[name].frac if name in bindings else gen for name, gen in zip(ctx.names, field.gens)]
    numer = _compose(f.numer, images, field)
    denom = _compose(f.denom, images, field)
    if not denom:
        used = {ctx.names[idx] for monom in f.denom.itermonoms() for idx, exp in enumerate(monom) if exp}
        offending = sorted(name for name in bindings if name in used)
        raise SubstitutionPoleError(f"Substitution sends the denominator of {format_function(f)} to zero", offending)
    return PhaseFunction(ctx, numer / denom)


def evaluate(f: PhaseFunction, point: Mapping[str, Scalar | complex | tuple[Any, Any]]) -> GaussianRational:
    ctx = f.ctx
    missing = sorted(free_names(f) - set(point))
    if missing:
        raise UnknownVariableError(f"Evaluation point does not bind {', '.join(missing)}")
    values = [gaussian(point.get(name, 0)) for name in ctx.names]
    denom = f.denom(*values)
    if denom == QQ_I.zero:
        raise PoleError(f"Pole of {format_function(f)} at the evaluation point")
    return f.numer(*values) / denom


# Formatting


def _format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"({value.numerator}/{value.denominator})"


def _monomial_text(ctx: PhaseContext, monom: tuple[int, ...]) -> str:
    n = ctx.n
    order = list(range(2 * n, len(ctx.names))) + list(range(n)) + list(range(n, 2 * n))
    factors = []
    for idx in order:
        exp = monom[idx]
        if exp == 1:
            factors.append(ctx.names[idx])
        elif exp > 1:
            factors.append(f"{ctx.names[idx]}^{exp}")
    return "*".join(factors)


def format_scalar_term(coeff: GaussianRational, body: str) -> tuple[bool, str]:
    """Render ``coeff*body``; returns ``(negative, text)`` with the sign split off."""
    re_part, im_part = gaussian_parts(coeff)
    negative = re_part < 0 or (re_part == 0 and im_part < 0)
    if negative:
        re_part, im_part = -re_part, -im_part
    if im_part == 0:
        if re_part == 1 and body:
            return negative, body
        scalar = _format_rational(re_part)
    elif re_part == 0:
        scalar = "i" if im_part == 1 else f"{_format_rational(im_part)}*i"
    else:
        sign = "+" if im_part > 0 else "-"
        imag = "i" if abs(im_part) == 1 else f"{_format_rational(abs(im_part))}*i"
        scalar = f"({_format_rational(re_part)} {sign} {imag})"
    return negative, f"{scalar}*{body}" if body else scalar


def join_signed(parts: list[tuple[bool, str]]) -> str:
    if not parts:
        return "0"
    negative, text = parts[0]
    pieces = [f"-{text}" if negative else text]
    for negative, text in parts[1:]:
        pieces.append(f" - {text}" if negative else f" + {text}")
    return "".join(pieces)


def polynomial_terms(ctx: PhaseContext, poly: PolyElement, scale: GaussianRational | None = None) -> list[tuple[bool, str]]:
    parts = []
    for monom, coeff in poly.terms():
        if scale is not None:
            coeff = coeff * scale
        parts.append(format_scalar_term(coeff, _monomial_text(ctx, monom)))
    return parts


def format_function(f: PhaseFunction) -> str:
    ctx = f.ctx
    if f.is_zero:
        return "0"
    if f.denom.is_ground:
        return join_signed(polynomial_terms(ctx, f.numer, QQ_I.one / f.denom.LC))
    numer_parts = polynomial_terms(ctx, f.numer)
    numer_text = join_signed(numer_parts)
    if len(numer_parts) > 1:
        numer_text = f"({numer_text})"
    denom_text = join_signed(polynomial_terms(ctx, f.denom))
    if not re.match(r"^[A-Za-z_][A-Za-z_0-9]*(\^\d+)?$", denom_text):
        denom_text = f"({denom_text})"
    return f"{numer_text}/{denom_text}"


# Parsing

_TOKEN = re.compile(r"\s*(?:(?P<number>\d+(?:\.\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))")


def _tokenize(text: str) -> Iterator[tuple[str, str, int]]:
    pos = 0
    length = len(text)
    while pos < length:
        if text[pos].isspace():
            pos += 1
            continue
        match = _TOKEN.match(text, pos)
        if match is None:
            raise ExpressionSyntaxError(f"Unexpected character {text[pos]!r}", pos)
        kind = match.lastgroup or "op"
        start = match.start(kind)
        yield kind, match.group(kind), start
        pos = match.end()
    yield "end", "", length


NameResolver = Callable[[str, int], Any]
CallResolver = Callable[[str, Any, int], Any]


class ExpressionParser:
    """Recursive-descent parser over the expression grammar.

    ``+ - * / ^`` are dispatched to the operand types, so the same grammar
    evaluates function expressions and (with resolvers supplied) operator
    expressions.
    """

    def __init__(
        self,
        ctx: PhaseContext,
        macros: Mapping[str, PhaseFunction] | None = None,
        resolve_name: NameResolver | None = None,
        resolve_call: CallResolver | None = None,
    ) -> None:
        self.ctx = ctx
        self.macros = dict(macros or {})
        self.resolve_name = resolve_name
        self.resolve_call = resolve_call
        self._tokens: list[tuple[str, str, int]] = []
        self._pos = 0

    def parse(self, text: str) -> Any:
        self._tokens = list(_tokenize(text))
        self._pos = 0
        if self._peek()[0] == "end":
            raise ExpressionSyntaxError("Empty expression", 0)
        value = self._expr()
        kind, token, position = self._peek()
        if kind != "end":
            raise ExpressionSyntaxError(f"Unexpected token {token!r}", position)
        return value

    def _peek(self) -> tuple[str, str, int]:
        return self._tokens[self._pos]

    def _advance(self) -> tuple[str, str, int]:
        token = self._tokens[self._pos]
        self._pos += 1
        return token

    def _expect(self, symbol: str) -> None:
        kind, token, position = self._advance()
        if kind != "op" or token != symbol:
            found = token or "end of input"
            raise ExpressionSyntaxError(f"Expected {symbol!r} but found {found!r}", position)

    def _expr(self) -> Any:
        value = self._term()
        while True:
            kind, token, position = self._peek()
            if kind == "op" and token in "+-":
                self._advance()
                rhs = self._term()
                value = self._combine(token, value, rhs, position)
            else:
                return value

    def _term(self) -> Any:
        value = self._unary()
        while True:
            kind, token, position = self._peek()
            if kind == "op" and token in "*/":
                self._advance()
                rhs = self._unary()
                value = self._combine(token, value, rhs, position)
            else:
                return value

    def _unary(self) -> Any:
        kind, token, position = self._peek()
        if kind == "op" and token in "+-":
            self._advance()
            operand = self._unary()
            return -operand if token == "-" else operand
        return self._power()

    def _power(self) -> Any:
        base = self._primary()
        kind, token, position = self._peek()
        if kind == "op" and token == "^":
            self._advance()
            exp_kind, exp_token, exp_position = self._advance()
            if exp_kind != "number" or not exp_token.isdigit():
                raise ExpressionSyntaxError("Exponent must be a nonnegative integer", exp_position)
            return self._combine("^", base, int(exp_token), position)
        return base

    def _primary(self) -> Any:
        kind, token, position = self._advance()
        if kind == "number":
            return constant(self.ctx, Fraction(token))
        if kind == "name":
            next_kind, next_token, _ = self._peek()
            if next_kind == "op" and next_token == "(":
                self._advance()
                argument = self._expr()
                self._expect(")")
                if self.resolve_call is None:
                    raise UnknownIdentifierError(token, position)
                return self.resolve_call(token, argument, position)
            return self._name(token, position)
        if kind == "op" and token == "(":
            value = self._expr()
            self._expect(")")
            return value
        found = token or "end of input"
        raise ExpressionSyntaxError(f"Unexpected token {found!r}", position)

    def _name(self, token: str, position: int) -> Any:
        if token == "i":
            return imaginary_unit(self.ctx)
        if token in self.ctx.names:
            return variable(self.ctx, token)
        if token in self.macros:
            return self.macros[token]
        if self.resolve_name is not None:
            resolved = self.resolve_name(token, position)
            if resolved is not None:
                return resolved
        raise UnknownIdentifierError(token, position)

    def _combine(self, op: str, lhs: Any, rhs: Any, position: int) -> Any:
        try:
            if op == "+":
                result = lhs + rhs
            elif op == "-":
                result = lhs - rhs
            elif op == "*":
                result = lhs * rhs
            elif op == "/":
                result = lhs / rhs
            else:
                result = lhs**rhs
        except DivisionByZeroError as exc:
            raise DivisionByZeroError(f"{exc} at position {position}") from exc
        except TypeError as exc:
            raise ExpressionSyntaxError(f"Operator {op!r} not defined for these operands", position) from exc
        return result


def parse(text: str, ctx: PhaseContext, macros: Mapping[str, PhaseFunction] | None = None) -> PhaseFunction:
    value = ExpressionParser(ctx, macros).parse(text)
    if not isinstance(value, PhaseFunction):
        raise ExpressionSyntaxError("Expression does not denote a phase-space function", 0)
    logger.debug("Parsed expression n={} text={!r} canonical={!r}", ctx.n, text, format_function(value))
    return value
