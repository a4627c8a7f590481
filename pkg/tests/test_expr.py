import random
from fractions import Fraction

import pytest

from tuned_quant.services.corpus import angular_momentum, corpus, free_hamiltonian, sho_hamiltonian
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
from tuned_quant.services.expr import (
    PhaseContext,
    arithmetic,
    canonical_parts,
    constant,
    differentiate,
    evaluate,
    format_function,
    free_names,
    gaussian,
    imaginary_unit,
    is_identically_zero,
    is_momentum_free,
    p,
    parse,
    q,
    substitute,
    variable,
)
from tuned_quant.services.sampling import random_nonzero_polynomial, random_point, random_polynomial, random_rational


def test_parse_angular_momentum(ctx3, macros3):
    f = parse("q1*p2 - q2*p1", ctx3)
    assert f == angular_momentum(ctx3, 3)
    assert f.is_polynomial
    assert len(f.numer.terms()) == 2
    assert parse("L3", ctx3, macros3) == f


def test_parse_oscillator(ctx1):
    f = parse("p1^2/(2*m) + m*omega^2*q1^2/2", ctx1)
    assert f == sho_hamiltonian(ctx1)
    assert not f.is_polynomial


def test_parse_literals(ctx1):
    assert parse("0", ctx1).is_zero
    assert format_function(parse("0", ctx1)) == "0"
    assert parse("0.5*q1", ctx1) == q(ctx1, 1) / 2
    assert parse("2^3", ctx1) == 8
    assert parse("i*i", ctx1) == -1
    assert parse("-q1^2", ctx1) == -(q(ctx1, 1) ** 2)
    assert parse("  ( q1 + p1 ) ", ctx1) == q(ctx1, 1) + p(ctx1, 1)


@pytest.mark.parametrize(
    ("text", "position"),
    [
        ("q1 +", 4),
        ("q1^-1", 3),
        ("q1^2.5", 3),
        ("q1 $ p1", 3),
        ("(q1", 3),
        ("", 0),
        ("q1 p1", 3),
    ],
)
def test_parse_syntax_errors(ctx1, text, position):
    with pytest.raises(ExpressionSyntaxError) as excinfo:
        parse(text, ctx1)
    assert excinfo.value.position == position


def test_parse_unknown_identifier(ctx3):
    with pytest.raises(UnknownIdentifierError) as excinfo:
        parse("q1 * x", ctx3)
    assert excinfo.value.token == "x"
    assert excinfo.value.position == 5

    with pytest.raises(UnknownIdentifierError):
        parse("q4", ctx3)
    with pytest.raises(UnknownIdentifierError):
        parse("sin(q1)", ctx3)


def test_parse_division_by_zero(ctx1):
    with pytest.raises(DivisionByZeroError):
        parse("1/(q1 - q1)", ctx1)


def test_arithmetic_examples(ctx2):
    q1, p1 = q(ctx2, 1), p(ctx2, 1)
    assert arithmetic("add", q1, -q1).is_zero
    assert arithmetic("mul", p1 / q1, q1) == p1
    assert arithmetic("div", q1**2 - p1**2, q1 - p1) == q1 + p1
    assert arithmetic("sub", q1, q1).is_zero
    with pytest.raises(DivisionByZeroError):
        arithmetic("div", q1, constant(ctx2, 0))


def test_context_mismatch(ctx1, ctx2):
    with pytest.raises(ContextMismatchError):
        q(ctx1, 1) + q(ctx2, 1)
    with pytest.raises(ContextMismatchError):
        arithmetic("mul", p(ctx1, 1), p(ctx2, 1))


def test_zero_detection_after_cancellation(ctx2):
    q1, p1 = q(ctx2, 1), p(ctx2, 1)
    assert is_identically_zero((q1 + p1) * (q1 - p1) - q1**2 + p1**2)
    assert not is_identically_zero(q1 * p1)


def test_differentiate(ctx1, ctx3):
    q1, p1 = q(ctx1, 1), p(ctx1, 1)
    assert differentiate(p1**2 / q1, "q1") == -(p1**2) / q1**2
    assert differentiate(p1**2 / q1, "p1") == 2 * p1 / q1
    assert differentiate(variable(ctx1, "m") * q1, "q1") == variable(ctx1, "m")
    assert differentiate(angular_momentum(ctx3, 3), "p2") == q(ctx3, 1)
    with pytest.raises(ParameterDifferentiationError):
        differentiate(q1, "hbar")
    with pytest.raises(UnknownVariableError):
        differentiate(q1, "q2")


def test_substitute(ctx2):
    q1, q2, p1 = q(ctx2, 1), q(ctx2, 2), p(ctx2, 1)
    assert substitute(q1 * p1, {"q1": q2, "p1": q1}) == q2 * q1
    assert substitute(q1 / q2, {"q2": q2 + q1**2}) == q1 / (q2 + q1**2)
    assert substitute(q1, {}) == q1


def test_substitute_pole_names_bindings(ctx1):
    q1, p1 = q(ctx1, 1), p(ctx1, 1)
    with pytest.raises(SubstitutionPoleError) as excinfo:
        substitute(1 / (q1 - p1), {"q1": p1})
    assert excinfo.value.bindings == ["q1"]


def test_substitute_rejects_parameters(ctx1):
    with pytest.raises(UnknownVariableError):
        substitute(q(ctx1, 1), {"m": q(ctx1, 1)})


def test_evaluate(ctx3, macros3):
    value = evaluate(macros3["L3"], {"q1": 1, "q2": 2, "p1": 3, "p2": 4})
    assert value == gaussian(-2)
    assert evaluate(imaginary_unit(ctx3) * q(ctx3, 1), {"q1": Fraction(1, 2)}) == gaussian((0, Fraction(1, 2)))


def test_evaluate_errors(ctx1):
    with pytest.raises(PoleError):
        evaluate(1 / q(ctx1, 1), {"q1": 0})
    with pytest.raises(UnknownVariableError):
        evaluate(q(ctx1, 1) * p(ctx1, 1), {"q1": 1})


def test_free_names(ctx2):
    f = free_hamiltonian(ctx2)
    assert free_names(f) == frozenset({"p1", "p2", "m"})
    assert not is_momentum_free(f)
    assert is_momentum_free(q(ctx2, 1) * variable(ctx2, "omega"))


def test_canonical_parts_monic_denominator(ctx1):
    f = sho_hamiltonian(ctx1)
    numer, denom = canonical_parts(f)
    assert denom.LC == gaussian(1)
    assert ctx1.field.new(numer, denom) == f.frac


def test_format_examples(ctx1, ctx3):
    assert format_function(q(ctx1, 1) + p(ctx1, 1)) == "q1 + p1"
    assert format_function(-q(ctx1, 1)) == "-q1"
    assert format_function(imaginary_unit(ctx1) * variable(ctx1, "hbar")) == "i*hbar"
    assert format_function(q(ctx1, 1) / 2) == "(1/2)*q1"
    assert format_function(angular_momentum(ctx3, 3)) == "q1*p2 - q2*p1"


def test_format_is_a_parse_fixed_point_on_corpus(ctx3):
    for name, f in corpus(ctx3).items():
        assert parse(format_function(f), ctx3) == f, name


def test_format_is_a_parse_fixed_point_on_random_rationals(ctx2, rng):
    for _ in range(40):
        numer = random_polynomial(ctx2, rng, degree=2, terms=3, gaussian=True)
        denom = random_nonzero_polynomial(ctx2, rng, degree=2, terms=2)
        f = numer / denom
        assert parse(format_function(f), ctx2) == f


def test_field_axioms(ctx1, rng):
    for _ in range(200):
        a, b, c = (random_rational(ctx1, rng) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert a * b == b * a
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert (a - a).is_zero
        if not a.is_zero:
            assert a / a == 1


def test_canonical_form_detects_equality(ctx2, rng):
    for _ in range(200):
        a = random_rational(ctx2, rng)
        c = random_nonzero_polynomial(ctx2, rng, degree=2, terms=2)
        rewritten = (a * c) / c
        assert rewritten == a
        assert hash(rewritten) == hash(a)
        assert format_function(rewritten) == format_function(a)


def test_distinct_functions_differ_at_some_point(ctx2, rng):
    for _ in range(200):
        a = random_polynomial(ctx2, rng, degree=2, terms=3)
        b = a + q(ctx2, 1) * p(ctx2, 2)
        assert a != b
        points = [random_point(ctx2, rng) for _ in range(20)]
        assert any(evaluate(a, point) != evaluate(b, point) for point in points)


def test_leibniz_rule(ctx2, rng):
    for _ in range(100):
        f = random_rational(ctx2, rng)
        g = random_polynomial(ctx2, rng)
        name = rng.choice(ctx2.phase_names)
        assert differentiate(f * g, name) == differentiate(f, name) * g + f * differentiate(g, name)


def test_immutable(ctx1):
    f = q(ctx1, 1)
    with pytest.raises(AttributeError):
        f.ctx = PhaseContext(n=2)


def test_context_rejects_bad_parameters():
    with pytest.raises(ValueError):
        PhaseContext(n=1, param_names=("q1",))
    with pytest.raises(ValueError):
        PhaseContext(n=1, param_names=("m", "m"))
    assert PhaseContext(n=2, param_names=("hbar", "m", "omega", "k")).names[-1] == "k"


def test_random_point_binds_positive_parameters(ctx1):
    point = random_point(ctx1, random.Random(7))
    assert set(point) == set(ctx1.names)
    assert all(point[name] > 0 for name in ctx1.param_names)
