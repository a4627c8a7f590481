import pytest

from tuned_quant.services.corpus import sho_hamiltonian
from tuned_quant.services.diffop import (
    DiffOperator,
    apply,
    commutator,
    compose,
    derivative,
    derivative_key,
    format_operator,
    from_function,
    identity,
    order,
    preserves_polarization,
    restrict_to_polarized,
    scale,
    to_json,
    zero_operator,
)
from tuned_quant.services.errors import ContextMismatchError, UnknownVariableError
from tuned_quant.services.expr import imaginary_unit, p, q, variable
from tuned_quant.services.quantize import q_ks
from tuned_quant.services.sampling import random_operator, random_polynomial, random_q_polynomial


def _i_hbar(ctx):
    return imaginary_unit(ctx) * variable(ctx, "hbar")


def test_compose_derivative_with_multiplication(ctx1):
    d_q1 = derivative(ctx1, "q1")
    q1 = from_function(q(ctx1, 1))
    assert compose(d_q1, q1) == scale(d_q1, q(ctx1, 1)) + identity(ctx1)
    assert compose(q1, d_q1) == scale(d_q1, q(ctx1, 1))
    assert commutator(d_q1, q1) == identity(ctx1)


def test_compose_mixed_momentum_terms(ctx2):
    left = scale(derivative(ctx2, "p1"), p(ctx2, 2))
    right = scale(derivative(ctx2, "p2"), p(ctx2, 1))
    expected = scale(derivative(ctx2, "p1", "p2"), p(ctx2, 1) * p(ctx2, 2)) + scale(derivative(ctx2, "p2"), p(ctx2, 2))
    assert compose(left, right) == expected


def test_compose_with_zero(ctx2, rng):
    op = random_operator(ctx2, rng)
    assert compose(op, zero_operator(ctx2)).is_zero
    assert compose(zero_operator(ctx2), op).is_zero
    assert commutator(op, op).is_zero


def test_apply(ctx1):
    op = scale(derivative(ctx1, "q1"), -_i_hbar(ctx1))
    assert apply(op, q(ctx1, 1) ** 2) == -2 * _i_hbar(ctx1) * q(ctx1, 1)
    assert apply(identity(ctx1), p(ctx1, 1)) == p(ctx1, 1)


def test_operator_arithmetic(ctx1):
    d_q1 = derivative(ctx1, "q1")
    assert d_q1 + 0 == d_q1
    assert (d_q1 - d_q1).is_zero
    assert 2 * d_q1 == d_q1 + d_q1
    assert d_q1**2 == derivative(ctx1, "q1", "q1")
    assert d_q1 * d_q1 == d_q1 @ d_q1
    assert (d_q1 / variable(ctx1, "m")).coefficient((1, 0)) == 1 / variable(ctx1, "m")
    assert -d_q1 == scale(d_q1, -1)
    assert q(ctx1, 1) + d_q1 == from_function(q(ctx1, 1)) + d_q1


def test_invalid_operators(ctx1, ctx2):
    with pytest.raises(ValueError):
        DiffOperator(ctx1, {(1,): q(ctx1, 1)})
    with pytest.raises(UnknownVariableError):
        derivative(ctx1, "m")
    with pytest.raises(ContextMismatchError):
        compose(derivative(ctx1, "q1"), derivative(ctx2, "q1"))
    with pytest.raises(AttributeError):
        derivative(ctx1, "q1").terms = {}


def test_zero_coefficients_are_dropped(ctx1):
    op = DiffOperator(ctx1, {(0, 0): q(ctx1, 1) - q(ctx1, 1), (1, 0): p(ctx1, 1)})
    assert list(op.terms) == [(1, 0)]


def test_order(ctx1):
    assert order(zero_operator(ctx1)) == 0
    assert order(q_ks(q(ctx1, 1))) == 1
    assert order(derivative(ctx1, "q1", "p1", "p1")) == 3


def test_restrict_and_polarization(ctx1, ctx3, macros3):
    assert restrict_to_polarized(q_ks(q(ctx1, 1))) == from_function(q(ctx1, 1))
    assert not preserves_polarization(from_function(p(ctx1, 1)))
    assert preserves_polarization(scale(derivative(ctx1, "q1"), -_i_hbar(ctx1)))
    assert not preserves_polarization(q_ks(sho_hamiltonian(ctx1)))

    rotation = scale(
        scale(derivative(ctx3, "q1"), q(ctx3, 2)) - scale(derivative(ctx3, "q2"), q(ctx3, 1)), _i_hbar(ctx3)
    )
    assert restrict_to_polarized(q_ks(macros3["L3"])) == rotation


def test_associativity(ctx1, rng):
    for _ in range(100):
        a, b, c = (random_operator(ctx1, rng) for _ in range(3))
        assert compose(compose(a, b), c) == compose(a, compose(b, c))


def test_associativity_in_two_dimensions(ctx2, rng):
    for _ in range(100):
        a, b, c = (random_operator(ctx2, rng) for _ in range(3))
        assert compose(compose(a, b), c) == compose(a, compose(b, c))


def test_bilinearity(ctx2, rng):
    for _ in range(30):
        a, b, c = (random_operator(ctx2, rng) for _ in range(3))
        assert compose(a + b, c) == compose(a, c) + compose(b, c)
        assert compose(c, a + b) == compose(c, a) + compose(c, b)


def test_action_is_a_homomorphism(ctx2, rng):
    for _ in range(100):
        a, b = random_operator(ctx2, rng), random_operator(ctx2, rng)
        f = random_polynomial(ctx2, rng)
        assert apply(compose(a, b), f) == apply(a, apply(b, f))


def test_commutator_jacobi(ctx1, rng):
    for _ in range(50):
        a, b, c = (random_operator(ctx1, rng) for _ in range(3))
        total = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) + commutator(c, commutator(a, b))
        assert total.is_zero


def test_restriction_agrees_on_polarized_functions(ctx2, rng):
    for _ in range(50):
        op = random_operator(ctx2, rng)
        restricted = restrict_to_polarized(op)
        for _ in range(20):
            phi = random_q_polynomial(ctx2, rng)
            assert apply(op, phi) == apply(restricted, phi)


def test_derivative_key(ctx2):
    assert derivative_key(ctx2, (0, 0, 0, 0)) == ""
    assert derivative_key(ctx2, (1, 0, 0, 0)) == "d/dq1"
    assert derivative_key(ctx2, (2, 0, 0, 0)) == "d2/dq1^2"
    assert derivative_key(ctx2, (1, 0, 0, 1)) == "d2/dq1dp2"


def test_format_operator(ctx1):
    assert format_operator(zero_operator(ctx1)) == "0"
    assert format_operator(identity(ctx1)) == "1"
    assert format_operator(derivative(ctx1, "q1")) == "d/dq1"
    assert format_operator(scale(derivative(ctx1, "q1"), -_i_hbar(ctx1))) == "-i*hbar*d/dq1"
    assert format_operator(q_ks(q(ctx1, 1))) == "q1 + i*hbar*d/dp1"
    assert str(q_ks(q(ctx1, 1))) == "q1 + i*hbar*d/dp1"


def test_format_operator_brackets_fractional_coefficients(ctx1):
    op = scale(derivative(ctx1, "q1"), 1 / p(ctx1, 1) ** 2) + derivative(ctx1, "p1")
    assert format_operator(op) == "(1/p1^2)*d/dq1 + d/dp1"
    assert format_operator(scale(derivative(ctx1, "q1"), 1 / p(ctx1, 1) ** 2)) == "(1/p1^2)*d/dq1"


def test_to_json(ctx1):
    assert to_json(q_ks(q(ctx1, 1))) == [
        {"coeff": "q1", "dq": [0], "dp": [0]},
        {"coeff": "i*hbar", "dq": [0], "dp": [1]},
    ]
    assert to_json(zero_operator(ctx1)) == []
