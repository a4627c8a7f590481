import pytest

from tuned_quant.services.corpus import angular_momentum, free_hamiltonian, sho_hamiltonian
from tuned_quant.services.diffop import apply, commutator, derivative, scale
from tuned_quant.services.errors import SingularMetricError
from tuned_quant.services.expr import constant, differentiate, p, q, variable
from tuned_quant.services.matrices import determinant, inverse, sqrt_abs
from tuned_quant.services.sampling import random_p_homogeneous, random_polynomial
from tuned_quant.services.symplectic import (
    Metric,
    VectorField,
    hamiltonian_vf,
    is_vertical,
    laplace_beltrami,
    poisson_bracket,
    symplectic_pairing,
    tautological_vf,
    theta_contract,
)
from tuned_quant.services.quantize import theta_derivative


def test_hamiltonian_field_of_angular_momentum(ctx3):
    field = hamiltonian_vf(angular_momentum(ctx3, 3))
    expected = (
        scale(derivative(ctx3, "q1"), q(ctx3, 2))
        - scale(derivative(ctx3, "q2"), q(ctx3, 1))
        + scale(derivative(ctx3, "p1"), p(ctx3, 2))
        - scale(derivative(ctx3, "p2"), p(ctx3, 1))
    )
    assert field == expected


def test_hamiltonian_field_of_oscillator(ctx1):
    field = hamiltonian_vf(sho_hamiltonian(ctx1))
    mass, omega = variable(ctx1, "m"), variable(ctx1, "omega")
    assert field.q_component(1) == -p(ctx1, 1) / mass
    assert field.p_component(1) == mass * omega**2 * q(ctx1, 1)


def test_hamiltonian_field_acts_as_bracket(ctx2, rng):
    for _ in range(30):
        f, g = random_polynomial(ctx2, rng), random_polynomial(ctx2, rng)
        assert apply(hamiltonian_vf(f), g) == poisson_bracket(f, g)


def test_canonical_brackets(ctx3):
    for i in range(1, 4):
        for j in range(1, 4):
            assert poisson_bracket(q(ctx3, i), p(ctx3, j)) == int(i == j)
            assert poisson_bracket(q(ctx3, i), q(ctx3, j)).is_zero
            assert poisson_bracket(p(ctx3, i), p(ctx3, j)).is_zero


def test_angular_momentum_brackets(ctx3):
    l1, l2, l3 = (angular_momentum(ctx3, a) for a in (1, 2, 3))
    assert poisson_bracket(l1, l2) == l3
    assert poisson_bracket(l2, l3) == l1
    assert poisson_bracket(l3, l1) == l2
    assert poisson_bracket(l3, free_hamiltonian(ctx3)).is_zero


def test_bracket_properties(ctx2, rng):
    for _ in range(30):
        f, g, h = (random_polynomial(ctx2, rng) for _ in range(3))
        assert poisson_bracket(f, g) == -poisson_bracket(g, f)
        jacobi = (
            poisson_bracket(f, poisson_bracket(g, h))
            + poisson_bracket(g, poisson_bracket(h, f))
            + poisson_bracket(h, poisson_bracket(f, g))
        )
        assert jacobi.is_zero
        assert hamiltonian_vf(poisson_bracket(f, g)) == commutator(hamiltonian_vf(f), hamiltonian_vf(g))


def test_tautological_field(ctx2):
    theta = tautological_vf(ctx2)
    assert is_vertical(theta)
    assert theta.p_component(2) == p(ctx2, 2)
    assert theta.q_component(1).is_zero


def test_euler_property(ctx2, rng):
    for degree in range(4):
        for _ in range(5):
            f = random_p_homogeneous(ctx2, rng, degree)
            assert theta_derivative(f) == degree * f


def test_theta_contract(ctx3):
    field = hamiltonian_vf(angular_momentum(ctx3, 3))
    assert theta_contract(field) == -angular_momentum(ctx3, 3)
    assert theta_contract(tautological_vf(ctx3)).is_zero
    assert not is_vertical(field)


def test_symplectic_pairing_recovers_gradient(ctx2, rng):
    for _ in range(10):
        f = random_polynomial(ctx2, rng)
        for k, name in enumerate(ctx2.q_names, start=1):
            coordinate_field = VectorField.from_operator(derivative(ctx2, name))
            assert symplectic_pairing(hamiltonian_vf(f), coordinate_field) == differentiate(f, name)
        assert symplectic_pairing(hamiltonian_vf(f), hamiltonian_vf(f)).is_zero


def test_vector_field_rejects_higher_order(ctx1):
    with pytest.raises(ValueError):
        VectorField.from_operator(derivative(ctx1, "q1", "q1"))
    with pytest.raises(ValueError):
        VectorField.from_components(ctx1, [], [])


def test_flat_laplacian(ctx2):
    laplacian = laplace_beltrami(Metric.flat(ctx2))
    expected = sum(
        (derivative(ctx2, name, name) for name in ctx2.phase_names[1:]), derivative(ctx2, "q1", "q1")
    )
    assert laplacian == expected
    assert apply(laplacian, q(ctx2, 1) ** 2) == 2


def test_flat_laplacian_commutes_with_rotation_generators(ctx3):
    laplacian = laplace_beltrami(Metric.flat(ctx3))
    generators = []
    for kind in ("q", "p"):
        for a in range(1, 4):
            for b in range(1, 4):
                if a != b:
                    x_a, x_b = variable(ctx3, f"{kind}{a}"), variable(ctx3, f"{kind}{b}")
                    generators.append(
                        scale(derivative(ctx3, f"{kind}{b}"), x_a) - scale(derivative(ctx3, f"{kind}{a}"), x_b)
                    )
    assert len(generators) == 12
    for generator in generators:
        assert commutator(laplacian, generator).is_zero


def test_flat_configuration_laplacian(ctx2):
    laplacian = laplace_beltrami(Metric.flat_configuration(ctx2))
    assert laplacian == derivative(ctx2, "q1", "q1") + derivative(ctx2, "q2", "q2")


def test_laplacian_matches_explicit_metric(ctx1, rng):
    u = 1 + q(ctx1, 1) ** 2
    metric = Metric.from_rows(ctx1, [[u**2, constant(ctx1, 0)], [constant(ctx1, 0), constant(ctx1, 1)]])
    assert not metric.is_flat_identity
    laplacian = laplace_beltrami(metric)
    for _ in range(10):
        f = random_polynomial(ctx1, rng)
        inner = differentiate(f, "q1") / u
        expected = differentiate(inner, "q1") / u + differentiate(differentiate(f, "p1"), "p1")
        assert apply(laplacian, f) == expected


def test_metric_from_rows_detects_identity(ctx1):
    metric = Metric.from_rows(ctx1, [["1", "0"], ["0", "1"]])
    assert metric.is_flat_identity
    assert laplace_beltrami(metric) == laplace_beltrami(Metric.flat(ctx1))


def test_metric_from_json(ctx1):
    metric = Metric.from_json(ctx1, '[["1 + q1^2"]]', over="configuration")
    assert metric.variables == ("q1",)
    with pytest.raises(SingularMetricError):
        Metric.from_json(ctx1, '{"g": 1}')


def test_singular_and_invalid_metrics(ctx1):
    with pytest.raises(SingularMetricError):
        Metric.from_rows(ctx1, [["1", "1"], ["1", "1"]])
    with pytest.raises(SingularMetricError):
        Metric.from_rows(ctx1, [["1", "q1"], ["0", "1"]])
    with pytest.raises(SingularMetricError):
        Metric.from_rows(ctx1, [["1"]])
    with pytest.raises(SingularMetricError, match="not real"):
        Metric.from_rows(ctx1, [["i", "0"], ["0", "i"]])
    with pytest.raises(SingularMetricError, match="not real"):
        Metric.from_rows(ctx1, [["1 + i*q1", "0"], ["0", "1"]])
    with pytest.raises(SingularMetricError, match="positive definite"):
        Metric.from_rows(ctx1, [["1", "0"], ["0", "-1"]])
    with pytest.raises(SingularMetricError, match="positive definite"):
        Metric.from_rows(ctx1, [["1", "2"], ["2", "1"]])
    assert not Metric.from_rows(ctx1, [["2", "1"], ["1", "2"]]).is_flat_identity
    without_root = Metric.from_rows(ctx1, [["q1", "0"], ["0", "1"]])
    with pytest.raises(SingularMetricError):
        laplace_beltrami(without_root)


def test_matrix_helpers(ctx1):
    rows = [[q(ctx1, 1), constant(ctx1, 1)], [constant(ctx1, 0), p(ctx1, 1)]]
    assert determinant(ctx1, rows) == q(ctx1, 1) * p(ctx1, 1)
    inv = inverse(ctx1, rows)
    assert inv[0][0] == 1 / q(ctx1, 1)
    assert inv[0][1] == -1 / (q(ctx1, 1) * p(ctx1, 1))
    assert sqrt_abs(4 * (1 + q(ctx1, 1) ** 2) ** 2) == 2 * (1 + q(ctx1, 1) ** 2)
    assert sqrt_abs(-(q(ctx1, 1) ** 2) / 9) == q(ctx1, 1) / 3
    with pytest.raises(SingularMetricError):
        sqrt_abs(2 * q(ctx1, 1) ** 2)
    with pytest.raises(SingularMetricError):
        inverse(ctx1, [[q(ctx1, 1), q(ctx1, 1)], [q(ctx1, 1), q(ctx1, 1)]])
