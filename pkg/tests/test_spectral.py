import math

import numpy as np
import pytest

from tuned_quant.services.corpus import sho_hamiltonian
from tuned_quant.services.diffop import derivative, from_function
from tuned_quant.services.errors import (
    DimensionError,
    NonSymmetricOperatorError,
    OrderTooHighError,
    PolarizationError,
    SpectrumConvergenceError,
    UnknownVariableError,
)
from tuned_quant.services.expr import constant, imaginary_unit, p, q, variable
from tuned_quant.services.quantize import MapKind, QuantizationConfig, q_ks, q_tt2
from tuned_quant.services import spectral
from tuned_quant.services.spectral import (
    Grid1D,
    PolarizedCoefficients,
    TridiagonalMatrix,
    analytic_sho,
    discretize,
    eigen_pairs,
    eigen_spectrum,
    ground_state_convergence,
    norm_check,
    polarized_coefficients,
    sample_function,
    sho_coefficients,
    sho_spectrum_report,
    trapezoid_inner_products,
    vol_p_probe,
)

UNIT = {"hbar": 1.0, "m": 1.0, "omega": 1.0}


def _tt2(ctx):
    return QuantizationConfig.for_context(ctx, MapKind.TT2)


def test_oscillator_coefficients(ctx1):
    coeffs = polarized_coefficients(q_tt2(sho_hamiltonian(ctx1), _tt2(ctx1)))
    mass, omega, hbar = variable(ctx1, "m"), variable(ctx1, "omega"), variable(ctx1, "hbar")
    assert coeffs.c0 == mass * omega**2 * q(ctx1, 1) ** 2 / 2
    assert coeffs.c1.is_zero
    assert coeffs.c2 == -(hbar**2) / (2 * mass)
    assert sho_coefficients() == coeffs


def test_simple_coefficients(ctx1):
    coeffs = polarized_coefficients(from_function(q(ctx1, 1)))
    assert coeffs.as_tuple() == (q(ctx1, 1), constant(ctx1, 0), constant(ctx1, 0))
    momentum = polarized_coefficients(q_tt2(p(ctx1, 1), _tt2(ctx1)))
    assert momentum.c1 == -imaginary_unit(ctx1) * variable(ctx1, "hbar")
    assert momentum.c0.is_zero and momentum.c2.is_zero


def test_coefficient_errors(ctx1, ctx2):
    with pytest.raises(DimensionError):
        polarized_coefficients(from_function(q(ctx2, 1)))
    with pytest.raises(PolarizationError):
        polarized_coefficients(q_ks(sho_hamiltonian(ctx1)))
    with pytest.raises(OrderTooHighError):
        polarized_coefficients(derivative(ctx1, "q1", "q1", "q1"))


def test_grid_spacing():
    grid = Grid1D(half_width=2.0, points=5)
    assert grid.spacing == pytest.approx(1.0)
    assert grid.nodes().tolist() == [-2.0, -1.0, 0.0, 1.0, 2.0]
    with pytest.raises(ValueError):
        Grid1D(half_width=0.0, points=5)
    with pytest.raises(ValueError):
        Grid1D(half_width=1.0, points=2)
    with pytest.raises(ValueError):
        Grid1D(half_width=1.0, points=5, dirichlet=False)
    assert Grid1D(half_width=1.0, points=5).dirichlet is True


def test_discretize_five_point_stencil():
    matrix = discretize(sho_coefficients(), Grid1D(half_width=2.0, points=5), UNIT)
    nodes = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    np.testing.assert_allclose(matrix.diagonal, nodes**2 / 2 + 1.0)
    np.testing.assert_allclose(matrix.off_diagonal, np.full(4, -0.5))
    dense = matrix.to_dense()
    assert dense.shape == (5, 5)
    np.testing.assert_allclose(dense, dense.T)


def test_discretize_free_particle(ctx1):
    kinetic = PolarizedCoefficients(
        c0=constant(ctx1, 0), c1=constant(ctx1, 0), c2=-(variable(ctx1, "hbar") ** 2) / (2 * variable(ctx1, "m"))
    )
    matrix = discretize(kinetic, Grid1D(half_width=2.0, points=5), UNIT)
    np.testing.assert_allclose(matrix.diagonal, np.ones(5))
    np.testing.assert_allclose(matrix.off_diagonal, np.full(4, -0.5))


def test_discretize_rejections(ctx1):
    grid = Grid1D(half_width=2.0, points=5)
    momentum = polarized_coefficients(q_tt2(p(ctx1, 1), _tt2(ctx1)))
    with pytest.raises(NonSymmetricOperatorError):
        discretize(momentum, grid, UNIT)
    with pytest.raises(NonSymmetricOperatorError):
        discretize(sho_coefficients(), grid, {"hbar": 1.0, "m": -1.0, "omega": 1.0})
    positive = PolarizedCoefficients(c0=constant(ctx1, 0), c1=constant(ctx1, 0), c2=constant(ctx1, 1))
    with pytest.raises(NonSymmetricOperatorError):
        discretize(positive, grid, UNIT)
    with pytest.raises(UnknownVariableError):
        discretize(sho_coefficients(), grid, {"hbar": 1.0, "m": 1.0})


def test_eigen_spectrum_small_matrices():
    diagonal = TridiagonalMatrix(diagonal=np.array([1.0, 2.0, 3.0]), off_diagonal=np.zeros(2))
    assert eigen_spectrum(diagonal, 3) == pytest.approx([1.0, 2.0, 3.0])
    swap = TridiagonalMatrix(diagonal=np.zeros(2), off_diagonal=np.ones(1))
    assert eigen_spectrum(swap, 2) == pytest.approx([-1.0, 1.0])
    with pytest.raises(DimensionError):
        eigen_spectrum(diagonal, 4)
    with pytest.raises(DimensionError):
        eigen_spectrum(diagonal, 0)


def test_solver_failure_maps_to_convergence_error(monkeypatch):
    def fail(*args, **kwargs):
        raise np.linalg.LinAlgError("eigenvalues did not converge")

    monkeypatch.setattr(spectral, "eigh_tridiagonal", fail)
    matrix = TridiagonalMatrix(diagonal=np.array([1.0, 2.0]), off_diagonal=np.zeros(1))
    with pytest.raises(SpectrumConvergenceError, match="did not converge"):
        eigen_spectrum(matrix, 1)
    with pytest.raises(SpectrumConvergenceError):
        eigen_pairs(matrix, 1)


def test_oscillator_spectrum():
    report = sho_spectrum_report(Grid1D(half_width=10.0, points=2000), UNIT, 6)
    assert report.analytic == [0.5, 1.5, 2.5, 3.5, 4.5, 5.5]
    assert max(report.rel_errors) < 1e-3
    assert report.eigenvalues == pytest.approx(report.analytic, rel=1e-3)
    assert report.grid == {"N": 2000, "L": 10.0}


def test_oscillator_spectrum_scales_with_parameters():
    params = {"hbar": 1.0, "m": 2.0, "omega": 3.0}
    report = sho_spectrum_report(Grid1D(half_width=6.0, points=3000), params, 3)
    assert analytic_sho(3, params) == [1.5, 4.5, 7.5]
    assert report.eigenvalues == pytest.approx([1.5, 4.5, 7.5], rel=1e-3)


def test_ground_state_converges_at_second_order():
    report = ground_state_convergence(UNIT, (500, 1000, 2000), 10.0)
    assert len(report.ratios) == 2
    assert all(3.5 <= ratio <= 4.5 for ratio in report.ratios)


def test_eigenvectors_are_orthonormal():
    grid = Grid1D(half_width=10.0, points=1000)
    values, vectors = eigen_pairs(discretize(sho_coefficients(), grid, UNIT), 4)
    assert values == pytest.approx([0.5, 1.5, 2.5, 3.5], rel=1e-3)
    gram = trapezoid_inner_products(vectors, grid)
    np.testing.assert_allclose(gram, np.eye(4), atol=1e-8)


def test_gaussian_norm(ctx1):
    grid = Grid1D(half_width=10.0, points=2000)
    assert norm_check(lambda x: np.exp(-(x**2) / 2), grid) == pytest.approx(math.sqrt(math.pi), abs=1e-6)
    assert norm_check(np.zeros(grid.points), grid) == 0.0
    assert norm_check(constant(ctx1, 0), grid) == 0.0
    with pytest.raises(DimensionError):
        norm_check(np.zeros(3), grid)


def test_norm_of_sampled_phase_function(ctx1):
    grid = Grid1D(half_width=1.0, points=2001)
    value = norm_check(q(ctx1, 1), grid)
    assert value == pytest.approx(2.0 / 3.0, rel=1e-5)
    with pytest.raises(DimensionError):
        sample_function(p(ctx1, 1), grid, UNIT)


def test_volume_probe_grows_linearly():
    grid = Grid1D(half_width=10.0, points=2000)
    probe = vol_p_probe(np.exp(-(grid.nodes() ** 2) / 2), grid, (5.0, 10.0, 20.0))
    assert probe.ratios == pytest.approx([2.0, 2.0], abs=1e-6)
    assert probe.norms[0] == pytest.approx(10.0 * math.sqrt(math.pi), rel=1e-6)
