"""Finite-difference checks of polarized one-dimensional operators.

Everything upstream of ``discretize`` is exact; coefficients are converted
to double precision only when they are sampled on the grid.
"""

from collections.abc import Callable, Mapping, Sequence
from typing import Literal

import numpy as np
from loguru import logger
from numpy.linalg import LinAlgError
from pydantic import BaseModel, ConfigDict, Field, computed_field
from scipy.integrate import trapezoid
from scipy.linalg import eigh_tridiagonal
from sympy import lambdify

from tuned_quant.services.corpus import sho_hamiltonian
from tuned_quant.services.diffop import DiffOperator, order, preserves_polarization, restrict_to_polarized
from tuned_quant.services.errors import (
    DimensionError,
    NonSymmetricOperatorError,
    OrderTooHighError,
    PolarizationError,
    SpectrumConvergenceError,
    UnknownVariableError,
)
from tuned_quant.services.expr import PhaseContext, PhaseFunction, depends_on, free_names
from tuned_quant.services.quantize import QuantizationConfig, q_tt2


class Grid1D(BaseModel):
    model_config = ConfigDict(frozen=True)

    half_width: float = Field(gt=0)
    points: int = Field(ge=3)
    # Boundary values are pinned to zero; the tridiagonal solver has no periodic corner terms.
    dirichlet: Literal[True] = True

    @computed_field
    @property
    def spacing(self) -> float:
        return 2 * self.half_width / (self.points - 1)

    def nodes(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.points)


class PolarizedCoefficients(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    c0: PhaseFunction
    c1: PhaseFunction
    c2: PhaseFunction

    def as_tuple(self) -> tuple[PhaseFunction, PhaseFunction, PhaseFunction]:
        return self.c0, self.c1, self.c2


class TridiagonalMatrix(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    diagonal: np.ndarray
    off_diagonal: np.ndarray

    @property
    def size(self) -> int:
        return len(self.diagonal)

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diagonal) + np.diag(self.off_diagonal, 1) + np.diag(self.off_diagonal, -1)


class VolPProbe(BaseModel):
    momentum_half_widths: list[float]
    norms: list[float]
    ratios: list[float]


class ConvergenceReport(BaseModel):
    points: list[int]
    eigenvalues: list[float]
    errors: list[float]
    ratios: list[float]


class SpectrumReport(BaseModel):
    eigenvalues: list[float]
    analytic: list[float]
    rel_errors: list[float]
    grid: dict[str, int | float]


def polarized_coefficients(op: DiffOperator) -> PolarizedCoefficients:
    """(c0, c1, c2) of c0 + c1 d/dq + c2 d^2/dq^2 after dropping momentum derivatives."""
    ctx = op.ctx
    if ctx.n != 1:
        raise DimensionError(f"Only n=1 operators can be discretized, got n={ctx.n}")
    if not preserves_polarization(op):
        raise PolarizationError("Operator does not map polarized functions to polarized functions")
    restricted = restrict_to_polarized(op)
    if order(restricted) > 2:
        raise OrderTooHighError(f"Polarized operator has order {order(restricted)}, at most 2 is supported")
    c0, c1, c2 = (restricted.coefficient((k, 0)) for k in range(3))
    return PolarizedCoefficients(c0=c0, c1=c1, c2=c2)


def _numeric(f: PhaseFunction, params: Mapping[str, float]) -> Callable[[np.ndarray], np.ndarray]:
    ctx = f.ctx
    missing = sorted((free_names(f) & set(ctx.param_names)) - set(params))
    if missing:
        raise UnknownVariableError(f"No numeric value for parameters {', '.join(missing)}")
    symbols = ctx.field.symbols
    compiled = lambdify(symbols, f.frac.as_expr(), modules="numpy")
    q_index = ctx.names.index("q1")

    def sample(q: np.ndarray) -> np.ndarray:
        args = [params.get(name, 0.0) for name in ctx.names]
        args[q_index] = q
        return np.broadcast_to(np.asarray(compiled(*args), dtype=complex), q.shape)

    return sample


def sample_function(f: PhaseFunction, grid: Grid1D, params: Mapping[str, float]) -> np.ndarray:
    if f.ctx.n != 1 or depends_on(f, f.ctx.p_names):
        raise DimensionError("Only momentum-free functions of q1 can be sampled")
    return _numeric(f, params)(grid.nodes())


def _check_params(params: Mapping[str, float]) -> None:
    for name, value in params.items():
        if value <= 0:
            raise NonSymmetricOperatorError(f"Parameter {name} must be positive, got {value}")


def discretize(coeffs: PolarizedCoefficients, grid: Grid1D, params: Mapping[str, float]) -> TridiagonalMatrix:
    """Central differences with Dirichlet ghost nodes just outside [-L, L]."""
    _check_params(params)
    if not coeffs.c1.is_zero:
        raise NonSymmetricOperatorError("First-order term present; only the self-adjoint Schrodinger case is supported")
    if depends_on(coeffs.c2, coeffs.c2.ctx.phase_names):
        raise NonSymmetricOperatorError("Second-order coefficient must be constant")
    q = grid.nodes()
    c2 = complex(_numeric(coeffs.c2, params)(np.zeros(1))[0])
    if abs(c2.imag) > 1e-12 or c2.real >= 0:
        raise NonSymmetricOperatorError(f"Second-order coefficient must be a negative real constant, got {c2}")
    c0 = _numeric(coeffs.c0, params)(q)
    if np.max(np.abs(c0.imag), initial=0.0) > 1e-12:
        raise NonSymmetricOperatorError("Potential term is not real on the grid")
    h2 = grid.spacing**2
    diagonal = c0.real - 2 * c2.real / h2
    off_diagonal = np.full(grid.points - 1, c2.real / h2)
    logger.debug("Discretized operator points={} spacing={:.3e}", grid.points, grid.spacing)
    return TridiagonalMatrix(diagonal=diagonal, off_diagonal=off_diagonal)


def _select(matrix: TridiagonalMatrix, count: int) -> tuple[int, int]:
    if count < 1 or count > matrix.size:
        raise DimensionError(f"Requested {count} eigenvalues of a {matrix.size}x{matrix.size} matrix")
    return 0, count - 1


def eigen_spectrum(matrix: TridiagonalMatrix, count: int) -> list[float]:
    select_range = _select(matrix, count)
    try:
        values = eigh_tridiagonal(
            matrix.diagonal, matrix.off_diagonal, eigvals_only=True, select="i", select_range=select_range
        )
    except LinAlgError as exc:
        raise SpectrumConvergenceError(f"Eigenvalue iteration did not converge: {exc}") from exc
    return [float(v) for v in np.sort(values)]


def eigen_pairs(matrix: TridiagonalMatrix, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Lowest eigenvalues and the matching eigenvectors (columns)."""
    select_range = _select(matrix, count)
    try:
        values, vectors = eigh_tridiagonal(matrix.diagonal, matrix.off_diagonal, select="i", select_range=select_range)
    except LinAlgError as exc:
        raise SpectrumConvergenceError(f"Eigenvector iteration did not converge: {exc}") from exc
    return values, vectors


def norm_check(
    psi: PhaseFunction | np.ndarray | Callable[[np.ndarray], np.ndarray],
    grid: Grid1D,
    params: Mapping[str, float] | None = None,
) -> float:
    """Trapezoid estimate of the squared norm int |psi|^2 dq over [-L, L]."""
    if isinstance(psi, PhaseFunction):
        samples = sample_function(psi, grid, params or {})
    elif callable(psi):
        samples = np.asarray(psi(grid.nodes()))
    else:
        samples = np.asarray(psi)
    if samples.shape != (grid.points,):
        raise DimensionError(f"Expected {grid.points} samples, got shape {samples.shape}")
    return float(trapezoid(np.abs(samples) ** 2, grid.nodes()))


def vol_p_probe(
    samples: np.ndarray, grid: Grid1D, momentum_half_widths: Sequence[float] = (5.0, 10.0, 20.0), momentum_points: int = 101
) -> VolPProbe:
    """Norm of a polarized state over [-L, L] x [-Lp, Lp]; grows linearly in Lp."""
    density = np.abs(np.asarray(samples)) ** 2
    norms = []
    for width in momentum_half_widths:
        momenta = np.linspace(-width, width, momentum_points)
        integrand = np.broadcast_to(density[:, None], (grid.points, momentum_points))
        inner = trapezoid(integrand, momenta, axis=1)
        norms.append(float(trapezoid(inner, grid.nodes())))
    ratios = [b / a for a, b in zip(norms, norms[1:])]
    return VolPProbe(momentum_half_widths=list(momentum_half_widths), norms=norms, ratios=ratios)


def trapezoid_inner_products(vectors: np.ndarray, grid: Grid1D) -> np.ndarray:
    """Gram matrix of eigenvector columns normalized under the trapezoid rule."""
    q = grid.nodes()
    normalized = vectors / np.sqrt(trapezoid(np.abs(vectors) ** 2, q, axis=0))
    columns = range(vectors.shape[1])
    return np.array([[trapezoid(normalized[:, i] * normalized[:, j], q) for j in columns] for i in columns])


def sho_coefficients(ctx: PhaseContext | None = None, cfg: QuantizationConfig | None = None) -> PolarizedCoefficients:
    ctx = ctx or PhaseContext(n=1)
    cfg = cfg or QuantizationConfig.for_context(ctx)
    return polarized_coefficients(q_tt2(sho_hamiltonian(ctx), cfg))


def analytic_sho(count: int, params: Mapping[str, float]) -> list[float]:
    return [(k + 0.5) * params["hbar"] * params["omega"] for k in range(count)]


def ground_state_convergence(
    params: Mapping[str, float], sizes: Sequence[int] = (500, 1000, 2000), half_width: float = 10.0
) -> ConvergenceReport:
    coeffs = sho_coefficients()
    exact = analytic_sho(1, params)[0]
    values = []
    for size in sizes:
        matrix = discretize(coeffs, Grid1D(half_width=half_width, points=size), params)
        values.append(eigen_spectrum(matrix, 1)[0])
    errors = [abs(v - exact) for v in values]
    ratios = [a / b for a, b in zip(errors, errors[1:])]
    logger.info("Ground state convergence sizes={} ratios={}", list(sizes), [round(r, 3) for r in ratios])
    return ConvergenceReport(points=list(sizes), eigenvalues=values, errors=errors, ratios=ratios)


def sho_spectrum_report(grid: Grid1D, params: Mapping[str, float], count: int = 6) -> SpectrumReport:
    matrix = discretize(sho_coefficients(), grid, params)
    values = eigen_spectrum(matrix, count)
    analytic = analytic_sho(count, params)
    rel_errors = [abs(v - a) / abs(a) for v, a in zip(values, analytic)]
    logger.info("Spectrum computed points={} half_width={} max_rel_error={:.2e}", grid.points, grid.half_width, max(rel_errors))
    return SpectrumReport(
        eigenvalues=values,
        analytic=analytic,
        rel_errors=rel_errors,
        grid={"N": grid.points, "L": grid.half_width},
    )
