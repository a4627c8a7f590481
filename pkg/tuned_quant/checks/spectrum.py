import math

import numpy as np

from tuned_quant.checks.common import mismatch, verdict
from tuned_quant.checks.references import cite
from tuned_quant.config import Settings
from tuned_quant.models.check import CheckResult
from tuned_quant.services.corpus import sho_hamiltonian
from tuned_quant.services.expr import PhaseContext, constant, format_function, imaginary_unit, p, q, variable
from tuned_quant.services.quantize import MapKind, QuantizationConfig, q_tt2
from tuned_quant.services.spectral import (
    Grid1D,
    discretize,
    eigen_pairs,
    ground_state_convergence,
    norm_check,
    polarized_coefficients,
    sho_coefficients,
    sho_spectrum_report,
    trapezoid_inner_products,
    vol_p_probe,
)

UNIT_PARAMS = {"hbar": 1.0, "m": 1.0, "omega": 1.0}


def _grid(settings: Settings) -> Grid1D:
    return Grid1D(half_width=settings.domain_half_width, points=settings.grid_points)


def polarized_oscillator_coefficients(settings: Settings) -> CheckResult:
    """(c0, c1, c2) of the polarized TT2(H_SHO) and TT2(p1)."""
    ctx = PhaseContext(n=1)
    cfg = QuantizationConfig.for_context(ctx, MapKind.TT2)
    mass, omega, hbar = variable(ctx, "m"), variable(ctx, "omega"), variable(ctx, "hbar")
    zero = constant(ctx, 0)
    cases = [
        ("H_SHO", sho_hamiltonian(ctx), (mass * omega**2 * q(ctx, 1) ** 2 / 2, zero, -(hbar**2) / (2 * mass))),
        ("p1", p(ctx, 1), (zero, -imaginary_unit(ctx) * hbar, zero)),
    ]
    shown = []
    for label, f, expected in cases:
        actual = polarized_coefficients(q_tt2(f, cfg)).as_tuple()
        actual_text = ", ".join(format_function(c) for c in actual)
        expected_text = ", ".join(format_function(c) for c in expected)
        if actual != expected:
            detail = f"TT2({label}): {mismatch(actual_text, expected_text)}"
            return verdict("polarized_oscillator_coefficients", False, detail, cite("S.1"))
        shown.append(f"TT2({label}) -> ({expected_text})")
    return verdict("polarized_oscillator_coefficients", True, "; ".join(shown), cite("S.1"))


def sho_spectrum(settings: Settings) -> CheckResult:
    report = sho_spectrum_report(_grid(settings), settings.numeric_params(), settings.eigen_count)
    worst = max(report.rel_errors)
    gaps = np.diff(report.eigenvalues)
    unit = report.analytic[1] - report.analytic[0] if len(report.analytic) > 1 else 1.0
    gap_error = float(np.max(np.abs(gaps / unit - 1), initial=0.0))
    ok = worst < 1e-3 and gap_error < 2e-3
    detail = f"eigenvalues={[round(v, 6) for v in report.eigenvalues]} max_rel_error={worst:.2e} gap_error={gap_error:.2e}"
    return verdict("sho_spectrum", ok, detail, cite("S.2"))


def ground_state_order(settings: Settings) -> CheckResult:
    report = ground_state_convergence(UNIT_PARAMS, (500, 1000, 2000), settings.domain_half_width)
    ok = all(3.5 <= r <= 4.5 for r in report.ratios)
    detail = f"error ratios {[round(r, 3) for r in report.ratios]}"
    return verdict("ground_state_order", ok, detail, cite("S.3"))


def eigenvector_orthogonality(settings: Settings) -> CheckResult:
    grid = _grid(settings)
    _, vectors = eigen_pairs(discretize(sho_coefficients(), grid, UNIT_PARAMS), 4)
    gram = trapezoid_inner_products(vectors, grid)
    off = float(np.max(np.abs(gram - np.eye(4))))
    detail = f"max |<u_i,u_j> - delta_ij| = {off:.2e}"
    return verdict("eigenvector_orthogonality", off < 1e-8, detail, cite("S.4"))


def gaussian_norm(settings: Settings) -> CheckResult:
    grid = _grid(settings)
    value = norm_check(lambda x: np.exp(-(x**2) / 2), grid)
    error = abs(value - math.sqrt(math.pi))
    detail = f"norm={value:.10f} |norm - sqrt(pi)|={error:.2e}"
    return verdict("gaussian_norm", error < 1e-6, detail, cite("S.5"))


def vol_p_divergence(settings: Settings) -> CheckResult:
    grid = _grid(settings)
    probe = vol_p_probe(np.exp(-(grid.nodes() ** 2) / 2), grid, (5.0, 10.0, 20.0))
    ok = all(abs(r - 2.0) < 1e-6 for r in probe.ratios)
    detail = f"norms={[round(v, 6) for v in probe.norms]} ratios={probe.ratios}"
    return verdict("vol_p_divergence", ok, detail, cite("S.6"))
