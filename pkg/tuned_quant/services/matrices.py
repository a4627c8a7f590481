from fractions import Fraction
from math import isqrt

from sympy.polys.matrices import DomainMatrix
from sympy.polys.rings import PolyElement

from tuned_quant.services.errors import SingularMetricError
from tuned_quant.services.expr import PhaseContext, PhaseFunction, gaussian, gaussian_parts

Matrix = list[list[PhaseFunction]]


def _domain_matrix(ctx: PhaseContext, rows: Matrix) -> DomainMatrix:
    size = len(rows)
    if any(len(row) != size for row in rows):
        raise ValueError(f"Expected a square matrix, got row lengths {[len(row) for row in rows]}")
    return DomainMatrix([[entry.frac for entry in row] for row in rows], (size, size), ctx.field.to_domain())


def determinant(ctx: PhaseContext, rows: Matrix) -> PhaseFunction:
    return PhaseFunction(ctx, _domain_matrix(ctx, rows).det())


def inverse(ctx: PhaseContext, rows: Matrix) -> Matrix:
    if determinant(ctx, rows).is_zero:
        raise SingularMetricError("Matrix determinant is identically zero")
    inv = _domain_matrix(ctx, rows).inv()
    return [[PhaseFunction(ctx, entry) for entry in row] for row in inv.to_list()]


def _rational_sqrt(value: Fraction) -> Fraction | None:
    num, den = abs(value.numerator), value.denominator
    root_num, root_den = isqrt(num), isqrt(den)
    if root_num * root_num != num or root_den * root_den != den:
        return None
    return Fraction(root_num, root_den)


def _poly_sqrt_abs(poly: PolyElement) -> PolyElement | None:
    coeff, factors = poly.sqf_list()
    re_part, im_part = gaussian_parts(coeff)
    if im_part != 0:
        return None
    root = _rational_sqrt(re_part)
    if root is None:
        return None
    result = poly.ring.ground_new(gaussian(root))
    for factor, multiplicity in factors:
        if multiplicity % 2:
            return None
        result = result * factor ** (multiplicity // 2)
    return result


def sqrt_abs(f: PhaseFunction) -> PhaseFunction:
    """Exact ``sqrt(|f|)`` for a rational function that is a square up to a real constant sign."""
    if f.is_zero:
        raise SingularMetricError("Metric determinant is identically zero")
    numer = _poly_sqrt_abs(f.numer)
    denom = _poly_sqrt_abs(f.denom)
    if numer is None or denom is None:
        raise SingularMetricError("Metric determinant has no exact rational square root")
    return PhaseFunction(f.ctx, f.ctx.field.new(numer, denom))
