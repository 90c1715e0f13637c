"""
Symbol calculus on R^d: naive and principal symbols, the Lie derivative of
symmetric contravariant tensors, and the generators of proj(R^d).
"""
from fractions import Fraction
from math import factorial

from app.exceptions import DimensionError
from app.models.operator import DensityOperator, VectorField
from app.models.polynomial import MultiPoly
from app.models.symbol import SymbolPoly
from app.services.densities import require_w_free


def proj_generators(d: int) -> list[VectorField]:
    """
    Generators of proj(R^d) in a fixed order: translations d_i (i = 1..d),
    then linear fields x_k d_i (i outer, k inner), then x_j x^i d_i (j = 1..d).
    """
    if d < 1:
        raise DimensionError(f"dimension must be >= 1, got {d}")
    out = [VectorField.coordinate(d, i) for i in range(1, d + 1)]
    for i in range(1, d + 1):
        for k in range(1, d + 1):
            out.append(VectorField.coordinate(d, i, MultiPoly.variable(d, k)))
    out.extend(special_projective(d, j) for j in range(1, d + 1))
    return out


def special_projective(d: int, j: int) -> VectorField:
    xj = MultiPoly.variable(d, j)
    return VectorField(d, tuple(xj * MultiPoly.variable(d, i) for i in range(1, d + 1)))


def symbol_lie(k: VectorField, p: SymbolPoly) -> SymbolPoly:
    """L_K p = K^i d_{x_i} p - (d_{x_j} K^i) xi_i d_{xi_j} p."""
    if k.dim != p.dim:
        raise DimensionError(f"dimension mismatch: {k.dim} vs {p.dim}")
    dim = p.dim
    out = SymbolPoly.zero(dim)
    for i, comp in enumerate(k.components, start=1):
        if comp.is_zero():
            continue
        out = out + p.partial_x(i) * comp
        for j in range(1, dim + 1):
            dk = comp.partial(j)
            if dk.is_zero():
                continue
            out = out - p.partial_xi(j).times_xi(i) * dk
    return out


def naive_symbol(delta: DensityOperator) -> SymbolPoly:
    """sum T_alpha d^alpha read as sum T_alpha xi^alpha."""
    require_w_free(delta)
    return SymbolPoly.naive(delta)


def principal_symbol(delta: DensityOperator, k: int) -> SymbolPoly:
    """Homogeneous degree-k part of the naive symbol."""
    return naive_symbol(delta).homogeneous_part(k)


def contraction_power(p: SymbolPoly, r: int) -> SymbolPoly:
    for _ in range(r):
        if p.is_zero():
            break
        p = p.contraction()
    return p


def symbol_map_term(p_k: SymbolPoly, k: int, r: int) -> SymbolPoly:
    """
    (k - r)!/k! D^r p_k for a homogeneous symbol of degree k.

    For p_k = S^{i1..ik} xi_i1..xi_ik this is d_j1..d_jr S^{j1..jr i..} xi_i..xi,
    the tensor multiplied by c_r^(k) in the symbol map.
    """
    return contraction_power(p_k, r).scale(Fraction(factorial(k - r), factorial(k)))
