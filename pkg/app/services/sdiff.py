"""
Liftings equivariant under volume-preserving vector fields.

A volume form rho|Dx| enters only through its flat connection
Gamma_i = -d_i log rho; rho itself never appears.
"""
from fractions import Fraction

from app.exceptions import DimensionError, OrderError, SingularWeightError
from app.models.geometry import VolumeStructure
from app.models.operator import DensityOperator, VectorField
from app.models.polynomial import LambdaPoly, MultiPoly
from app.models.rational import as_rational
from app.models.symbol import SdiffFamilyParams
from app.services.densities import adjoint, apply_to_unit, require_order, require_w_free, weight_polynomial


def _check(delta: DensityOperator, vol: VolumeStructure):
    if delta.dim != vol.dim:
        raise DimensionError(f"operator of dimension {delta.dim} with a volume of dimension {vol.dim}")


def _covariant_powers(vol: VolumeStructure, shift: LambdaPoly, alpha) -> DensityOperator:
    """prod_i (d_i + shift(w) Gamma_i)^{alpha_i}; the factors commute because Gamma is flat."""
    dim = vol.dim
    result = DensityOperator.identity(dim)
    for index, count in enumerate(alpha, start=1):
        if not count:
            continue
        factor = DensityOperator.derivative(dim, index)
        factor = factor + weight_polynomial(dim, shift).left_multiply(vol.gamma[index - 1])
        for _ in range(count):
            result = result.compose(factor)
    return result


def volume_lift(delta: DensityOperator, lam, vol: VolumeStructure) -> DensityOperator:
    """P_lam(delta) = sum c_alpha prod (d_i + (w - lam) Gamma_i)^{alpha_i}."""
    lam = as_rational(lam)
    _check(delta, vol)
    require_w_free(delta)
    shift = LambdaPoly([-lam, 1])
    result = DensityOperator.zero(delta.dim)
    for term in delta.terms:
        result = result + _covariant_powers(vol, shift, term.alpha).left_multiply(term.coeff)
    return result


def rho_adjoint(delta: DensityOperator, vol: VolumeStructure) -> DensityOperator:
    """
    Adjoint on functions with respect to rho|Dx|: c d^alpha goes to
    (-1)^|alpha| prod (d_i - Gamma_i)^{alpha_i} o c.
    """
    _check(delta, vol)
    require_w_free(delta, "operator on functions")
    minus_one = LambdaPoly.constant(-1)
    result = DensityOperator.zero(delta.dim)
    for term in delta.terms:
        sign = -1 if sum(term.alpha) % 2 else 1
        factor = _covariant_powers(vol, minus_one, term.alpha).scale(sign)
        result = result + factor.compose(DensityOperator.multiplication(term.coeff))
    return result


def divergence_rho(x: VectorField, vol: VolumeStructure) -> MultiPoly:
    """div_rho X = d_i X^i - Gamma_i X^i."""
    if x.dim != vol.dim:
        raise DimensionError(f"field of dimension {x.dim} with a volume of dimension {vol.dim}")
    total = x.divergence()
    for comp, gamma in zip(x.components, vol.gamma):
        total = total - comp * gamma
    return total


def is_divergence_free(x: VectorField, vol: VolumeStructure) -> bool:
    return divergence_rho(x, vol).is_zero()


def sdiff_family_lift(delta: DensityOperator, params: SdiffFamilyParams, vol: VolumeStructure) -> DensityOperator:
    """
    A(w) P + B(w) P* + C(w) P(1) + D(w) P*(1) with u = w - lam and

        A = 1 - b u,  B = (-1)^n b u,  C = sum c_k u^k,  D = sum d_k u^k,

    P = P_lam(delta) and P(1), P*(1) the functions obtained on the constant 1.
    """
    _check(delta, vol)
    require_w_free(delta)
    require_order(delta, params.n)
    lam, b, n = params.lam, params.b, params.n
    dim = delta.dim
    u = LambdaPoly([-lam, 1])
    sign = -1 if n % 2 else 1

    lifted = volume_lift(delta, lam, vol)
    lifted_adjoint = adjoint(lifted)
    a_poly = LambdaPoly.constant(1) - u * b
    b_poly = u * (sign * b)
    c_poly = sum((u ** k * ck for k, ck in enumerate(params.c, start=1)), LambdaPoly())
    d_poly = sum((u ** k * dk for k, dk in enumerate(params.dcoef, start=1)), LambdaPoly())

    result = weight_polynomial(dim, a_poly).compose(lifted)
    result = result + weight_polynomial(dim, b_poly).compose(lifted_adjoint)
    result = result + weight_polynomial(dim, c_poly).left_multiply(apply_to_unit(lifted))
    result = result + weight_polynomial(dim, d_poly).left_multiply(apply_to_unit(lifted_adjoint))
    return result


def line_lift(delta: DensityOperator, n: int, lam, b, vol: VolumeStructure) -> DensityOperator:
    """The line of liftings (1 - b u) P + (-1)^n b u P*."""
    return sdiff_family_lift(delta, SdiffFamilyParams(n=n, lam=lam, b=b), vol)


def distinguished_b(lam) -> Fraction:
    lam = as_rational(lam)
    if lam == Fraction(1, 2):
        raise SingularWeightError("lambda=1/2 is excluded for the distinguished lifting")
    return 1 / (1 - 2 * lam)


def distinguished_lift(delta: DensityOperator, n: int, lam, vol: VolumeStructure) -> DensityOperator:
    """
    (w + lam - 1)/(2 lam - 1) P + (-1)^n (lam - w)/(2 lam - 1) P*,
    the member of the family with adjoint equal to (-1)^n times itself.
    """
    lam = as_rational(lam)
    distinguished_b(lam)
    _check(delta, vol)
    require_w_free(delta)
    require_order(delta, n)
    dim = delta.dim
    sign = -1 if n % 2 else 1
    scale = 1 / (2 * lam - 1)
    lifted = volume_lift(delta, lam, vol)
    first = LambdaPoly([lam - 1, 1]) * scale
    second = LambdaPoly([lam, -1]) * (sign * scale)
    return (
        weight_polynomial(dim, first).compose(lifted)
        + weight_polynomial(dim, second).compose(adjoint(lifted))
    )


def truncate_mod_vertical(a: DensityOperator, k: int) -> DensityOperator:
    """Drop every term with |alpha| <= k, leaving a representative of a mod V^(k)."""
    if k < -1:
        raise OrderError(f"truncation level must be >= -1, got {k}")
    return DensityOperator(a.dim, {key: c for key, c in a.items() if sum(key[0]) > k})
