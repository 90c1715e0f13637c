"""
Operations on weight-0 operators acting on the algebra of densities.
"""
from fractions import Fraction

from app.exceptions import DimensionError, OrderError
from app.models.operator import DensityOperator, HatVectorField, QuasiDensity, VectorField
from app.models.polynomial import NEG_INFINITY, LambdaPoly, MultiPoly
from app.models.rational import as_rational


def _same_dim(*dims: int):
    if len(set(dims)) > 1:
        raise DimensionError(f"dimension mismatch: {', '.join(map(str, dims))}")


def compose(a: DensityOperator, b: DensityOperator) -> DensityOperator:
    """Normal-ordered product a o b."""
    _same_dim(a.dim, b.dim)
    return a.compose(b)


def weight_polynomial(dim: int, poly: LambdaPoly) -> DensityOperator:
    return DensityOperator.weight_polynomial(dim, poly)


def adjoint(a: DensityOperator) -> DensityOperator:
    """
    Canonical adjoint: x* = x, d_i* = -d_i, w* = 1 - w, extended as an
    anti-homomorphism. The term f d^a w^k goes to (1 - w)^k (-d)^a f.
    """
    dim = a.dim
    result = DensityOperator.zero(dim)
    reflected = LambdaPoly.linear(-1, 1)
    for term in a.terms:
        sign = -1 if sum(term.alpha) % 2 else 1
        derivative = DensityOperator.monomial(MultiPoly.constant(dim, sign), term.alpha)
        vertical = weight_polynomial(dim, reflected ** term.wpow)
        result = result + vertical.compose(derivative).compose(DensityOperator.multiplication(term.coeff))
    return result


def is_self_adjoint(a: DensityOperator) -> bool:
    return adjoint(a) == a


def is_anti_self_adjoint(a: DensityOperator) -> bool:
    return adjoint(a) == -a


def self_adjoint_part(a: DensityOperator) -> DensityOperator:
    return (a + adjoint(a)).scale(Fraction(1, 2))


def anti_self_adjoint_part(a: DensityOperator) -> DensityOperator:
    return (a - adjoint(a)).scale(Fraction(1, 2))


def divergence_hat(x: HatVectorField) -> DensityOperator:
    """
    Canonical divergence d_i X^i + (w - 1) X^0 of a weight-0 field.

    X^0 has weight 0, so (w - 1) X^0 = -X^0 and the result is the
    multiplication operator d_i X^i - X^0, which equals -(X + X*).
    """
    return DensityOperator.multiplication(x.base.divergence() - x.vertical)


def lie_lift(x: VectorField) -> DensityOperator:
    """L_X = X^i d_i + w d_i X^i."""
    return x.to_operator() + DensityOperator.weight(x.dim).left_multiply(x.divergence())


def lie_lift_hat(x: VectorField) -> HatVectorField:
    return HatVectorField(x, x.divergence())


def lie_derivative(x: VectorField, lam) -> DensityOperator:
    """Lie derivative on densities of weight lam: X^i d_i + lam d_i X^i."""
    return restrict(lie_lift(x), lam)


def ad_action(k: VectorField, a: DensityOperator, lam=None) -> DensityOperator:
    """
    ad_K(a) = L_K o a - a o L_K.

    With ``lam`` given the commutator is taken with the Lie derivative on
    weight-lam densities, the action on w-free operators acting on F_lam.
    """
    _same_dim(k.dim, a.dim)
    lie = lie_lift(k) if lam is None else lie_derivative(k, lam)
    return lie.compose(a) - a.compose(lie)


def restrict(a: DensityOperator, lam) -> DensityOperator:
    """Substitute w = lam."""
    lam = as_rational(lam)
    dim = a.dim
    terms: dict = {}
    for (alpha, wpow), coeff in a.items():
        value = coeff.scale(lam ** wpow)
        if value.is_zero():
            continue
        key = (alpha, 0)
        terms[key] = terms[key] + value if key in terms else value
    return DensityOperator(dim, terms)


def apply(a: DensityOperator, s: QuasiDensity) -> QuasiDensity:
    """Apply a to each weight component, w acting by the weight."""
    _same_dim(a.dim, s.dim)
    parts = []
    for poly, weight in s.parts:
        total = MultiPoly.zero(a.dim)
        for (alpha, wpow), coeff in a.items():
            derived = poly.partial_multi(alpha)
            if derived.is_zero():
                continue
            total = total + (coeff * derived).scale(weight ** wpow)
        parts.append((total, weight))
    return QuasiDensity(a.dim, parts)


def apply_to_unit(a: DensityOperator) -> MultiPoly:
    """The function a(1), 1 being the constant density of weight 0."""
    return apply(a, QuasiDensity.unit(a.dim)).part(0)


def vertical_order(a: DensityOperator) -> float | int:
    """Largest |alpha|; a lies in V^(k) iff this is <= k. The zero operator gives -inf."""
    return a.spatial_order


def long_bracket(a: DensityOperator, f: QuasiDensity, g: QuasiDensity) -> QuasiDensity:
    """{f, g}_a = a(fg) - f a(g) - g a(f); requires a(1) = 0."""
    _same_dim(a.dim, f.dim, g.dim)
    unit_image = apply_to_unit(a)
    if not unit_image.is_zero():
        raise OrderError(f"normalization a(1) = 0 violated: a(1) = {unit_image}")
    return apply(a, f * g) - f * apply(a, g) - g * apply(a, f)


def first_order_parts(op: DensityOperator) -> tuple[VectorField, MultiPoly, MultiPoly]:
    """
    Split a first-order operator X^i d_i + X^0 w + F into (X, X^0, F).
    """
    dim = op.dim
    if op.order > 1:
        raise OrderError(f"expected an operator of order <= 1, got order {op.order}")
    zero = (0,) * dim
    components = []
    for index in range(1, dim + 1):
        alpha = tuple(1 if i == index else 0 for i in range(1, dim + 1))
        components.append(op.coefficient(alpha, 0))
    return VectorField(dim, tuple(components)), op.coefficient(zero, 1), op.coefficient(zero, 0)


def decompose_first_order(op: DensityOperator) -> tuple[VectorField, MultiPoly, MultiPoly]:
    """Write a first-order operator as L_X + w S1 + S2 and return (X, S1, S2)."""
    x, vertical, free = first_order_parts(op)
    return x, vertical - x.divergence(), free


def assemble_first_order(x: VectorField, s1: MultiPoly, s2: MultiPoly) -> DensityOperator:
    weight = DensityOperator.weight(x.dim)
    return lie_lift(x) + weight.left_multiply(s1) + DensityOperator.multiplication(s2)


def require_w_free(op: DensityOperator, what: str = "operator"):
    if not op.is_w_free():
        raise OrderError(f"{what} must not contain the weight operator w")


def require_order(op: DensityOperator, bound: int, what: str = "operator"):
    order = op.spatial_order
    if order != NEG_INFINITY and order > bound:
        raise OrderError(f"{what} has order {order}, expected at most {bound}")
