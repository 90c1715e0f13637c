"""
Diffeomorphism-equivariant pencil liftings: the first-order family, the
canonical self-adjoint second-order operator of a principal symbol, its
connection variants and the isomorphisms between second-order modules.
"""
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement

from app.exceptions import (
    DimensionError,
    ExcludedParameterError,
    InconsistentSystemError,
    OrderError,
    SingularWeightError,
)
from app.models.geometry import Connection, PrincipalSymbolHat
from app.models.operator import DensityOperator, VectorField
from app.models.polynomial import LambdaPoly, MultiPoly
from app.models.rational import as_rational
from app.services.densities import (
    adjoint,
    apply_to_unit,
    first_order_parts,
    lie_lift,
    require_order,
    require_w_free,
    restrict,
    weight_polynomial,
)
from app.services.linalg import Inconsistent, solve_linear_exact


SINGULAR_SECOND_ORDER_WEIGHTS = (Fraction(0), Fraction(1, 2), Fraction(1))

# w(w - 1) and 2w - 1 as weight polynomials
W_W_MINUS_1 = LambdaPoly([0, -1, 1])
TWO_W_MINUS_1 = LambdaPoly([-1, 2])


def _unit(dim: int, index: int) -> tuple[int, ...]:
    return tuple(1 if i == index else 0 for i in range(1, dim + 1))


def _pair(dim: int, i: int, k: int) -> tuple[int, ...]:
    return tuple((i == j) + (k == j) for j in range(1, dim + 1))


def _check_second_order_weight(lam: Fraction, name: str = "lambda"):
    if lam in SINGULAR_SECOND_ORDER_WEIGHTS:
        raise SingularWeightError(f"{name}={lam} lies in the excluded set {{0, 1/2, 1}}")


# ============================================================================
# Second-order data
# ============================================================================

def second_order_parts(delta: DensityOperator) -> tuple[list[list[MultiPoly]], list[MultiPoly], MultiPoly]:
    """
    Read a w-free operator A^{ik} d_i d_k + A^i d_i + A as (A^{ik}, A^i, A).

    A^{ik} is the symmetric tensor: a mixed term c d_i d_k contributes c/2 to
    both A^{ik} and A^{ki}.
    """
    require_w_free(delta)
    require_order(delta, 2)
    dim = delta.dim
    zero = MultiPoly.zero(dim)
    S = [[zero for _ in range(dim)] for _ in range(dim)]
    A = [zero for _ in range(dim)]
    F = zero
    for (alpha, _), coeff in delta.items():
        total = sum(alpha)
        indices = [i for i, a in enumerate(alpha) for _ in range(a)]
        if total == 2:
            i, k = indices
            if i == k:
                S[i][i] = S[i][i] + coeff
            else:
                half = coeff.scale(Fraction(1, 2))
                S[i][k] = S[i][k] + half
                S[k][i] = S[k][i] + half
        elif total == 1:
            A[indices[0]] = A[indices[0]] + coeff
        else:
            F = F + coeff
    return S, A, F


def tensor_divergence(S) -> list[MultiPoly]:
    """(d_k S^{ki})_i."""
    dim = len(S)
    return [
        sum((S[k][i].partial(k + 1) for k in range(dim)), MultiPoly.zero(dim))
        for i in range(dim)
    ]


def double_divergence(S) -> MultiPoly:
    """d_i d_k S^{ik}."""
    dim = len(S)
    return sum(
        (S[i][k].partial(i + 1).partial(k + 1) for i in range(dim) for k in range(dim)),
        MultiPoly.zero(dim),
    )


def _quadratic_operator(S) -> DensityOperator:
    dim = len(S)
    terms: dict = {}
    for i in range(dim):
        for k in range(dim):
            key = (_pair(dim, i + 1, k + 1), 0)
            terms[key] = terms[key] + S[i][k] if key in terms else S[i][k]
    return DensityOperator(dim, terms)


def _first_order_operator(components, wpow: int = 0) -> DensityOperator:
    dim = len(components)
    return DensityOperator(dim, {
        (_unit(dim, i + 1), wpow): comp for i, comp in enumerate(components)
    })


# ============================================================================
# First-order pencils
# ============================================================================

def first_order_pencil(L: DensityOperator, lam, p, q) -> DensityOperator:
    """
    The [p:q] member L_X + (p w + q)/(p lam + q) S of the first-order family.

    L = X^i d_i + F on F_lam is split as restrict(L_X, lam) + S with
    S = F - lam d_i X^i.
    """
    lam, p, q = as_rational(lam), as_rational(p), as_rational(q)
    require_w_free(L)
    require_order(L, 1)
    if p == 0 and q == 0:
        raise ExcludedParameterError("[p:q] = [0:0] is not a point of the projective line")
    denominator = p * lam + q
    if denominator == 0:
        raise ExcludedParameterError(f"p*lambda + q vanishes for [p:q]=[{p}:{q}], lambda={lam}")
    x, _, free = first_order_parts(L)
    s = free - x.divergence().scale(lam)
    factor = LambdaPoly([q / denominator, p / denominator])
    return lie_lift(x) + weight_polynomial(L.dim, factor).left_multiply(s)


def first_order_affine_pencil(L: DensityOperator, lam, c) -> DensityOperator:
    """L_X + (1 + c (w - lam)) S, the affine chart of the first-order family."""
    lam, c = as_rational(lam), as_rational(c)
    require_w_free(L)
    require_order(L, 1)
    x, _, free = first_order_parts(L)
    s = free - x.divergence().scale(lam)
    factor = LambdaPoly([1 - c * lam, c])
    return lie_lift(x) + weight_polynomial(L.dim, factor).left_multiply(s)


# ============================================================================
# Canonical second-order operator
# ============================================================================

def operator_from_symbol(sym: PrincipalSymbolHat) -> DensityOperator:
    """
    D_S = S^{ik} d_i d_k + d_k S^{ki} d_i + (2w - 1) B^i d_i + w d_k B^k + w(w - 1) C.
    """
    dim = sym.dim
    div_b = sum((b.partial(i + 1) for i, b in enumerate(sym.B)), MultiPoly.zero(dim))
    result = _quadratic_operator(sym.S) + _first_order_operator(tensor_divergence(sym.S))
    result = result + _first_order_operator([b.scale(2) for b in sym.B], wpow=1)
    result = result - _first_order_operator(sym.B)
    result = result + DensityOperator.weight(dim).left_multiply(div_b)
    result = result + weight_polynomial(dim, W_W_MINUS_1).left_multiply(sym.C)
    return result


def principal_symbol_hat(op: DensityOperator) -> PrincipalSymbolHat:
    """Read (S, B, C) from the top part S d d + 2 B d w + C w^2 of a second-order operator."""
    if op.order > 2:
        raise OrderError(f"expected total order <= 2, got {op.order}")
    dim = op.dim
    zero = MultiPoly.zero(dim)
    S = [[zero for _ in range(dim)] for _ in range(dim)]
    for (alpha, wpow), coeff in op.items():
        if sum(alpha) == 2 and wpow == 0:
            i, k = [j for j, a in enumerate(alpha) for _ in range(a)]
            if i == k:
                S[i][i] = coeff
            else:
                S[i][k] = S[k][i] = coeff.scale(Fraction(1, 2))
    B = [op.coefficient(_unit(dim, i), 1).scale(Fraction(1, 2)) for i in range(1, dim + 1)]
    C = op.coefficient((0,) * dim, 2)
    return PrincipalSymbolHat.build(S, B, C)


def horizontal_lift(S, conn: Connection) -> PrincipalSymbolHat:
    """S_nabla = (S^{ik}, Gamma^i, Gamma^i Gamma_i) with Gamma^i = S^{ik} Gamma_k."""
    dim = conn.dim
    if len(S) != dim:
        raise DimensionError(f"symbol of dimension {len(S)} with a connection of dimension {dim}")
    raised = [
        sum((S[i][k] * conn.gamma[k] for k in range(dim)), MultiPoly.zero(dim))
        for i in range(dim)
    ]
    contracted = sum((raised[i] * conn.gamma[i] for i in range(dim)), MultiPoly.zero(dim))
    return PrincipalSymbolHat.build(S, raised, contracted)


def operator_from_symbol_connection(S, conn: Connection) -> DensityOperator:
    """D_{S, nabla}: the canonical operator of the horizontal lift of S."""
    return operator_from_symbol(horizontal_lift(S, conn))


def connection_difference(sym: PrincipalSymbolHat, conn: Connection) -> DensityOperator:
    """
    (2w - 1) L_Y + w(w - 1)(C - 2 Gamma_i B^i + Gamma_i Gamma^i - 2 div_nabla Y)

    with Y^i = B^i - S^{ik} Gamma_k and div_nabla Y = d_i Y^i - Gamma_i Y^i.
    This is D_S - D_{S_nabla}.
    """
    dim = sym.dim
    if conn.dim != dim:
        raise DimensionError(f"symbol of dimension {dim} with a connection of dimension {conn.dim}")
    lifted = horizontal_lift(sym.S, conn)
    y = VectorField(dim, tuple(b - g for b, g in zip(sym.B, lifted.B)))
    gamma_b = sum((g * b for g, b in zip(conn.gamma, sym.B)), MultiPoly.zero(dim))
    gamma_y = sum((g * c for g, c in zip(conn.gamma, y.components)), MultiPoly.zero(dim))
    div_nabla = y.divergence() - gamma_y
    vertical = sym.C - gamma_b.scale(2) + lifted.C - div_nabla.scale(2)
    return (
        weight_polynomial(dim, TWO_W_MINUS_1).compose(lie_lift(y))
        + weight_polynomial(dim, W_W_MINUS_1).left_multiply(vertical)
    )


def canonical_symbol(delta: DensityOperator, lam) -> PrincipalSymbolHat:
    """
    The symbol whose canonical operator restricts to delta at w = lam:
    B^i = (A^i - d_k A^{ki})/(2 lam - 1), C = (A - lam d_k B^k)/(lam (lam - 1)).
    """
    lam = as_rational(lam)
    _check_second_order_weight(lam)
    S, A, F = second_order_parts(delta)
    div_s = tensor_divergence(S)
    B = [(a - ds).scale(1 / (2 * lam - 1)) for a, ds in zip(A, div_s)]
    div_b = sum((b.partial(i + 1) for i, b in enumerate(B)), MultiPoly.zero(delta.dim))
    C = (F - div_b.scale(lam)).scale(1 / (lam * (lam - 1)))
    return PrincipalSymbolHat.build(S, B, C)


def canonical_second_order_lift(delta: DensityOperator, lam) -> DensityOperator:
    """The unique self-adjoint, normalized pencil through delta at weight lam."""
    return operator_from_symbol(canonical_symbol(delta, lam))


def duval_ovsienko_iso(delta: DensityOperator, lam, mu) -> DensityOperator:
    """Transport a second-order operator on F_lam to F_mu along the canonical pencil."""
    mu = as_rational(mu)
    _check_second_order_weight(mu, "mu")
    return restrict(canonical_second_order_lift(delta, lam), mu)


def duval_ovsienko_closed_form(delta: DensityOperator, lam, mu) -> DensityOperator:
    """
    The same map through its explicit coefficients:

        B^{ij} = A^{ij}
        B^i = (2mu - 1)/(2lam - 1) A^i + 2(lam - mu)/(2lam - 1) d_j A^{ji}
        B = mu(mu - 1)/(lam(lam - 1)) A
            + mu(lam - mu)/((2lam - 1)(lam - 1)) (d_j A^j - d_i d_j A^{ij})
    """
    lam, mu = as_rational(lam), as_rational(mu)
    _check_second_order_weight(lam)
    _check_second_order_weight(mu, "mu")
    S, A, F = second_order_parts(delta)
    dim = delta.dim
    div_s = tensor_divergence(S)
    first = [
        a.scale((2 * mu - 1) / (2 * lam - 1)) + ds.scale(2 * (lam - mu) / (2 * lam - 1))
        for a, ds in zip(A, div_s)
    ]
    div_a = sum((a.partial(i + 1) for i, a in enumerate(A)), MultiPoly.zero(dim))
    free = (
        F.scale(mu * (mu - 1) / (lam * (lam - 1)))
        + (div_a - double_divergence(S)).scale(mu * (lam - mu) / ((2 * lam - 1) * (lam - 1)))
    )
    return _quadratic_operator(S) + _first_order_operator(first) + DensityOperator.multiplication(free)


def symmetrized_lift(x: VectorField, y: VectorField, lam) -> DensityOperator:
    """
    1/2 (L_X L_Y + L_Y L_X) + 1/2 (2w - 1)/(2lam - 1) (L_X L_Y - L_Y L_X),
    the canonical pencil through L_X o L_Y on F_lam.
    """
    lam = as_rational(lam)
    if lam == Fraction(1, 2):
        raise SingularWeightError("lambda=1/2 is excluded")
    lx, ly = lie_lift(x), lie_lift(y)
    xy, yx = lx.compose(ly), ly.compose(lx)
    factor = LambdaPoly([-1, 2]) * Fraction(1, 2 * (2 * lam - 1))
    return (xy + yx).scale(Fraction(1, 2)) + weight_polynomial(x.dim, factor).compose(xy - yx)


# ============================================================================
# Brute-force uniqueness check
# ============================================================================

@dataclass(frozen=True)
class UniquenessReport:
    operator: DensityOperator
    kernel_rank: int


def _monomials(dim: int, degree: int) -> list[MultiPoly]:
    out = []
    for total in range(degree + 1):
        for combo in combinations_with_replacement(range(dim), total):
            exp = [0] * dim
            for index in combo:
                exp[index] += 1
            out.append(MultiPoly.monomial(exp))
    return out


def _flatten(op: DensityOperator, unit_image: MultiPoly) -> dict:
    flat = {}
    for (alpha, wpow), coeff in op.items():
        for exp, value in coeff.items():
            flat[("op", alpha, wpow, exp)] = value
    for exp, value in unit_image.items():
        flat[("unit", exp)] = value
    return flat


def self_adjoint_normalized_solutions(sym: PrincipalSymbolHat, degree: int) -> UniquenessReport:
    """
    Solve for every self-adjoint operator with D(1) = 0 whose principal symbol is
    ``sym``, the lower-order coefficients D^i, E, F of D^i d_i + E w + F being
    polynomials of degree <= ``degree``.
    """
    dim = sym.dim
    zero = (0,) * dim
    top = _quadratic_operator(sym.S)
    top = top + _first_order_operator([b.scale(2) for b in sym.B], wpow=1)
    top = top + DensityOperator(dim, {(zero, 2): sym.C})

    basis = []
    for mono in _monomials(dim, degree):
        for i in range(1, dim + 1):
            basis.append(DensityOperator.monomial(mono, _unit(dim, i), 0))
        basis.append(DensityOperator.monomial(mono, zero, 1))
        basis.append(DensityOperator.monomial(mono, zero, 0))

    def constraint(op: DensityOperator) -> dict:
        return _flatten(adjoint(op) - op, apply_to_unit(op))

    columns = [constraint(b) for b in basis]
    target = constraint(top)
    keys = sorted(set().union(target, *columns), key=repr)
    A = [[col.get(key, Fraction(0)) for col in columns] for key in keys]
    b = [-target.get(key, Fraction(0)) for key in keys]
    result = solve_linear_exact(A, b, ncols=len(basis))
    if isinstance(result, Inconsistent):
        raise InconsistentSystemError("no self-adjoint normalized operator has this principal symbol")
    operator = top
    for coeff, element in zip(result.solution, basis):
        if coeff:
            operator = operator + element.scale(coeff)
    return UniquenessReport(operator=operator, kernel_rank=result.kernel_rank)
