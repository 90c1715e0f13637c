"""
Projectively equivariant symbol calculus and the liftings built on it.
"""
from dataclasses import dataclass
from fractions import Fraction

from app.exceptions import DimensionError, ExcludedParameterError, OrderError
from app.models.operator import DensityOperator
from app.models.polynomial import NEG_INFINITY, LambdaPoly, MultiPoly
from app.models.rational import as_rational
from app.models.symbol import DLOCoefficientTable, SymbolPoly, TriangularFamilyParams
from app.services.densities import require_order, require_w_free, weight_polynomial
from app.services.dlo_solver import a_d, b_d
from app.services.pencils import double_divergence, second_order_parts
from app.services.symbols import naive_symbol, principal_symbol, symbol_map_term


def _check_table(dim: int, order, table: DLOCoefficientTable):
    if dim != table.dim:
        raise DimensionError(f"table is for dimension {table.dim}, got {dim}")
    if order != NEG_INFINITY and order > table.max_order:
        raise OrderError(f"order {order} exceeds the table's maximal order {table.max_order}")


def full_symbol(delta: DensityOperator, lam, table: DLOCoefficientTable) -> SymbolPoly:
    """sigma_lam(delta) = sum_k sum_r c_r^(k)(lam) (k - r)!/k! D^r p_k."""
    lam = as_rational(lam)
    require_w_free(delta)
    _check_table(delta.dim, delta.spatial_order, table)
    naive = naive_symbol(delta)
    out = SymbolPoly.zero(delta.dim)
    if naive.is_zero():
        return out
    for k in range(int(naive.degree) + 1):
        p_k = naive.homogeneous_part(k)
        if p_k.is_zero():
            continue
        for r in range(k + 1):
            coeff = table.c_at(k, r).evaluate(lam)
            if coeff:
                out = out + symbol_map_term(p_k, k, r).scale(coeff)
    return out


def _quantized_pieces(sym: SymbolPoly, table: DLOCoefficientTable):
    """Yield (c~_s^(m), (m - s)!/m! D^s T_m) for every non-zero piece."""
    _check_table(sym.dim, sym.degree, table)
    if sym.is_zero():
        return
    for m in range(int(sym.degree) + 1):
        t_m = sym.homogeneous_part(m)
        if t_m.is_zero():
            continue
        for s in range(m + 1):
            term = symbol_map_term(t_m, m, s)
            if not term.is_zero():
                yield table.ctilde_at(m, s), term


def quantize(sym: SymbolPoly, mu, table: DLOCoefficientTable) -> DensityOperator:
    """Q_mu, the inverse of sigma_mu: sum c~_s^(m)(mu) (m - s)!/m! D^s T_m with xi -> d."""
    mu = as_rational(mu)
    out = DensityOperator.zero(sym.dim)
    for coeff, term in _quantized_pieces(sym, table):
        value = coeff.evaluate(mu)
        if value:
            out = out + term.to_operator().scale(value)
    return out


def quantize_hat(sym: SymbolPoly, table: DLOCoefficientTable) -> DensityOperator:
    """Q_w: the quantization with every c~_s^(m)(mu) replaced by c~_s^(m)(w)."""
    out = DensityOperator.zero(sym.dim)
    for coeff, term in _quantized_pieces(sym, table):
        out = out + weight_polynomial(sym.dim, coeff).compose(term.to_operator())
    return out


def dlo_pencil(delta: DensityOperator, lam, table: DLOCoefficientTable) -> DensityOperator:
    """Q_w o sigma_lam."""
    return quantize_hat(full_symbol(delta, lam, table), table)


def graded_map(delta: DensityOperator, k: int, table: DLOCoefficientTable) -> DensityOperator:
    """Q_w applied to the degree-k principal symbol of delta."""
    return quantize_hat(principal_symbol(delta, k), table)


def graded_decompose(delta: DensityOperator, lam, table: DLOCoefficientTable, n: int | None = None) -> list[DensityOperator]:
    """
    Split delta into [delta_n, ..., delta_0] where delta_k = Q_lam(sigma_pr^(k)(remainder)).

    Each delta_k has full symbol equal to its principal symbol at weight lam.
    """
    lam = as_rational(lam)
    require_w_free(delta)
    order = delta.spatial_order
    if n is None:
        n = 0 if order == NEG_INFINITY else int(order)
    require_order(delta, n)
    remainder = delta
    components = []
    for k in range(n, -1, -1):
        component = quantize(principal_symbol(remainder, k), lam, table)
        components.append(component)
        remainder = remainder - component
    return components


def triangular_family_lift(delta: DensityOperator, params: TriangularFamilyParams, table: DLOCoefficientTable) -> DensityOperator:
    """sum_i P_i(w)/P_i(lam) * Pi_DLO(delta_{n-i})."""
    lam, n = params.lam, params.n
    require_w_free(delta)
    require_order(delta, n)
    polys = [params.row_polynomial(i) for i in range(n + 1)]
    for i, poly in enumerate(polys):
        if poly.evaluate(lam) == 0:
            raise ExcludedParameterError(f"row {i}: P_{i}(lambda) vanishes at lambda={lam}")
    components = graded_decompose(delta, lam, table, n)
    out = DensityOperator.zero(delta.dim)
    for i, poly in enumerate(polys):
        component = components[i]
        if component.is_zero():
            continue
        normalized = poly * (1 / poly.evaluate(lam))
        out = out + weight_polynomial(delta.dim, normalized).compose(dlo_pencil(component, lam, table))
    return out


@dataclass(frozen=True)
class SelfAdjointnessReport:
    passed: bool
    expansions: tuple[LambdaPoly, ...]
    failing_rows: tuple[int, ...]


def self_adjointness_filter(params: TriangularFamilyParams) -> SelfAdjointnessReport:
    """
    Check P_i(1 - w) = (-1)^i P_i(w) for every row. The certificate is each P_i
    expanded in powers of (w - 1/2): only even powers for even i, odd for odd i.
    """
    expansions = []
    failing = []
    for i in range(params.n + 1):
        poly = params.row_polynomial(i)
        expansion = poly.shift(Fraction(1, 2))
        expansions.append(expansion)
        if any(coeff and power % 2 != i % 2 for power, coeff in enumerate(expansion.coeffs)):
            failing.append(i)
    return SelfAdjointnessReport(passed=not failing, expansions=tuple(expansions), failing_rows=tuple(failing))


def second_order_selfadjoint_rows(lam, p, q) -> TriangularFamilyParams:
    """Rows 1, 2w - 1 and p + q w(w - 1)."""
    lam, p, q = as_rational(lam), as_rational(p), as_rational(q)
    if 2 * lam - 1 == 0:
        raise ExcludedParameterError("lambda=1/2 makes 2*lambda - 1 vanish")
    if p == 0 and q == 0:
        raise ExcludedParameterError("[p:q] = [0:0] is not a point of the projective line")
    if p + q * lam * (lam - 1) == 0:
        raise ExcludedParameterError(f"p + q*lambda*(lambda - 1) vanishes for [p:q]=[{p}:{q}], lambda={lam}")
    return TriangularFamilyParams(n=2, lam=lam, rows=((1,), (-1, 2), (p, -q, q)))


def second_order_selfadjoint_family(delta: DensityOperator, lam, p, q, table: DLOCoefficientTable) -> DensityOperator:
    """The projective line of self-adjoint liftings of a second-order operator."""
    params = second_order_selfadjoint_rows(lam, p, q)
    return triangular_family_lift(delta, params, table)


def schwarzian_scalar(delta: DensityOperator, lam, d: int) -> MultiPoly:
    """S = F - lam d_i A^i + (lam a_d(lam) - b_d(lam)) d_i d_k S^{ki}."""
    lam = as_rational(lam)
    if delta.dim != d:
        raise DimensionError(f"operator of dimension {delta.dim}, expected {d}")
    S, A, F = second_order_parts(delta)
    div_a = sum((a.partial(i + 1) for i, a in enumerate(A)), MultiPoly.zero(d))
    coefficient = lam * a_d(d).evaluate(lam) - b_d(d).evaluate(lam)
    return F - div_a.scale(lam) + double_divergence(S).scale(coefficient)
