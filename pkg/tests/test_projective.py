"""
Tests for the projectively equivariant symbol calculus and its liftings.
"""
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.exceptions import DimensionError, ExcludedParameterError, OrderError
from app.models.operator import DensityOperator, VectorField
from app.models.symbol import SymbolPoly, TriangularFamilyParams
from app.services import densities, pencils, projective
from app.services.parser import parse_operator, parse_polynomial, parse_symbol
from app.services.symbols import principal_symbol, proj_generators, symbol_lie
from tests.strategies import operators, rationals, weights


SINGULAR = pencils.SINGULAR_SECOND_ORDER_WEIGHTS


def op(src: str, d: int = 1) -> DensityOperator:
    return parse_operator(src, d)


def uniform_rows(n: int) -> TriangularFamilyParams:
    return TriangularFamilyParams(n=n, lam=0, rows=tuple((1,) for _ in range(n + 1)))


class TestGenerators:
    """Tests for proj(R^d) and its action on symbols."""

    def test_dimension_one(self):
        """Test the three generators on the line."""
        fields = [str(k.to_operator()) for k in proj_generators(1)]
        assert fields == ["d1", "x1*d1", "x1^2*d1"]

    def test_count(self):
        """Test d + d^2 + d generators of degree <= 2."""
        fields = proj_generators(2)
        assert len(fields) == 8
        assert all(k.degree <= 2 for k in fields)

    def test_invalid_dimension(self):
        """Test that d = 0 is refused."""
        with pytest.raises(DimensionError):
            proj_generators(0)

    def test_symbol_lie(self):
        """Test translations, the Euler field and constants."""
        one = parse_polynomial("1", 1)
        assert symbol_lie(VectorField(1, (one,)), parse_symbol("x1*xi1", 1)) == parse_symbol("xi1", 1)
        euler = VectorField(1, (parse_polynomial("x1", 1),))
        assert symbol_lie(euler, parse_symbol("xi1", 1)) == parse_symbol("-xi1", 1)
        assert symbol_lie(euler, parse_symbol("5", 1)).is_zero()


class TestSymbolMap:
    """Tests for the full symbol and its inverse."""

    def test_second_order_symbol(self, tables):
        """Test the full symbol of x1^2 d1^2 + x1^3 d1 at weight 1."""
        table = tables.get(1, 2)
        result = projective.full_symbol(op("x1^2*d1^2 + x1^3*d1"), 1, table)
        assert result == parse_symbol("x1^2*xi1^2 + x1^3*xi1 - 3*x1*xi1 - 3*x1^2 + 2", 1)

    def test_constant_coefficients(self, tables):
        """Test that constant-coefficient operators keep their naive symbol."""
        table = tables.get(2, 2)
        result = projective.full_symbol(op("d1*d2 + 3*d2 - 1", 2), Fraction(2, 3), table)
        assert result == parse_symbol("xi1*xi2 + 3*xi2 - 1", 2)

    def test_quantize_second_order(self, tables):
        """Test Q_1 of x1^2 xi1^2 in dimension 1."""
        table = tables.get(1, 2)
        assert projective.quantize(parse_symbol("x1^2*xi1^2", 1), 1, table) == op("x1^2*d1^2 + 3*x1*d1 + 1")

    def test_order_exceeds_table(self, tables):
        """Test that an operator above the table order is refused."""
        with pytest.raises(OrderError):
            projective.full_symbol(op("d1^3"), 1, tables.get(1, 2))

    def test_dimension_of_table(self, tables):
        """Test that a table of another dimension is refused."""
        with pytest.raises(DimensionError):
            projective.full_symbol(op("d1", 2), 1, tables.get(1, 2))

    @given(operators(dim=1, order=4, degree=3, max_terms=5), rationals())
    @settings(max_examples=25, deadline=None)
    def test_inverse_dimension_one(self, tables, delta, lam):
        """Test Q_lam o sigma_lam = id and sigma_lam o Q_lam = id up to order 4."""
        table = tables.get(1, 4)
        sym = projective.full_symbol(delta, lam, table)
        assert projective.quantize(sym, lam, table) == delta
        naive = SymbolPoly.naive(delta)
        assert projective.full_symbol(projective.quantize(naive, lam, table), lam, table) == naive

    @given(operators(dim=2, order=3, max_terms=5), rationals())
    @settings(max_examples=15, deadline=None)
    def test_inverse_dimension_two(self, tables, delta, lam):
        """Test the inverse property in dimension 2."""
        table = tables.get(2, 3)
        assert projective.quantize(projective.full_symbol(delta, lam, table), lam, table) == delta

    @given(operators(dim=1, order=3, degree=3, max_terms=4), weights())
    @settings(max_examples=15, deadline=None)
    def test_equivariant(self, tables, delta, lam):
        """Test sigma(ad_K delta) = L_K sigma(delta) for every generator."""
        table = tables.get(1, 3)
        sym = projective.full_symbol(delta, lam, table)
        for k in proj_generators(1):
            moved = densities.ad_action(k, delta, lam)
            assert projective.full_symbol(moved, lam, table) == symbol_lie(k, sym)

    @pytest.mark.parametrize("d", [2, 3])
    @given(data=st.data())
    @settings(max_examples=10, deadline=None)
    def test_equivariant_in_higher_dimensions(self, tables, d, data):
        """Test sigma(ad_K delta) = L_K sigma(delta) for every generator of proj(R^d)."""
        delta = data.draw(operators(dim=d, order=2, degree=2, max_terms=3))
        lam = data.draw(weights())
        table = tables.get(d, 2)
        sym = projective.full_symbol(delta, lam, table)
        for k in proj_generators(d):
            moved = densities.ad_action(k, delta, lam)
            assert projective.full_symbol(moved, lam, table) == symbol_lie(k, sym)


class TestDLOPencil:
    """Tests for the pencil Q_w o sigma_lam."""

    def test_first_order(self, tables):
        """Test that on first-order operators it is the [0:1] member."""
        delta = op("x1^2*d1 + x1 + 4")
        lam = Fraction(2, 5)
        result = projective.dlo_pencil(delta, lam, tables.get(1, 2))
        assert result == op("x1^2*d1 + 2*x1*w + x1 + 4 - 4/5*x1")
        assert result == pencils.first_order_pencil(delta, lam, 0, 1)

    def test_function_is_constant_pencil(self, tables):
        """Test that a multiplication operator lifts to itself."""
        delta = op("x1*x2 + 1", 2)
        assert projective.dlo_pencil(delta, 3, tables.get(2, 2)) == delta

    @given(operators(dim=2, order=2, max_terms=5), weights(), rationals())
    @settings(max_examples=15, deadline=None)
    def test_restrictions(self, tables, delta, lam, mu):
        """Test restrict at mu gives Q_mu(sigma_lam(delta))."""
        table = tables.get(2, 2)
        pencil = projective.dlo_pencil(delta, lam, table)
        expected = projective.quantize(projective.full_symbol(delta, lam, table), mu, table)
        assert densities.restrict(pencil, mu) == expected
        assert densities.restrict(pencil, lam) == delta

    @given(operators(dim=1, order=3, degree=3, max_terms=4), weights())
    @settings(max_examples=15, deadline=None)
    def test_equivariant_and_strictly_regular(self, tables, delta, lam):
        """Test ad_K of the pencil and that the total order does not grow."""
        table = tables.get(1, 3)
        pencil = projective.dlo_pencil(delta, lam, table)
        if not delta.is_zero():
            assert pencil.order <= delta.order
        for k in proj_generators(1):
            moved = densities.ad_action(k, delta, lam)
            assert densities.ad_action(k, pencil) == projective.dlo_pencil(moved, lam, table)

    @pytest.mark.parametrize("d", [2, 3])
    @given(data=st.data())
    @settings(max_examples=10, deadline=None)
    def test_equivariant_in_higher_dimensions(self, tables, d, data):
        """Test ad_K of the pencil for every generator of proj(R^d)."""
        delta = data.draw(operators(dim=d, order=2, degree=2, max_terms=3))
        lam = data.draw(weights())
        table = tables.get(d, 2)
        pencil = projective.dlo_pencil(delta, lam, table)
        for k in proj_generators(d):
            moved = densities.ad_action(k, delta, lam)
            assert densities.ad_action(k, pencil) == projective.dlo_pencil(moved, lam, table)


class TestGradedDecomposition:
    """Tests for delta = delta_n + ... + delta_0."""

    @given(operators(dim=2, order=3, max_terms=5), weights())
    @settings(max_examples=15, deadline=None)
    def test_components_sum_to_input(self, tables, delta, lam):
        """Test the telescoping sum and that each part is its own principal symbol."""
        table = tables.get(2, 3)
        components = projective.graded_decompose(delta, lam, table, 3)
        assert len(components) == 4
        assert sum(components, DensityOperator.zero(2)) == delta
        for k, component in zip(range(3, -1, -1), components):
            assert projective.full_symbol(component, lam, table) == SymbolPoly.naive(component).homogeneous_part(k)

    def test_function(self, tables):
        """Test that a function lands in the order-0 slot."""
        delta = op("x1^2 - 1")
        components = projective.graded_decompose(delta, 2, tables.get(1, 2), 2)
        assert components[0].is_zero()
        assert components[1].is_zero()
        assert components[2] == delta

    @pytest.mark.parametrize("lam", [Fraction(1, 3), 2, -1])
    def test_graded_map_restricts_to_quantization(self, tables, lam):
        """Test that the graded map at w = lambda quantizes the principal symbol."""
        table = tables.get(1, 2)
        delta = op("x1^2*d1^2 + x1*d1 + 3")
        lifted = projective.graded_map(delta, 2, table)
        expected = projective.quantize(principal_symbol(delta, 2), lam, table)
        assert densities.restrict(lifted, lam) == expected

    def test_default_order(self, tables):
        """Test that the number of parts follows the operator order."""
        components = projective.graded_decompose(op("x1*d1 + 1"), 2, tables.get(1, 2))
        assert len(components) == 2


class TestTriangularFamily:
    """Tests for the lower-triangular family of projective liftings."""

    def test_constant_rows_give_dlo(self, tables):
        """Test that P_i = 1 reproduces the DLO pencil."""
        table = tables.get(1, 2)
        delta = op("x1^2*d1^2 + x1*d1 + x1")
        params = TriangularFamilyParams(n=2, lam=3, rows=((1,), (1,), (1,)))
        assert projective.triangular_family_lift(delta, params, table) == projective.dlo_pencil(delta, 3, table)

    def test_proportional_rows(self, tables):
        """Test that scaling a row does not change the lift."""
        table = tables.get(1, 2)
        delta = op("x1^2*d1^2 + x1*d1 + x1")
        first = TriangularFamilyParams(n=2, lam=3, rows=((1,), (-1, 2), (0, -1, 1)))
        second = TriangularFamilyParams(n=2, lam=3, rows=((5,), (1, -2), (0, -3, 3)))
        lifted = projective.triangular_family_lift(delta, first, table)
        assert lifted == projective.triangular_family_lift(delta, second, table)
        assert densities.restrict(lifted, 3) == delta

    def test_anti_self_adjoint_first_order(self, tables):
        """Test rows {1, 2w - 1} on a first-order operator."""
        delta = op("x1^2*d1 + x1")
        params = TriangularFamilyParams(n=1, lam=2, rows=((1,), (-1, 2)))
        lifted = projective.triangular_family_lift(delta, params, tables.get(1, 1))
        assert lifted == pencils.first_order_pencil(delta, 2, 2, -1)

    def test_vanishing_row(self, tables):
        """Test that P_i(lambda) = 0 is refused."""
        params = TriangularFamilyParams(n=1, lam=Fraction(1, 2), rows=((1,), (-1, 2)))
        with pytest.raises(ExcludedParameterError):
            projective.triangular_family_lift(op("d1"), params, tables.get(1, 1))

    def test_rows_validated(self):
        """Test that entries above the diagonal and zero rows are refused."""
        with pytest.raises(DimensionError):
            TriangularFamilyParams(n=1, lam=1, rows=((1, 2), (1,)))
        with pytest.raises(ExcludedParameterError):
            TriangularFamilyParams(n=1, lam=1, rows=((1,), (0, 0)))

    @given(operators(dim=1, order=2, degree=3, max_terms=4), weights((0, 1)))
    @settings(max_examples=15, deadline=None)
    def test_equivariant(self, tables, delta, lam):
        """Test proj-equivariance of a non-trivial member."""
        table = tables.get(1, 2)
        params = TriangularFamilyParams(n=2, lam=lam, rows=((1,), (1, 1), (2, 0, 1)))
        if any(params.row_polynomial(i).evaluate(lam) == 0 for i in range(3)):
            return
        lifted = projective.triangular_family_lift(delta, params, table)
        for k in proj_generators(1):
            moved = densities.ad_action(k, delta, lam)
            assert densities.ad_action(k, lifted) == projective.triangular_family_lift(moved, params, table)


class TestSelfAdjointFamily:
    """Tests for self-adjointness of the triangular family."""

    def test_filter(self):
        """Test the parity condition about w = 1/2."""
        good = TriangularFamilyParams(n=1, lam=2, rows=((1,), (-1, 2)))
        report = projective.self_adjointness_filter(good)
        assert report.passed
        assert report.expansions[1].coeffs == (0, 2)

        bad = TriangularFamilyParams(n=1, lam=2, rows=((1,), (0, 1)))
        report = projective.self_adjointness_filter(bad)
        assert not report.passed
        assert report.failing_rows == (1,)

    def test_second_order_rows_pass(self):
        """Test that 1, 2w - 1 and p + q w(w - 1) pass the filter."""
        params = projective.second_order_selfadjoint_rows(3, 2, 5)
        assert projective.self_adjointness_filter(params).passed

    def test_excluded_parameters(self):
        """Test lambda = 1/2, [0:0] and a vanishing last row."""
        with pytest.raises(ExcludedParameterError):
            projective.second_order_selfadjoint_rows(Fraction(1, 2), 1, 1)
        with pytest.raises(ExcludedParameterError):
            projective.second_order_selfadjoint_rows(2, 0, 0)
        with pytest.raises(ExcludedParameterError):
            projective.second_order_selfadjoint_rows(2, -2, 1)

    def test_pure_second_derivative(self, tables):
        """Test that d1^2 lifts to itself for every [p:q]."""
        table = tables.get(1, 2)
        for p, q in [(0, 1), (1, 0), (3, -1)]:
            assert projective.second_order_selfadjoint_family(op("d1^2"), 3, p, q, table) == op("d1^2")

    @given(operators(dim=2, order=2, max_terms=5), weights(SINGULAR))
    @settings(max_examples=15, deadline=None)
    def test_canonical_member(self, tables, delta, lam):
        """Test that [0:1] is the canonical self-adjoint pencil."""
        table = tables.get(2, 2)
        lifted = projective.second_order_selfadjoint_family(delta, lam, 0, 1, table)
        assert lifted == pencils.canonical_second_order_lift(delta, lam)

    @given(operators(dim=1, order=2, degree=3, max_terms=4), weights(SINGULAR), rationals())
    @settings(max_examples=15, deadline=None)
    def test_self_adjoint(self, tables, delta, lam, p):
        """Test that every member is self-adjoint and passes through delta."""
        q = 1
        if p + q * lam * (lam - 1) == 0:
            return
        lifted = projective.second_order_selfadjoint_family(delta, lam, p, q, table=tables.get(1, 2))
        assert densities.is_self_adjoint(lifted)
        assert densities.restrict(lifted, lam) == delta


class TestSchwarzian:
    """Tests for the projectively invariant scalar of a second-order operator."""

    def test_simple_values(self):
        """Test d1^2 and a multiplication operator."""
        assert projective.schwarzian_scalar(op("d1^2"), 3, 1).is_zero()
        assert projective.schwarzian_scalar(op("x1^2 + 2"), 3, 1) == parse_polynomial("x1^2 + 2", 1)

    def test_weight_one_line(self):
        """Test S = S'' for S d1^2 at weight 1 on the line."""
        assert projective.schwarzian_scalar(op("x1^4*d1^2"), 1, 1) == parse_polynomial("12*x1^2", 1)

    def test_dimension_argument(self):
        """Test that the dimension argument must match."""
        with pytest.raises(DimensionError):
            projective.schwarzian_scalar(op("d1^2"), 1, 2)

    def test_order_bound(self):
        """Test that third-order operators are refused."""
        with pytest.raises(OrderError):
            projective.schwarzian_scalar(op("d1^3"), 1, 1)

    @given(operators(dim=2, order=2, max_terms=5), weights())
    @settings(max_examples=20, deadline=None)
    def test_scalar_law(self, delta, lam):
        """Test S(ad_K delta) = K(S(delta)) for every projective generator."""
        value = projective.schwarzian_scalar(delta, lam, 2)
        for k in proj_generators(2):
            moved = densities.ad_action(k, delta, lam)
            assert projective.schwarzian_scalar(moved, lam, 2) == k.act(value)

    def test_fails_for_cubic_field(self):
        """Test that x1^3 d1 breaks the scalar law for d1^2 at weight 2."""
        k = VectorField(1, (parse_polynomial("x1^3", 1),))
        delta = op("d1^2")
        moved = densities.ad_action(k, delta, 2)
        assert moved == op("-6*x1^2*d1^2 - 30*x1*d1 - 12")
        value = projective.schwarzian_scalar(moved, 2, 1)
        assert value == parse_polynomial("8", 1)
        assert value != k.act(projective.schwarzian_scalar(delta, 2, 1))
