"""
Tests for operators on the algebra of densities.
"""
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings

from app.exceptions import DimensionError, OrderError
from app.models.operator import DensityOperator, HatVectorField, QuasiDensity, VectorField
from app.models.polynomial import NEG_INFINITY, MultiPoly
from app.services import densities
from app.services.parser import parse_density, parse_operator, parse_polynomial
from tests.strategies import fields, hat_fields, operators, rationals


def op(src: str, d: int = 1) -> DensityOperator:
    return parse_operator(src, d)


def field(*components: str) -> VectorField:
    d = len(components)
    return VectorField(d, tuple(parse_polynomial(c, d) for c in components))


class TestCompose:
    """Tests for normal-ordered composition."""

    def test_leibniz(self):
        """Test d1 o x1 = x1 d1 + 1."""
        assert densities.compose(op("d1"), op("x1")) == op("x1*d1 + 1")

    def test_weight_is_central(self):
        """Test that w commutes with weight-0 functions."""
        assert densities.compose(op("w"), op("x1")) == op("x1*w")

    def test_square_of_euler_operator(self):
        """Test (x1 d1)^2 = x1^2 d1^2 + x1 d1."""
        euler = op("x1*d1")
        assert densities.compose(euler, euler) == op("x1^2*d1^2 + x1*d1")

    def test_dimension_mismatch(self):
        """Test that operators of different dimensions do not compose."""
        with pytest.raises(DimensionError):
            densities.compose(op("d1"), op("d2", 2))

    def test_canonical_term_order(self):
        """Test that terms are listed by order, then derivative, then w-power."""
        result = op("w + x2*d2 + d1*d2 + w*d1 + d1 + 1", 2)
        keys = [(t.alpha, t.wpow) for t in result.terms]
        assert keys == [
            ((1, 1), 0),
            ((1, 0), 0),
            ((1, 0), 1),
            ((0, 1), 0),
            ((0, 0), 0),
            ((0, 0), 1),
        ]

    @given(operators(dim=2, order=2, w_degree=1), operators(dim=2, order=2, w_degree=1), operators(dim=2, order=1, w_degree=1))
    @settings(max_examples=25, deadline=None)
    def test_associative(self, a, b, c):
        """Test that every parenthesization gives the same normal form."""
        assert a.compose(b).compose(c) == a.compose(b.compose(c))

    @given(operators(dim=1, order=2, w_degree=1), operators(dim=1, order=2, w_degree=1), rationals())
    @settings(max_examples=25, deadline=None)
    def test_matches_application(self, a, b, weight):
        """Test (a o b)(s) = a(b(s)) on a monomial density, checked with sympy."""
        s = QuasiDensity.of_weight(parse_polynomial("x1^4 + x1", 1), weight)
        assert densities.apply(a.compose(b), s) == densities.apply(a, densities.apply(b, s))
        x1 = sympy.Symbol("x1")
        direct = densities.apply(b, s).part(weight).to_sympy([x1])
        source = s.part(weight).to_sympy([x1])
        expected = sympy.Integer(0)
        for (alpha, wpow), coeff in b.items():
            factor = weight ** wpow
            expected += (
                coeff.to_sympy([x1])
                * sympy.diff(source, x1, alpha[0])
                * sympy.Rational(factor.numerator, factor.denominator)
            )
        assert sympy.expand(direct - expected) == 0


class TestAdjoint:
    """Tests for the canonical adjoint."""

    def test_generators(self):
        """Test d* = -d and w* = 1 - w."""
        assert densities.adjoint(op("d1")) == op("-d1")
        assert densities.adjoint(op("w")) == op("1 - w")
        assert densities.adjoint(op("x1")) == op("x1")

    def test_mixed_term(self):
        """Test (x1 d1 w)* = x1 d1 w - x1 d1 + w - 1."""
        assert densities.adjoint(op("x1*d1*w")) == op("x1*d1*w - x1*d1 + w - 1")

    @given(operators(dim=2, order=3, w_degree=1), operators(dim=2, order=2, w_degree=1))
    @settings(max_examples=30, deadline=None)
    def test_involutive_anti_homomorphism(self, a, b):
        """Test a** = a and (ab)* = b* a*."""
        assert densities.adjoint(densities.adjoint(a)) == a
        assert densities.adjoint(a.compose(b)) == densities.adjoint(b).compose(densities.adjoint(a))

    @given(operators(dim=2, order=2, w_degree=1))
    @settings(max_examples=20, deadline=None)
    def test_symmetric_split(self, a):
        """Test a = self-adjoint part + anti-self-adjoint part."""
        plus = densities.self_adjoint_part(a)
        minus = densities.anti_self_adjoint_part(a)
        assert plus + minus == a
        assert densities.is_self_adjoint(plus)
        assert densities.is_anti_self_adjoint(minus)

    def test_pairing_identity(self):
        """Test <a s1, s2> = <s1, a* s2> on the unit interval for weights adding to 1."""
        a = op("x1^2*d1*w + d1^2 + x1")
        x1 = sympy.Symbol("x1")
        s1 = parse_polynomial("x1^2*(x1 - 1)^2", 1)
        s2 = parse_polynomial("x1^3*(1 - x1)^2", 1)
        lam = Fraction(1, 3)
        left = densities.apply(a, QuasiDensity.of_weight(s1, lam)).part(lam)
        right = densities.apply(densities.adjoint(a), QuasiDensity.of_weight(s2, 1 - lam)).part(1 - lam)
        lhs = sympy.integrate(left.to_sympy([x1]) * s2.to_sympy([x1]), (x1, 0, 1))
        rhs = sympy.integrate(s1.to_sympy([x1]) * right.to_sympy([x1]), (x1, 0, 1))
        assert lhs == rhs


class TestDivergenceAndLieLift:
    """Tests for the canonical divergence and the Lie lift."""

    def test_euler_field(self):
        """Test div(x1 d1) = 1."""
        hat = HatVectorField(field("x1"), MultiPoly.zero(1))
        assert densities.divergence_hat(hat) == op("1")

    def test_pure_weight_field(self):
        """Test div(w) = -1 on a weight-0 field."""
        hat = HatVectorField(VectorField.zero(1), MultiPoly.one(1))
        assert densities.divergence_hat(hat) == op("-1")

    def test_lie_lift(self):
        """Test L_X for X = x1^2 d1 and X = x1 d2."""
        assert densities.lie_lift(field("x1^2")) == op("x1^2*d1 + 2*x1*w")
        assert densities.lie_lift(field("0", "x1")) == op("x1*d2", 2)

    @given(hat_fields(dim=2, degree=3))
    @settings(max_examples=30, deadline=None)
    def test_divergence_identity(self, hat):
        """Test div X = -(X + X*)."""
        x_op = hat.to_operator()
        assert densities.divergence_hat(hat) == -(x_op + densities.adjoint(x_op))

    @given(fields(dim=2, degree=3))
    @settings(max_examples=30, deadline=None)
    def test_lie_lift_is_divergence_free(self, x):
        """Test div L_X = 0 and L_X* = -L_X."""
        lie = densities.lie_lift(x)
        assert densities.divergence_hat(densities.lie_lift_hat(x)).is_zero()
        assert densities.adjoint(lie) == -lie

    @given(fields(dim=2, degree=2), fields(dim=2, degree=2))
    @settings(max_examples=20, deadline=None)
    def test_ad_of_lie_lift(self, k, y):
        """Test ad_K L_Y = L_[K,Y]."""
        assert densities.ad_action(k, densities.lie_lift(y)) == densities.lie_lift(k.bracket(y))


class TestAdAction:
    """Tests for the adjoint action of vector fields."""

    def test_translation_on_euler_operator(self):
        """Test ad_{d1}(x1 d1) = d1."""
        assert densities.ad_action(field("1"), op("x1*d1")) == op("d1")

    def test_on_function(self):
        """Test ad_K(F) = K(F)."""
        k = field("x1^2", "x2")
        result = densities.ad_action(k, op("x1*x2^2", 2))
        assert result == op("x1^2*x2^2 + 2*x1*x2^2", 2)

    def test_restricted_action_commutes_with_restriction(self):
        """Test restrict(ad_K a, lam) = ad_K(restrict(a, lam)) at weight lam."""
        a = op("w^2*d1^2 + x1*w*d1 + x1^3")
        k = field("x1^3")
        lam = Fraction(2, 5)
        assert densities.restrict(densities.ad_action(k, a), lam) == densities.ad_action(
            k, densities.restrict(a, lam), lam
        )


class TestRestrictAndApply:
    """Tests for restriction to a weight and application to densities."""

    def test_restrict(self):
        """Test (w^2 + 1) d1^2 + d1 at w = lambda."""
        pencil = op("(w^2 + 1)*d1*d1 + d1")
        assert densities.restrict(pencil, Fraction(1, 2)) == op("5/4*d1^2 + d1")
        assert densities.restrict(op("w"), 0).is_zero()

    def test_restrict_lie_lift(self):
        """Test L_X at w = lambda is X + lambda div X."""
        x = field("x1^2")
        assert densities.restrict(densities.lie_lift(x), 3) == op("x1^2*d1 + 6*x1")

    def test_apply_weight_operator(self):
        """Test w s = lambda s."""
        s = parse_density("(x1 + 2)@3/2")
        assert densities.apply(op("w"), s) == parse_density("(3/2*x1 + 3)@3/2")

    def test_apply_derivative(self):
        """Test d1 on x1^2 of weight 1/2."""
        assert densities.apply(op("d1"), parse_density("x1^2@1/2")) == parse_density("2*x1@1/2")

    def test_apply_by_components(self):
        """Test (x1 d1 + w) on x1|Dx| + 1."""
        result = densities.apply(op("x1*d1 + w"), parse_density("x1@1 + 1@0"))
        assert result == parse_density("2*x1@1")

    def test_apply_to_unit(self):
        """Test a(1) for a normalized and a non-normalized operator."""
        assert densities.apply_to_unit(op("d1^2 + w*x1")).is_zero()
        assert densities.apply_to_unit(op("d1 + x1")) == parse_polynomial("x1", 1)


class TestVerticalOrderAndBracket:
    """Tests for vertical order and the long bracket."""

    def test_vertical_order(self):
        """Test vertical order of vertical, first-order and zero operators."""
        assert densities.vertical_order(op("w^3 + 5")) == 0
        assert densities.vertical_order(op("w*d1")) == 1
        assert densities.vertical_order(DensityOperator.zero(1)) == NEG_INFINITY

    def test_long_bracket(self):
        """Test {x1, x1} = 2 S for S d1^2."""
        f = parse_density("x1")
        result = densities.long_bracket(op("3*d1^2"), f, f)
        assert result == parse_density("6")

    def test_long_bracket_symmetric_and_unit(self):
        """Test symmetry and {1, g} = 0."""
        a = op("x1*d1^2 + d1 + (2*w - 1)*x1*d1")
        f = parse_density("x1^2@1/3")
        g = parse_density("x1^3 + x1@2/3")
        assert densities.long_bracket(a, f, g) == densities.long_bracket(a, g, f)
        assert densities.long_bracket(a, parse_density("1"), g).is_zero()

    def test_long_bracket_requires_normalization(self):
        """Test that a(1) != 0 is refused."""
        with pytest.raises(OrderError):
            densities.long_bracket(op("d1 + 1"), parse_density("x1"), parse_density("x1"))


class TestFirstOrderDecomposition:
    """Tests for L = L_X + w S1 + S2."""

    def test_round_trip(self):
        """Test that decomposing and assembling gives back the operator."""
        a = op("x1^2*d1 + 3*w + x1", 1)
        x, s1, s2 = densities.decompose_first_order(a)
        assert x == field("x1^2")
        assert s1 == parse_polynomial("3 - 2*x1", 1)
        assert s2 == parse_polynomial("x1", 1)
        assert densities.assemble_first_order(x, s1, s2) == a

    def test_rejects_higher_order(self):
        """Test that a second-order operator is refused."""
        with pytest.raises(OrderError):
            densities.decompose_first_order(op("d1^2"))
