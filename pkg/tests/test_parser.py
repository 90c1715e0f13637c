"""
Tests for the operator DSL: parsing, printing and error reporting.
"""
import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from app.exceptions import DensopsError, DimensionError, ParseError
from app.models.operator import DensityOperator, QuasiDensity
from app.services.parser import (
    format_density,
    infer_dim,
    operator_to_latex,
    parse_density,
    parse_operator,
    parse_polynomial,
    parse_symbol,
)
from app.services.commands import Command, run
from tests.strategies import operators, polys, rationals


class TestParseOperator:
    """Tests for operator expressions."""

    def test_juxtaposition_is_composition(self):
        """Test that 'd1 x1' and 'd1*x1' both normal-order to x1 d1 + 1."""
        expected = parse_operator("x1*d1 + 1", 1)
        assert parse_operator("d1 x1", 1) == expected
        assert parse_operator("d1*x1", 1) == expected

    def test_powers_and_rationals(self):
        """Test exponents on identifiers and p/q literals."""
        op = parse_operator("3/2*x1^2*d1^2 - w^2", 1)
        assert str(op) == "3/2*x1^2*d1^2 - w^2"

    def test_parenthesized_coefficients(self):
        """Test that a grouped coefficient prints back in parentheses."""
        op = parse_operator("(x1 + 1)*d1*w - 2 x2 d2", 2)
        assert str(op) == "(x1 + 1)*d1*w - 2*x2*d2"

    def test_infers_dimension(self):
        """Test that the largest index fixes the dimension."""
        assert infer_dim("x1*d3 + w") == 3
        assert parse_operator("d2").dim == 2
        assert infer_dim("", "5") == 1

    def test_unary_minus(self):
        """Test that leading and repeated signs are accepted."""
        assert parse_operator("-d1 + -x1", 1) == parse_operator("-(d1 + x1)", 1)

    def test_latex(self):
        """Test the LaTeX rendering of a mixed term."""
        text = operator_to_latex(parse_operator("x1*d1^2*w", 1))
        assert "\\partial" in text
        assert "hat{w}" in text
        assert operator_to_latex(DensityOperator.zero(1)) == "0"

    @given(operators(dim=2, order=3, w_degree=2, max_terms=5))
    @settings(max_examples=50, deadline=None)
    def test_round_trip(self, op):
        """Test that printed operators parse back to themselves."""
        assert parse_operator(str(op), 2) == op

    @given(polys(dim=3, degree=3))
    @settings(max_examples=50, deadline=None)
    def test_polynomial_round_trip(self, poly):
        """Test that printed polynomials parse back to themselves."""
        assert parse_polynomial(str(poly), 3) == poly


class TestParseOtherAlgebras:
    """Tests for polynomials, symbols and densities."""

    def test_polynomial_is_commutative(self):
        """Test that juxtaposition of polynomials commutes."""
        assert parse_polynomial("x2 x1", 2) == parse_polynomial("x1*x2", 2)

    def test_symbol(self):
        """Test printing of a symbol in canonical order."""
        sym = parse_symbol("x1*xi1 + xi1^2 - 4", 1)
        assert str(sym) == "xi1^2 + x1*xi1 - 4"

    def test_density_weights(self):
        """Test '@' with signed and fractional weights."""
        density = parse_density("x1@1/2 + 3@-2 + x1@1/2", 1)
        assert density.weights == [Fraction(-2), Fraction(1, 2)]
        assert density.part("1/2") == parse_polynomial("2*x1", 1)
        assert format_density(density) == "(3)@-2 + (2*x1)@1/2"

    def test_density_product_adds_weights(self):
        """Test that a product of densities has the sum of weights."""
        density = parse_density("(x1@1/3)(x1@2/3)", 1)
        assert density == QuasiDensity.of_weight(parse_polynomial("x1^2", 1), 1)

    @given(rationals(), polys(dim=2))
    @settings(max_examples=30, deadline=None)
    def test_density_round_trip(self, weight, poly):
        """Test that printed densities parse back to themselves."""
        density = QuasiDensity.of_weight(poly, weight)
        assert parse_density(format_density(density), 2) == density


class TestParseErrors:
    """Tests for error reporting."""

    @pytest.mark.parametrize(
        "src, line, column",
        [
            ("x1 + ", 1, 6),
            ("x1 ^ y", 1, 6),
            ("x1 $ 2", 1, 4),
            ("d1 +\n  * x1", 2, 3),
            ("(x1 + 1", 1, 8),
            ("(x1)^2", 1, 5),
        ],
    )
    def test_positions(self, src, line, column):
        """Test that errors carry the line and column of the offending token."""
        with pytest.raises(ParseError) as exc_info:
            parse_operator(src, 1)
        assert exc_info.value.line == line
        assert exc_info.value.column == column
        assert exc_info.value.to_dict()["code"] == "E_PARSE"

    @pytest.mark.parametrize("src", ["", "   ", "1/0", "x", "w2", "foo", "xi1", "x1@2"])
    def test_rejected_operators(self, src):
        """Test empty, malformed and foreign inputs."""
        with pytest.raises(ParseError):
            parse_operator(src, 1)

    def test_index_out_of_range(self):
        """Test that x3 in dimension 2 is a dimension error."""
        with pytest.raises(DimensionError):
            parse_operator("x3", 2)
        with pytest.raises(DimensionError):
            parse_operator("x99999")

    def test_derivative_in_polynomial(self):
        """Test that d1 is refused where a polynomial is expected."""
        with pytest.raises(ParseError):
            parse_polynomial("d1", 1)

    def test_weight_on_density(self):
        """Test that '@' cannot re-weight a density."""
        with pytest.raises(ParseError):
            parse_density("(x1@1)@2", 1)

    def test_exponent_bound(self):
        """Test that huge exponents are refused."""
        with pytest.raises(ParseError):
            parse_operator("d1^1000", 1)

    def test_not_text(self):
        """Test that non-string input is refused."""
        with pytest.raises(ParseError):
            parse_operator(12, 1)


class TestFuzz:
    """Random inputs never escape as anything but domain errors."""

    PIECES = [
        "x1", "x2", "d1", "d2", "w", "xi1", "1", "2/3", "0", "7",
        "+", "-", "*", "^", "^2", "(", ")", "@", "@-1/2", "/", " ", "\n", "q", "%", "X1", "x9",
    ]
    PARSERS = [parse_operator, parse_polynomial, parse_symbol, parse_density]

    def test_random_inputs(self):
        """Test 10^4 random inputs against every parser."""
        rng = random.Random(1234)
        outcomes = {"ok": 0, "error": 0}
        for _ in range(10_000):
            src = "".join(rng.choice(self.PIECES) for _ in range(rng.randint(0, 10)))
            parser = rng.choice(self.PARSERS)
            try:
                parser(src, 2)
                outcomes["ok"] += 1
            except DensopsError:
                outcomes["error"] += 1
        assert outcomes["ok"] > 0
        assert outcomes["error"] > 0

    def test_random_bytes_on_stdin(self, tables):
        """Test that raw bytes on stdin always end in exit code 0 or 2 with JSON output."""
        rng = random.Random(4321)
        tokens = [piece.encode() for piece in self.PIECES] + [b"\xff", b"\xc3", b"\x80", b"\x00", b"{", b"}"]
        for i in range(2_000):
            if i % 2:
                data = bytes(rng.randrange(256) for _ in range(rng.randint(0, 12)))
            else:
                data = b"".join(rng.choice(tokens) for _ in range(rng.randint(0, 10)))
            verb = rng.choice(["adjoint", "restrict"])
            options = {"op": "-", "lam": "1/3"} if verb == "restrict" else {"op": "-"}
            code, text = run(Command(verb, options), stdin=data, tables=tables)
            assert code in (0, 2)
            payload = json.loads(text)
            if code == 2:
                assert payload["error"]["code"].startswith("E_")
