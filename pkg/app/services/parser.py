"""
Parser and printers for the operator / polynomial DSL.

    x1..xd     coordinates            d1..dd   partial derivatives
    w          the weight operator    xi1..    fibre variables of a symbol
    3, 2/3     rational literals      p@l      density of weight l

``*`` and juxtaposition are composition (non-commutative), ``^`` takes a
literal non-negative exponent and only follows an identifier.
Precedence: ``^`` > ``*`` > ``@`` > ``+ -``; everything binary is left-associative.
"""
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import sympy

from app.exceptions import DimensionError, ParseError
from app.models.operator import DensityOperator, QuasiDensity
from app.models.polynomial import MultiPoly
from app.models.rational import format_rational
from app.models.symbol import SymbolPoly


MAX_EXPONENT = 64
MAX_INDEX = 64
MAX_LITERAL_DIGITS = 1000

_TOKEN_RE = re.compile(
    r"(?P<space>[ \t\r]+)"
    r"|(?P<newline>\n)"
    r"|(?P<number>\d+)"
    r"|(?P<ident>[A-Za-z]+\d*)"
    r"|(?P<op>[-+*/^()@])"
)
_IDENT_RE = re.compile(r"([a-z]+)(\d*)")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(src: str) -> Iterator[Token]:
    line, line_start, pos = 1, 0, 0
    while pos < len(src):
        match = _TOKEN_RE.match(src, pos)
        if match is None:
            raise ParseError(f"unexpected character {src[pos]!r}", line, pos - line_start + 1)
        kind = match.lastgroup
        if kind == "newline":
            line, line_start = line + 1, match.end()
        elif kind != "space":
            yield Token(kind, match.group(), line, pos - line_start + 1)
        pos = match.end()
    yield Token("end", "", line, pos - line_start + 1)


def _split_ident(token: Token) -> tuple[str, int | None]:
    match = _IDENT_RE.fullmatch(token.text)
    if match is None:
        raise ParseError(f"unknown identifier {token.text!r}", token.line, token.column)
    name, digits = match.groups()
    if not digits:
        return name, None
    if len(digits) > 4 or int(digits) > MAX_INDEX:
        raise DimensionError(f"index {digits} of {token.text!r} is too large")
    return name, int(digits)


def infer_dim(*sources: str) -> int:
    """The largest index used by any x<i>, d<i> or xi<i> atom (at least 1)."""
    dim = 1
    for src in sources:
        if not src:
            continue
        for token in tokenize(src):
            if token.kind == "ident":
                _, index = _split_ident(token)
                if index is not None:
                    dim = max(dim, index)
    return dim


# ============================================================================
# Algebras the parser can evaluate into
# ============================================================================

class _Algebra:
    name = "expression"
    atoms: tuple[str, ...] = ()

    def __init__(self, dim: int):
        if dim < 1:
            raise DimensionError(f"dimension must be >= 1, got {dim}")
        self.dim = dim

    def _index(self, token: Token, index: int | None) -> int:
        if index is None:
            raise ParseError(f"{token.text!r} needs an index", token.line, token.column)
        if not 1 <= index <= self.dim:
            raise DimensionError(
                f"{token.text!r} at line {token.line}, column {token.column} is out of range for dimension {self.dim}"
            )
        return index

    def atom(self, token: Token):
        name, index = _split_ident(token)
        if name not in self.atoms:
            raise ParseError(f"{token.text!r} is not allowed in a {self.name}", token.line, token.column)
        return self.make_atom(name, index, token)

    def make_atom(self, name: str, index: int | None, token: Token):
        raise NotImplementedError

    def scalar(self, value: Fraction):
        raise NotImplementedError

    def at_weight(self, value, weight: Fraction, token: Token):
        raise ParseError(f"'@' is not allowed in a {self.name}", token.line, token.column)


class PolynomialAlgebra(_Algebra):
    name = "polynomial"
    atoms = ("x",)

    def make_atom(self, name, index, token):
        return MultiPoly.variable(self.dim, self._index(token, index))

    def scalar(self, value):
        return MultiPoly.constant(self.dim, value)


class OperatorAlgebra(_Algebra):
    name = "operator"
    atoms = ("x", "d", "w")

    def make_atom(self, name, index, token):
        if name == "w":
            if index is not None:
                raise ParseError("'w' takes no index", token.line, token.column)
            return DensityOperator.weight(self.dim)
        index = self._index(token, index)
        if name == "x":
            return DensityOperator.multiplication(MultiPoly.variable(self.dim, index))
        return DensityOperator.derivative(self.dim, index)

    def scalar(self, value):
        return DensityOperator.scalar(self.dim, value)


class SymbolAlgebra(_Algebra):
    name = "symbol"
    atoms = ("x", "xi")

    def make_atom(self, name, index, token):
        index = self._index(token, index)
        if name == "x":
            return SymbolPoly.function(MultiPoly.variable(self.dim, index))
        return SymbolPoly.xi(self.dim, index)

    def scalar(self, value):
        return SymbolPoly.function(MultiPoly.constant(self.dim, value))


class DensityAlgebra(_Algebra):
    """Quasi-densities; a bare polynomial is a density of weight 0."""

    name = "density"
    atoms = ("x",)

    def make_atom(self, name, index, token):
        return QuasiDensity.of_weight(MultiPoly.variable(self.dim, self._index(token, index)), 0)

    def scalar(self, value):
        return QuasiDensity.of_weight(MultiPoly.constant(self.dim, value), 0)

    def at_weight(self, value, weight, token):
        if any(w != 0 for w in value.weights):
            raise ParseError("'@' applies to a polynomial, not to a density", token.line, token.column)
        return QuasiDensity.of_weight(value.part(0), weight)


# ============================================================================
# Pratt parser
# ============================================================================

_INFIX_POWER = {"+": 10, "-": 10, "@": 15, "*": 20}
_JUXTAPOSE_POWER = 20
_PREFIX_MINUS_POWER = 20


class _Parser:
    def __init__(self, src: str, algebra: _Algebra):
        self.tokens = list(tokenize(src))
        self.pos = 0
        self.algebra = algebra

    @property
    def token(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        if token.kind != "end":
            self.pos += 1
        return token

    def expect(self, text: str) -> Token:
        token = self.advance()
        if token.text != text or token.kind == "end":
            raise ParseError(f"expected {text!r}, found {token.text or 'end of input'!r}", token.line, token.column)
        return token

    def error(self, message: str, token: Token | None = None) -> ParseError:
        token = token or self.token
        return ParseError(message, token.line, token.column)

    def parse(self):
        if self.token.kind == "end":
            raise self.error("empty expression")
        value = self.expression(0)
        if self.token.kind != "end":
            raise self.error(f"unexpected {self.token.text!r}")
        return value

    def _left_power(self, token: Token) -> int:
        if token.kind == "op" and token.text in _INFIX_POWER:
            return _INFIX_POWER[token.text]
        if token.kind in ("number", "ident") or token.text == "(":
            return _JUXTAPOSE_POWER
        return 0

    def expression(self, right_power: int):
        left = self.prefix(self.advance())
        while right_power < self._left_power(self.token):
            token = self.token
            if token.kind == "op" and token.text in _INFIX_POWER:
                self.advance()
                left = self.infix(token, left)
            else:
                left = left * self.expression(_JUXTAPOSE_POWER)
        return left

    def prefix(self, token: Token):
        if token.kind == "number":
            return self.algebra.scalar(self.rational_tail(token))
        if token.kind == "ident":
            value = self.algebra.atom(token)
            if self.token.text == "^":
                self.advance()
                value = value ** self.exponent()
            return value
        if token.text == "(":
            value = self.expression(0)
            self.expect(")")
            if self.token.text == "^":
                raise self.error("'^' applies to identifiers only")
            return value
        if token.text == "-":
            return -self.expression(_PREFIX_MINUS_POWER)
        if token.text == "+":
            return self.expression(_PREFIX_MINUS_POWER)
        if token.kind == "end":
            raise self.error("unexpected end of input", token)
        raise self.error(f"unexpected {token.text!r}", token)

    def infix(self, token: Token, left):
        if token.text == "+":
            return left + self.expression(_INFIX_POWER["+"])
        if token.text == "-":
            return left - self.expression(_INFIX_POWER["-"])
        if token.text == "*":
            return left * self.expression(_INFIX_POWER["*"])
        return self.algebra.at_weight(left, self.signed_rational(), token)

    def integer(self, token: Token) -> int:
        if len(token.text) > MAX_LITERAL_DIGITS:
            raise self.error(f"integer literal longer than {MAX_LITERAL_DIGITS} digits", token)
        return int(token.text)

    def rational_tail(self, token: Token) -> Fraction:
        numerator = self.integer(token)
        if self.token.text != "/":
            return Fraction(numerator)
        self.advance()
        denominator = self.advance()
        if denominator.kind != "number":
            raise self.error("'/' must be followed by an integer denominator", denominator)
        value = self.integer(denominator)
        if value == 0:
            raise self.error("zero denominator", denominator)
        return Fraction(numerator, value)

    def signed_rational(self) -> Fraction:
        sign = 1
        while self.token.text in ("-", "+"):
            if self.advance().text == "-":
                sign = -sign
        token = self.advance()
        if token.kind != "number":
            raise self.error("expected a rational weight", token)
        return sign * self.rational_tail(token)

    def exponent(self) -> int:
        token = self.advance()
        if token.kind != "number":
            raise self.error("'^' must be followed by a non-negative integer", token)
        if len(token.text) > 3 or int(token.text) > MAX_EXPONENT:
            raise self.error(f"exponent {token.text} exceeds {MAX_EXPONENT}", token)
        return int(token.text)


def _parse(src: str, algebra: _Algebra):
    if not isinstance(src, str):
        raise ParseError(f"expected text, got {type(src).__name__}")
    try:
        return _Parser(src, algebra).parse()
    except RecursionError:
        raise ParseError("expression is nested too deeply") from None


def parse_operator(src: str, d: int | None = None) -> DensityOperator:
    d = d if d is not None else infer_dim(src)
    return _parse(src, OperatorAlgebra(d))


def parse_polynomial(src: str, d: int | None = None) -> MultiPoly:
    d = d if d is not None else infer_dim(src)
    return _parse(src, PolynomialAlgebra(d))


def parse_symbol(src: str, d: int | None = None) -> SymbolPoly:
    d = d if d is not None else infer_dim(src)
    return _parse(src, SymbolAlgebra(d))


def parse_density(src: str, d: int | None = None) -> QuasiDensity:
    d = d if d is not None else infer_dim(src)
    return _parse(src, DensityAlgebra(d))


# ============================================================================
# Printers
# ============================================================================

def format_operator(op: DensityOperator) -> str:
    return str(op)


def format_polynomial(poly: MultiPoly) -> str:
    return str(poly)


def format_symbol(sym: SymbolPoly) -> str:
    return str(sym)


def format_density(density: QuasiDensity) -> str:
    if density.is_zero():
        return "0"
    return " + ".join(f"({poly})@{format_rational(weight)}" for poly, weight in density.parts)


def operator_to_latex(op: DensityOperator) -> str:
    """LaTeX through sympy, with d_i and w as non-commuting symbols in normal order."""
    if op.is_zero():
        return "0"
    xs = sympy.symbols(f"x1:{op.dim + 1}")
    ds = [sympy.Symbol(f"\\partial_{{{i}}}", commutative=False) for i in range(1, op.dim + 1)]
    w = sympy.Symbol("\\hat{w}", commutative=False)
    pieces = []
    for term in op.terms:
        coeff = term.coeff.to_sympy(xs)
        tail = sympy.Integer(1)
        for d_sym, power in zip(ds, term.alpha):
            if power:
                tail = tail * d_sym ** power
        if term.wpow:
            tail = tail * w ** term.wpow
        pieces.append(sympy.latex(coeff * tail, order="none"))
    text = pieces[0]
    for piece in pieces[1:]:
        text += f" - {piece[1:]}" if piece.startswith("-") else f" + {piece}"
    return text
