"""
Sparse multivariate polynomials in x1..xd and univariate weight polynomials.

Both types are immutable; arithmetic returns new values in canonical form
(no zero coefficients stored).
"""
import math
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

import sympy

from app.exceptions import DimensionError
from app.models.rational import as_rational, format_rational


NEG_INFINITY = -math.inf

Exponent = tuple[int, ...]


def _grlex_key(exp: Exponent):
    # Graded lex, largest first.
    return (-sum(exp), tuple(-e for e in exp))


def _scalar(value) -> Fraction | None:
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return Fraction(value)
    return None


class MultiPoly:
    """Exact polynomial in ``dim`` commuting variables with rational coefficients."""

    __slots__ = ("dim", "_terms", "_hash")

    def __init__(self, dim: int, terms: Mapping[Iterable[int], object] | None = None):
        if dim < 1:
            raise DimensionError(f"polynomial dimension must be >= 1, got {dim}")
        clean: dict[Exponent, Fraction] = {}
        for exp, coeff in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != dim:
                raise DimensionError(f"exponent {exp} does not have length {dim}")
            if any(e < 0 for e in exp):
                raise DimensionError(f"negative exponent in {exp}")
            value = clean.get(exp, Fraction(0)) + as_rational(coeff)
            if value:
                clean[exp] = value
            else:
                clean.pop(exp, None)
        self.dim = dim
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, dim: int, terms: dict[Exponent, Fraction]) -> "MultiPoly":
        poly = object.__new__(cls)
        poly.dim = dim
        poly._terms = terms
        poly._hash = None
        return poly

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> "MultiPoly":
        return cls(dim)

    @classmethod
    def constant(cls, dim: int, value) -> "MultiPoly":
        return cls(dim, {(0,) * dim: value})

    @classmethod
    def one(cls, dim: int) -> "MultiPoly":
        return cls.constant(dim, 1)

    @classmethod
    def variable(cls, dim: int, index: int) -> "MultiPoly":
        """The coordinate x_index (1-based)."""
        if not 1 <= index <= dim:
            raise DimensionError(f"variable x{index} out of range for dimension {dim}")
        exp = [0] * dim
        exp[index - 1] = 1
        return cls(dim, {tuple(exp): 1})

    @classmethod
    def monomial(cls, exp: Iterable[int], coeff=1) -> "MultiPoly":
        exp = tuple(exp)
        return cls(len(exp), {exp: coeff})

    # ------------------------------------------------------------------
    # Inspection
    # ------------------------------------------------------------------

    @property
    def terms(self) -> list[tuple[Exponent, Fraction]]:
        """Terms in graded-lex order, highest first."""
        return sorted(self._terms.items(), key=lambda item: _grlex_key(item[0]))

    def items(self) -> Iterator[tuple[Exponent, Fraction]]:
        return iter(self._terms.items())

    def coefficient(self, exp: Iterable[int]) -> Fraction:
        return self._terms.get(tuple(exp), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(exp) for exp in self._terms)

    @property
    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.dim, Fraction(0))

    @property
    def degree(self) -> float | int:
        if not self._terms:
            return NEG_INFINITY
        return max(sum(exp) for exp in self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        scalar = _scalar(other)
        if scalar is not None:
            other = MultiPoly.constant(self.dim, scalar)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.dim == other.dim and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self._terms.items())))
        return self._hash

    # ------------------------------------------------------------------
    # Arithmetic
    # ------------------------------------------------------------------

    def _coerce(self, other) -> "MultiPoly":
        scalar = _scalar(other)
        if scalar is not None:
            return MultiPoly.constant(self.dim, scalar)
        if not isinstance(other, MultiPoly):
            raise TypeError(f"cannot combine MultiPoly with {type(other).__name__}")
        if other.dim != self.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return other

    def __add__(self, other) -> "MultiPoly":
        if not isinstance(other, (MultiPoly, int, Fraction)):
            return NotImplemented
        other = self._coerce(other)
        terms = dict(self._terms)
        for exp, coeff in other._terms.items():
            value = terms.get(exp, 0) + coeff
            if value:
                terms[exp] = value
            else:
                terms.pop(exp, None)
        return MultiPoly._raw(self.dim, terms)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly._raw(self.dim, {exp: -c for exp, c in self._terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "MultiPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "MultiPoly":
        if not isinstance(other, (MultiPoly, int, Fraction)):
            return NotImplemented
        scalar = _scalar(other)
        if scalar is not None:
            return self.scale(scalar)
        other = self._coerce(other)
        terms: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                terms[exp] = terms.get(exp, 0) + c1 * c2
        return MultiPoly._raw(self.dim, {e: c for e, c in terms.items() if c})

    __rmul__ = __mul__

    def __pow__(self, power: int) -> "MultiPoly":
        if power < 0:
            raise ValueError("negative powers are not polynomials")
        result = MultiPoly.one(self.dim)
        base = self
        while power:
            if power & 1:
                result = result * base
            base = base * base
            power >>= 1
        return result

    def scale(self, factor) -> "MultiPoly":
        factor = as_rational(factor)
        if not factor:
            return MultiPoly.zero(self.dim)
        return MultiPoly._raw(self.dim, {e: c * factor for e, c in self._terms.items()})

    def partial(self, index: int) -> "MultiPoly":
        """Formal derivative with respect to x_index (1-based)."""
        if not 1 <= index <= self.dim:
            raise DimensionError(f"axis {index} out of range for dimension {self.dim}")
        axis = index - 1
        terms = {}
        for exp, coeff in self._terms.items():
            if exp[axis]:
                new = list(exp)
                new[axis] -= 1
                terms[tuple(new)] = coeff * exp[axis]
        return MultiPoly._raw(self.dim, terms)

    def partial_multi(self, alpha: Iterable[int]) -> "MultiPoly":
        """Apply d^alpha, alpha a multi-index of length dim."""
        result = self
        for index, count in enumerate(alpha, start=1):
            for _ in range(count):
                if result.is_zero():
                    return result
                result = result.partial(index)
        return result

    def evaluate(self, point: Iterable) -> Fraction:
        point = [as_rational(v) for v in point]
        if len(point) != self.dim:
            raise DimensionError(f"point has {len(point)} coordinates, expected {self.dim}")
        total = Fraction(0)
        for exp, coeff in self._terms.items():
            term = coeff
            for value, e in zip(point, exp):
                term *= value ** e
            total += term
        return total

    # ------------------------------------------------------------------
    # Conversions
    # ------------------------------------------------------------------

    def to_sympy(self, symbols=None):
        if symbols is None:
            symbols = sympy.symbols(f"x1:{self.dim + 1}")
        expr = sympy.Integer(0)
        for exp, coeff in self._terms.items():
            term = sympy.Rational(coeff.numerator, coeff.denominator)
            for sym, e in zip(symbols, exp):
                term *= sym ** e
            expr += term
        return expr

    @classmethod
    def from_sympy(cls, expr, dim: int, symbols=None) -> "MultiPoly":
        if symbols is None:
            symbols = sympy.symbols(f"x1:{dim + 1}")
        poly = sympy.Poly(sympy.expand(expr), *symbols)
        return cls(dim, {
            exp: Fraction(int(c.p), int(c.q)) for exp, c in poly.terms()
        })

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for position, (exp, coeff) in enumerate(self.terms):
            sign = "-" if coeff < 0 else "+"
            body = _monomial_text(exp, "x")
            magnitude = abs(coeff)
            if not body:
                text = format_rational(magnitude)
            elif magnitude == 1:
                text = body
            else:
                text = f"{format_rational(magnitude)}*{body}"
            if position == 0:
                pieces.append(f"-{text}" if sign == "-" else text)
            else:
                pieces.append(f" {sign} {text}")
        return "".join(pieces)

    def __repr__(self) -> str:
        return f"MultiPoly({self.dim}, '{self}')"


def _monomial_text(exp: Exponent, prefix: str) -> str:
    factors = []
    for index, e in enumerate(exp, start=1):
        if e == 1:
            factors.append(f"{prefix}{index}")
        elif e > 1:
            factors.append(f"{prefix}{index}^{e}")
    return "*".join(factors)


def poly_arith(a: MultiPoly, b: MultiPoly, op: str) -> MultiPoly:
    """Add, subtract or multiply two polynomials of the same dimension."""
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown polynomial operation {op!r}")


class LambdaPoly:
    """Univariate polynomial in a formal weight variable; coeffs[i] multiplies the i-th power."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        values = [as_rational(c) for c in coeffs]
        while values and not values[-1]:
            values.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(values)

    @classmethod
    def constant(cls, value) -> "LambdaPoly":
        return cls([value])

    @classmethod
    def variable(cls) -> "LambdaPoly":
        return cls([0, 1])

    @classmethod
    def linear(cls, slope, intercept) -> "LambdaPoly":
        return cls([intercept, slope])

    @property
    def degree(self) -> float | int:
        return len(self.coeffs) - 1 if self.coeffs else NEG_INFINITY

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, power: int) -> Fraction:
        return self.coeffs[power] if power < len(self.coeffs) else Fraction(0)

    def evaluate(self, value) -> Fraction:
        value = as_rational(value)
        total = Fraction(0)
        for coeff in reversed(self.coeffs):
            total = total * value + coeff
        return total

    __call__ = evaluate

    def __eq__(self, other) -> bool:
        scalar = _scalar(other)
        if scalar is not None:
            other = LambdaPoly.constant(scalar)
        if not isinstance(other, LambdaPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def _coerce(self, other) -> "LambdaPoly":
        scalar = _scalar(other)
        if scalar is not None:
            return LambdaPoly.constant(scalar)
        if not isinstance(other, LambdaPoly):
            raise TypeError(f"cannot combine LambdaPoly with {type(other).__name__}")
        return other

    def __add__(self, other) -> "LambdaPoly":
        other = self._coerce(other)
        size = max(len(self.coeffs), len(other.coeffs))
        return LambdaPoly(self.coefficient(i) + other.coefficient(i) for i in range(size))

    __radd__ = __add__

    def __neg__(self) -> "LambdaPoly":
        return LambdaPoly(-c for c in self.coeffs)

    def __sub__(self, other) -> "LambdaPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "LambdaPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "LambdaPoly":
        other = self._coerce(other)
        if not self.coeffs or not other.coeffs:
            return LambdaPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return LambdaPoly(out)

    __rmul__ = __mul__

    def __pow__(self, power: int) -> "LambdaPoly":
        result = LambdaPoly.constant(1)
        for _ in range(power):
            result = result * self
        return result

    def compose(self, inner: "LambdaPoly") -> "LambdaPoly":
        """P(inner(t))."""
        result = LambdaPoly()
        for coeff in reversed(self.coeffs):
            result = result * inner + coeff
        return result

    def shift(self, amount) -> "LambdaPoly":
        """P(t + amount); its coefficients are the expansion of P in powers of (t - amount)."""
        return self.compose(LambdaPoly.linear(1, amount))

    def reflect(self) -> "LambdaPoly":
        """P(1 - t), the image of P(w) under the canonical adjoint."""
        return self.compose(LambdaPoly.linear(-1, 1))

    def to_sympy(self, symbol=None):
        symbol = symbol if symbol is not None else sympy.Symbol("lambda")
        return sum(
            (sympy.Rational(c.numerator, c.denominator) * symbol ** i for i, c in enumerate(self.coeffs)),
            sympy.Integer(0),
        )

    def format(self, var: str = "w") -> str:
        if not self.coeffs:
            return "0"
        pieces = []
        for power in range(len(self.coeffs) - 1, -1, -1):
            coeff = self.coeffs[power]
            if not coeff:
                continue
            magnitude = abs(coeff)
            body = "" if power == 0 else (var if power == 1 else f"{var}^{power}")
            if not body:
                text = format_rational(magnitude)
            elif magnitude == 1:
                text = body
            else:
                text = f"{format_rational(magnitude)}*{body}"
            if not pieces:
                pieces.append(f"-{text}" if coeff < 0 else text)
            else:
                pieces.append(f" {'-' if coeff < 0 else '+'} {text}")
        return "".join(pieces)

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"LambdaPoly('{self}')"
