"""
Normal-ordered differential operators of weight 0 on the algebra of densities.

An operator is a finite sum of terms ``c(x) * d^alpha * w^k``: the coefficient
stands left of every derivative and of the weight operator w. Because w
commutes with weight-0 functions and with every d_i, the only reordering
rule needed is Leibniz's.
"""
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Iterator, Mapping

from app.exceptions import DimensionError
from app.models.polynomial import NEG_INFINITY, LambdaPoly, MultiPoly, _monomial_text
from app.models.rational import as_rational, format_rational


Alpha = tuple[int, ...]
TermKey = tuple[Alpha, int]


def term_sort_key(key: TermKey):
    """|alpha| descending, alpha lexicographically descending, w-power ascending."""
    alpha, wpow = key
    return (-sum(alpha), tuple(-a for a in alpha), wpow)


def _sub_multi_indices(alpha: Alpha) -> Iterator[Alpha]:
    if not alpha:
        yield ()
        return
    for head in range(alpha[0] + 1):
        for tail in _sub_multi_indices(alpha[1:]):
            yield (head, *tail)


@dataclass(frozen=True, kw_only=True)
class OperatorTerm:
    coeff: MultiPoly
    alpha: Alpha
    wpow: int = 0

    @property
    def order(self) -> int:
        return sum(self.alpha) + self.wpow


class DensityOperator:
    """Finite sum of normal-ordered terms keyed by (alpha, w-power)."""

    __slots__ = ("dim", "_terms", "_hash")

    def __init__(self, dim: int, terms: Mapping[TermKey, MultiPoly] | None = None):
        if dim < 1:
            raise DimensionError(f"operator dimension must be >= 1, got {dim}")
        clean: dict[TermKey, MultiPoly] = {}
        for (alpha, wpow), coeff in (terms or {}).items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != dim or any(a < 0 for a in alpha) or wpow < 0:
                raise DimensionError(f"malformed term index {alpha}, w^{wpow} for dimension {dim}")
            if coeff.dim != dim:
                raise DimensionError(f"coefficient dimension {coeff.dim} differs from {dim}")
            key = (alpha, int(wpow))
            total = clean.get(key, MultiPoly.zero(dim)) + coeff
            if total.is_zero():
                clean.pop(key, None)
            else:
                clean[key] = total
        self.dim = dim
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, dim: int, terms: dict[TermKey, MultiPoly]) -> "DensityOperator":
        op = object.__new__(cls)
        op.dim = dim
        op._terms = terms
        op._hash = None
        return op

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> "DensityOperator":
        return cls(dim)

    @classmethod
    def multiplication(cls, coeff: MultiPoly) -> "DensityOperator":
        return cls(coeff.dim, {((0,) * coeff.dim, 0): coeff})

    @classmethod
    def scalar(cls, dim: int, value) -> "DensityOperator":
        return cls.multiplication(MultiPoly.constant(dim, value))

    @classmethod
    def identity(cls, dim: int) -> "DensityOperator":
        return cls.scalar(dim, 1)

    @classmethod
    def derivative(cls, dim: int, index: int) -> "DensityOperator":
        if not 1 <= index <= dim:
            raise DimensionError(f"derivative d{index} out of range for dimension {dim}")
        alpha = [0] * dim
        alpha[index - 1] = 1
        return cls(dim, {(tuple(alpha), 0): MultiPoly.one(dim)})

    @classmethod
    def weight(cls, dim: int) -> "DensityOperator":
        """The weight operator w."""
        return cls(dim, {((0,) * dim, 1): MultiPoly.one(dim)})

    @classmethod
    def weight_polynomial(cls, dim: int, poly: LambdaPoly) -> "DensityOperator":
        """P(w) for a weight polynomial P."""
        zero = (0,) * dim
        return cls(dim, {
            (zero, power): MultiPoly.constant(dim, coeff)
            for power, coeff in enumerate(poly.coeffs)
            if coeff
        })

    @classmethod
    def monomial(cls, coeff: MultiPoly, alpha: Iterable[int], wpow: int = 0) -> "DensityOperator":
        return cls(coeff.dim, {(tuple(alpha), wpow): coeff})

    # ------------------------------------------------------------------
    # Inspection
    # ------------------------------------------------------------------

    @property
    def terms(self) -> list[OperatorTerm]:
        return [
            OperatorTerm(coeff=self._terms[key], alpha=key[0], wpow=key[1])
            for key in sorted(self._terms, key=term_sort_key)
        ]

    def items(self) -> Iterator[tuple[TermKey, MultiPoly]]:
        return iter(self._terms.items())

    def coefficient(self, alpha: Iterable[int], wpow: int = 0) -> MultiPoly:
        return self._terms.get((tuple(alpha), wpow), MultiPoly.zero(self.dim))

    def is_zero(self) -> bool:
        return not self._terms

    def is_w_free(self) -> bool:
        return all(wpow == 0 for _, wpow in self._terms)

    @property
    def spatial_order(self) -> float | int:
        if not self._terms:
            return NEG_INFINITY
        return max(sum(alpha) for alpha, _ in self._terms)

    @property
    def order(self) -> float | int:
        if not self._terms:
            return NEG_INFINITY
        return max(sum(alpha) + wpow for alpha, wpow in self._terms)

    @property
    def w_degree(self) -> float | int:
        if not self._terms:
            return NEG_INFINITY
        return max(wpow for _, wpow in self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DensityOperator):
            return NotImplemented
        return self.dim == other.dim and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self._terms.items())))
        return self._hash

    # ------------------------------------------------------------------
    # Linear structure
    # ------------------------------------------------------------------

    def _check_dim(self, other: "DensityOperator"):
        if not isinstance(other, DensityOperator):
            raise TypeError(f"expected DensityOperator, got {type(other).__name__}")
        if other.dim != self.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "DensityOperator") -> "DensityOperator":
        self._check_dim(other)
        terms = dict(self._terms)
        for key, coeff in other._terms.items():
            total = terms[key] + coeff if key in terms else coeff
            if total.is_zero():
                terms.pop(key, None)
            else:
                terms[key] = total
        return DensityOperator._raw(self.dim, terms)

    def __neg__(self) -> "DensityOperator":
        return DensityOperator._raw(self.dim, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "DensityOperator") -> "DensityOperator":
        return self + (-other)

    def scale(self, factor) -> "DensityOperator":
        factor = as_rational(factor)
        if not factor:
            return DensityOperator.zero(self.dim)
        return DensityOperator._raw(self.dim, {k: c.scale(factor) for k, c in self._terms.items()})

    def left_multiply(self, func: MultiPoly) -> "DensityOperator":
        """f * D; stays normal ordered since f already stands on the left."""
        if func.dim != self.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {func.dim}")
        terms = {}
        for key, coeff in self._terms.items():
            product = func * coeff
            if not product.is_zero():
                terms[key] = product
        return DensityOperator._raw(self.dim, terms)

    # ------------------------------------------------------------------
    # Composition
    # ------------------------------------------------------------------

    def compose(self, other: "DensityOperator") -> "DensityOperator":
        """
        Normal-ordered product self o other.

        (f d^a w^k) o (g d^b w^l) = f * sum_c C(a, c) (d^c g) d^(a-c+b) w^(k+l)
        """
        self._check_dim(other)
        out: dict[TermKey, MultiPoly] = {}
        derivative_cache: dict[tuple[MultiPoly, Alpha], MultiPoly] = {}
        for (alpha, k), f in self._terms.items():
            for (beta, l), g in other._terms.items():
                for gamma in _sub_multi_indices(alpha):
                    cache_key = (g, gamma)
                    dg = derivative_cache.get(cache_key)
                    if dg is None:
                        dg = g.partial_multi(gamma)
                        derivative_cache[cache_key] = dg
                    if dg.is_zero():
                        continue
                    weight = 1
                    for a, c in zip(alpha, gamma):
                        weight *= comb(a, c)
                    key = (tuple(a - c + b for a, c, b in zip(alpha, gamma, beta)), k + l)
                    contribution = (f * dg).scale(weight)
                    total = out[key] + contribution if key in out else contribution
                    if total.is_zero():
                        out.pop(key, None)
                    else:
                        out[key] = total
        return DensityOperator._raw(self.dim, out)

    def __mul__(self, other):
        if isinstance(other, DensityOperator):
            return self.compose(other)
        if isinstance(other, MultiPoly):
            return self.compose(DensityOperator.multiplication(other))
        return self.scale(other)

    def __rmul__(self, other):
        if isinstance(other, MultiPoly):
            return self.left_multiply(other)
        return self.scale(other)

    def __matmul__(self, other: "DensityOperator") -> "DensityOperator":
        return self.compose(other)

    def __pow__(self, power: int) -> "DensityOperator":
        result = DensityOperator.identity(self.dim)
        for _ in range(power):
            result = result.compose(self)
        return result

    # ------------------------------------------------------------------
    # Rendering
    # ------------------------------------------------------------------

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for term in self.terms:
            tail = _monomial_text(term.alpha, "d")
            if term.wpow:
                w_text = "w" if term.wpow == 1 else f"w^{term.wpow}"
                tail = f"{tail}*{w_text}" if tail else w_text
            negative, text = _term_text(term.coeff, tail)
            if not pieces:
                pieces.append(f"-{text}" if negative else text)
            else:
                pieces.append(f" {'-' if negative else '+'} {text}")
        return "".join(pieces)

    def __repr__(self) -> str:
        return f"DensityOperator({self.dim}, '{self}')"


def _term_text(coeff: MultiPoly, tail: str) -> tuple[bool, str]:
    if len(coeff) == 1:
        ((exp, value),) = coeff.terms
        negative = value < 0
        magnitude = abs(value)
        head = _monomial_text(exp, "x")
        if magnitude != 1 or not (head or tail):
            head = f"{format_rational(magnitude)}*{head}" if head else format_rational(magnitude)
        text = "*".join(part for part in (head, tail) if part)
        return negative, text
    body = f"({coeff})"
    return False, f"{body}*{tail}" if tail else body


@dataclass(frozen=True)
class VectorField:
    """X = X^i d_i with polynomial components."""

    dim: int
    components: tuple[MultiPoly, ...]

    def __post_init__(self):
        if len(self.components) != self.dim:
            raise DimensionError(f"vector field needs {self.dim} components, got {len(self.components)}")
        if any(c.dim != self.dim for c in self.components):
            raise DimensionError("vector field component of the wrong dimension")

    @classmethod
    def of(cls, components: Iterable[MultiPoly]) -> "VectorField":
        components = tuple(components)
        if not components:
            raise DimensionError("vector field needs at least one component")
        return cls(components[0].dim, components)

    @classmethod
    def zero(cls, dim: int) -> "VectorField":
        return cls(dim, tuple(MultiPoly.zero(dim) for _ in range(dim)))

    @classmethod
    def coordinate(cls, dim: int, index: int, coeff: MultiPoly | None = None) -> "VectorField":
        """coeff * d_index."""
        coeff = coeff if coeff is not None else MultiPoly.one(dim)
        return cls(dim, tuple(coeff if i == index else MultiPoly.zero(dim) for i in range(1, dim + 1)))

    def divergence(self) -> MultiPoly:
        total = MultiPoly.zero(self.dim)
        for index, comp in enumerate(self.components, start=1):
            total = total + comp.partial(index)
        return total

    def act(self, func: MultiPoly) -> MultiPoly:
        """X(f) = X^i d_i f."""
        total = MultiPoly.zero(self.dim)
        for index, comp in enumerate(self.components, start=1):
            total = total + comp * func.partial(index)
        return total

    def bracket(self, other: "VectorField") -> "VectorField":
        if other.dim != self.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return VectorField(self.dim, tuple(
            self.act(y) - other.act(x) for x, y in zip(self.components, other.components)
        ))

    def to_operator(self) -> DensityOperator:
        out = DensityOperator.zero(self.dim)
        for index, comp in enumerate(self.components, start=1):
            out = out + DensityOperator.derivative(self.dim, index).left_multiply(comp)
        return out

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.dim, tuple(a + b for a, b in zip(self.components, other.components)))

    def scale(self, factor) -> "VectorField":
        return VectorField(self.dim, tuple(c.scale(factor) for c in self.components))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    @property
    def degree(self) -> float | int:
        return max(c.degree for c in self.components)


@dataclass(frozen=True)
class HatVectorField:
    """Weight-0 field X^i d_i + X^0 w on the extended space."""

    base: VectorField
    vertical: MultiPoly

    def __post_init__(self):
        if self.vertical.dim != self.base.dim:
            raise DimensionError("vertical component of the wrong dimension")

    @property
    def dim(self) -> int:
        return self.base.dim

    def to_operator(self) -> DensityOperator:
        return self.base.to_operator() + DensityOperator.weight(self.dim).left_multiply(self.vertical)


class QuasiDensity:
    """Finite sum of densities s_r(x)|Dx|^lambda_r with distinct weights."""

    __slots__ = ("dim", "_parts")

    def __init__(self, dim: int, parts: Mapping[object, MultiPoly] | Iterable[tuple[MultiPoly, object]] | None = None):
        if dim < 1:
            raise DimensionError(f"density dimension must be >= 1, got {dim}")
        if parts is None:
            items = []
        elif isinstance(parts, Mapping):
            items = [(poly, weight) for weight, poly in parts.items()]
        else:
            items = list(parts)
        clean: dict[Fraction, MultiPoly] = {}
        for poly, weight in items:
            if poly.dim != dim:
                raise DimensionError(f"density part of dimension {poly.dim} in dimension {dim}")
            weight = as_rational(weight)
            total = clean[weight] + poly if weight in clean else poly
            if total.is_zero():
                clean.pop(weight, None)
            else:
                clean[weight] = total
        self.dim = dim
        self._parts = clean

    @classmethod
    def of_weight(cls, poly: MultiPoly, weight) -> "QuasiDensity":
        return cls(poly.dim, [(poly, weight)])

    @classmethod
    def unit(cls, dim: int) -> "QuasiDensity":
        """The constant function 1, a density of weight 0."""
        return cls.of_weight(MultiPoly.one(dim), 0)

    @classmethod
    def zero(cls, dim: int) -> "QuasiDensity":
        return cls(dim)

    @property
    def parts(self) -> list[tuple[MultiPoly, Fraction]]:
        """Parts ordered by weight ascending."""
        return [(self._parts[w], w) for w in sorted(self._parts)]

    def part(self, weight) -> MultiPoly:
        return self._parts.get(as_rational(weight), MultiPoly.zero(self.dim))

    @property
    def weights(self) -> list[Fraction]:
        return sorted(self._parts)

    def is_zero(self) -> bool:
        return not self._parts

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuasiDensity):
            return NotImplemented
        return self.dim == other.dim and self._parts == other._parts

    def __hash__(self) -> int:
        return hash((self.dim, frozenset(self._parts.items())))

    def _check(self, other: "QuasiDensity"):
        if not isinstance(other, QuasiDensity):
            raise TypeError(f"expected QuasiDensity, got {type(other).__name__}")
        if other.dim != self.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "QuasiDensity") -> "QuasiDensity":
        self._check(other)
        return QuasiDensity(self.dim, self.parts + other.parts)

    def __neg__(self) -> "QuasiDensity":
        return QuasiDensity(self.dim, [(-p, w) for p, w in self.parts])

    def __sub__(self, other: "QuasiDensity") -> "QuasiDensity":
        return self + (-other)

    def __mul__(self, other):
        """Pointwise product; weights add."""
        if isinstance(other, QuasiDensity):
            self._check(other)
            return QuasiDensity(self.dim, [
                (p * q, v + w) for p, v in self.parts for q, w in other.parts
            ])
        if isinstance(other, MultiPoly):
            return QuasiDensity(self.dim, [(other * p, w) for p, w in self.parts])
        factor = as_rational(other)
        return QuasiDensity(self.dim, [(p.scale(factor), w) for p, w in self.parts])

    __rmul__ = __mul__

    def __pow__(self, power: int) -> "QuasiDensity":
        result = QuasiDensity.unit(self.dim)
        for _ in range(power):
            result = result * self
        return result

    def __str__(self) -> str:
        if not self._parts:
            return "0"
        return " + ".join(f"({poly})@{format_rational(weight)}" for poly, weight in self.parts)

    def __repr__(self) -> str:
        return f"QuasiDensity({self.dim}, '{self}')"
