"""
Full symbols (polynomials in the momenta xi_i) and the parameter records of the
projective and volume-preserving lifting families.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from app.exceptions import DimensionError, ExcludedParameterError, TableError
from app.models.operator import DensityOperator, _term_text
from app.models.polynomial import NEG_INFINITY, LambdaPoly, MultiPoly, _monomial_text
from app.models.rational import as_rational


XiExponent = tuple[int, ...]


def _xi_sort_key(exp: XiExponent):
    return (-sum(exp), tuple(-e for e in exp))


class SymbolPoly:
    """sum_beta T_beta(x) xi^beta with polynomial coefficients."""

    __slots__ = ("dim", "_terms")

    def __init__(self, dim: int, terms: Mapping[Iterable[int], MultiPoly] | None = None):
        if dim < 1:
            raise DimensionError(f"symbol dimension must be >= 1, got {dim}")
        clean: dict[XiExponent, MultiPoly] = {}
        for exp, coeff in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != dim or any(e < 0 for e in exp):
                raise DimensionError(f"malformed xi exponent {exp} for dimension {dim}")
            if coeff.dim != dim:
                raise DimensionError(f"coefficient dimension {coeff.dim} differs from {dim}")
            total = clean[exp] + coeff if exp in clean else coeff
            if total.is_zero():
                clean.pop(exp, None)
            else:
                clean[exp] = total
        self.dim = dim
        self._terms = clean

    @classmethod
    def zero(cls, dim: int) -> "SymbolPoly":
        return cls(dim)

    @classmethod
    def function(cls, coeff: MultiPoly) -> "SymbolPoly":
        return cls(coeff.dim, {(0,) * coeff.dim: coeff})

    @classmethod
    def xi(cls, dim: int, index: int) -> "SymbolPoly":
        if not 1 <= index <= dim:
            raise DimensionError(f"momentum xi{index} out of range for dimension {dim}")
        exp = [0] * dim
        exp[index - 1] = 1
        return cls(dim, {tuple(exp): MultiPoly.one(dim)})

    # ------------------------------------------------------------------

    @property
    def terms(self) -> list[tuple[XiExponent, MultiPoly]]:
        """Terms by xi-degree descending, then lexicographically descending."""
        return sorted(self._terms.items(), key=lambda item: _xi_sort_key(item[0]))

    def items(self) -> Iterator[tuple[XiExponent, MultiPoly]]:
        return iter(self._terms.items())

    def coefficient(self, exp: Iterable[int]) -> MultiPoly:
        return self._terms.get(tuple(exp), MultiPoly.zero(self.dim))

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> float | int:
        if not self._terms:
            return NEG_INFINITY
        return max(sum(exp) for exp in self._terms)

    def homogeneous_part(self, k: int) -> "SymbolPoly":
        return SymbolPoly(self.dim, {e: c for e, c in self._terms.items() if sum(e) == k})

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymbolPoly):
            return NotImplemented
        return self.dim == other.dim and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.dim, frozenset(self._terms.items())))

    # ------------------------------------------------------------------

    def _check(self, other: "SymbolPoly"):
        if not isinstance(other, SymbolPoly):
            raise TypeError(f"expected SymbolPoly, got {type(other).__name__}")
        if other.dim != self.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "SymbolPoly") -> "SymbolPoly":
        self._check(other)
        terms = dict(self._terms)
        for exp, coeff in other._terms.items():
            terms[exp] = terms[exp] + coeff if exp in terms else coeff
        return SymbolPoly(self.dim, {e: c for e, c in terms.items() if not c.is_zero()})

    def __neg__(self) -> "SymbolPoly":
        return SymbolPoly(self.dim, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other: "SymbolPoly") -> "SymbolPoly":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, SymbolPoly):
            self._check(other)
            out = SymbolPoly.zero(self.dim)
            for e1, c1 in self._terms.items():
                for e2, c2 in other._terms.items():
                    exp = tuple(a + b for a, b in zip(e1, e2))
                    out = out + SymbolPoly(self.dim, {exp: c1 * c2})
            return out
        if isinstance(other, MultiPoly):
            return SymbolPoly(self.dim, {e: other * c for e, c in self._terms.items()})
        return self.scale(other)

    __rmul__ = __mul__

    def __pow__(self, power: int) -> "SymbolPoly":
        result = SymbolPoly.function(MultiPoly.one(self.dim))
        for _ in range(power):
            result = result * self
        return result

    def scale(self, factor) -> "SymbolPoly":
        factor = as_rational(factor)
        return SymbolPoly(self.dim, {e: c.scale(factor) for e, c in self._terms.items()})

    def partial_x(self, index: int) -> "SymbolPoly":
        return SymbolPoly(self.dim, {e: c.partial(index) for e, c in self._terms.items()})

    def partial_xi(self, index: int) -> "SymbolPoly":
        if not 1 <= index <= self.dim:
            raise DimensionError(f"axis {index} out of range for dimension {self.dim}")
        axis = index - 1
        terms = {}
        for exp, coeff in self._terms.items():
            if exp[axis]:
                new = list(exp)
                new[axis] -= 1
                terms[tuple(new)] = coeff.scale(exp[axis])
        return SymbolPoly(self.dim, terms)

    def times_xi(self, index: int) -> "SymbolPoly":
        axis = index - 1
        terms = {}
        for exp, coeff in self._terms.items():
            new = list(exp)
            new[axis] += 1
            terms[tuple(new)] = coeff
        return SymbolPoly(self.dim, terms)

    def contraction(self) -> "SymbolPoly":
        """D p = sum_j d/dx_j d/dxi_j p; lowers the xi-degree by one."""
        out = SymbolPoly.zero(self.dim)
        for j in range(1, self.dim + 1):
            out = out + self.partial_xi(j).partial_x(j)
        return out

    def to_operator(self) -> DensityOperator:
        """Replace xi^beta by d^beta, coefficients on the left."""
        return DensityOperator(self.dim, {(exp, 0): coeff for exp, coeff in self._terms.items()})

    @classmethod
    def naive(cls, op: DensityOperator) -> "SymbolPoly":
        """The w-free operator sum T_beta d^beta read as sum T_beta xi^beta."""
        return cls(op.dim, {alpha: coeff for (alpha, _), coeff in op.items()})

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for exp, coeff in self.terms:
            negative, text = _term_text(coeff, _monomial_text(exp, "xi"))
            if not pieces:
                pieces.append(f"-{text}" if negative else text)
            else:
                pieces.append(f" {'-' if negative else '+'} {text}")
        return "".join(pieces)

    def __repr__(self) -> str:
        return f"SymbolPoly({self.dim}, '{self}')"


# Largest operator order the solvers and tables accept.
MAX_ORDER = 16


@dataclass(frozen=True, kw_only=True)
class DLOCoefficientTable:
    """
    Coefficients c_r^(k)(lambda) of the projectively equivariant symbol map and
    c~_r^(k)(lambda) of its inverse, for 0 <= r <= k <= max_order.
    """

    dim: int
    max_order: int
    c: dict[tuple[int, int], LambdaPoly] = field(default_factory=dict)
    ctilde: dict[tuple[int, int], LambdaPoly] = field(default_factory=dict)

    def __post_init__(self):
        one = LambdaPoly.constant(1)
        for k in range(self.max_order + 1):
            for r in range(k + 1):
                if (k, r) not in self.c or (k, r) not in self.ctilde:
                    raise TableError(f"table for d={self.dim}, n={self.max_order} is missing entry ({k}, {r})")
                if self.c[(k, r)].degree > r:
                    raise TableError(f"c_{r}^({k}) has degree above {r}")
            if self.c[(k, 0)] != one or self.ctilde[(k, 0)] != one:
                raise TableError(f"c_0^({k}) must be normalized to 1")

    def c_at(self, k: int, r: int) -> LambdaPoly:
        return self.c[(k, r)]

    def ctilde_at(self, k: int, r: int) -> LambdaPoly:
        return self.ctilde[(k, r)]

    def truncated(self, n: int) -> "DLOCoefficientTable":
        if n > self.max_order:
            raise TableError(f"cannot truncate a table of order {self.max_order} to {n}")
        keep = lambda table: {key: value for key, value in table.items() if key[0] <= n}
        return DLOCoefficientTable(dim=self.dim, max_order=n, c=keep(self.c), ctilde=keep(self.ctilde))


@dataclass(frozen=True, kw_only=True)
class SdiffFamilyParams:
    """Coordinates (b, c_1..c_n, d_1..d_n) on the plane of volume-preserving liftings."""

    n: int
    lam: Fraction
    b: Fraction = Fraction(0)
    c: tuple[Fraction, ...] = ()
    dcoef: tuple[Fraction, ...] = ()

    def __post_init__(self):
        if self.n < 0:
            raise ExcludedParameterError(f"order must be non-negative, got {self.n}")
        c = tuple(as_rational(v) for v in self.c) or (Fraction(0),) * self.n
        dcoef = tuple(as_rational(v) for v in self.dcoef) or (Fraction(0),) * self.n
        if len(c) != self.n or len(dcoef) != self.n:
            raise DimensionError(f"expected {self.n} values for c and for d, got {len(c)} and {len(dcoef)}")
        object.__setattr__(self, "lam", as_rational(self.lam))
        object.__setattr__(self, "b", as_rational(self.b))
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "dcoef", dcoef)


@dataclass(frozen=True, kw_only=True)
class TriangularFamilyParams:
    """Lower-triangular matrix a_ij; row i is the weight polynomial P_i(w) = sum_j a_ij w^j."""

    n: int
    lam: Fraction
    rows: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if len(self.rows) != self.n + 1:
            raise DimensionError(f"expected {self.n + 1} rows, got {len(self.rows)}")
        rows = []
        for i, row in enumerate(self.rows):
            row = [as_rational(v) for v in row]
            if any(row[i + 1:]):
                raise DimensionError(f"row {i} has entries above the diagonal")
            row = (row + [Fraction(0)] * (i + 1))[: i + 1]
            if not any(row):
                raise ExcludedParameterError(f"row {i} has no non-zero entry")
            rows.append(tuple(row))
        object.__setattr__(self, "lam", as_rational(self.lam))
        object.__setattr__(self, "rows", tuple(rows))

    def row_polynomial(self, i: int) -> LambdaPoly:
        return LambdaPoly(self.rows[i])

    @classmethod
    def from_polynomials(cls, lam, polys: list[LambdaPoly]) -> "TriangularFamilyParams":
        return cls(n=len(polys) - 1, lam=lam, rows=tuple(p.coeffs for p in polys))
