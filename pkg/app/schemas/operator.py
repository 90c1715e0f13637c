from typing import Annotated, List

from pydantic import Field

from app.exceptions import DimensionError
from app.models.operator import DensityOperator, QuasiDensity
from app.models.polynomial import MultiPoly
from app.models.symbol import SymbolPoly
from app.schemas.base import BaseSchema, Dimension, RationalText, rational, rational_text
from app.services.parser import parse_polynomial


NonNegative = Annotated[int, Field(ge=0)]


def _exponent(values: list[int], dim: int, what: str) -> tuple[int, ...]:
    if len(values) != dim:
        raise DimensionError(f"{what} {values} has length {len(values)}, expected {dim}")
    return tuple(values)


class PolynomialSchema(BaseSchema):
    """A polynomial in x1..xd, written in the DSL."""

    dim: Dimension
    poly: str

    def to_model(self) -> MultiPoly:
        return parse_polynomial(self.poly, self.dim)

    @classmethod
    def from_model(cls, poly: MultiPoly) -> "PolynomialSchema":
        return cls(dim=poly.dim, poly=str(poly))


class OperatorTermSchema(BaseSchema):
    coeff: str
    alpha: List[NonNegative]
    w: NonNegative = 0


class OperatorSchema(BaseSchema):
    """Normal-ordered operator; output terms are in canonical order."""

    dim: Dimension
    terms: List[OperatorTermSchema] = []

    def to_model(self) -> DensityOperator:
        out = DensityOperator.zero(self.dim)
        for term in self.terms:
            alpha = _exponent(term.alpha, self.dim, "alpha")
            coeff = parse_polynomial(term.coeff, self.dim)
            out = out + DensityOperator.monomial(coeff, alpha, term.w)
        return out

    @classmethod
    def from_model(cls, op: DensityOperator) -> "OperatorSchema":
        return cls(dim=op.dim, terms=[
            OperatorTermSchema(coeff=str(t.coeff), alpha=list(t.alpha), w=t.wpow)
            for t in op.terms
        ])


class DensityPartSchema(BaseSchema):
    poly: str
    weight: RationalText


class DensitySchema(BaseSchema):
    """sum poly(x)|Dx|^weight, parts ordered by weight."""

    dim: Dimension
    parts: List[DensityPartSchema] = []

    def to_model(self) -> QuasiDensity:
        return QuasiDensity(self.dim, [
            (parse_polynomial(part.poly, self.dim), rational(part.weight)) for part in self.parts
        ])

    @classmethod
    def from_model(cls, density: QuasiDensity) -> "DensitySchema":
        return cls(dim=density.dim, parts=[
            DensityPartSchema(poly=str(poly), weight=rational_text(weight))
            for poly, weight in density.parts
        ])


class SymbolTermSchema(BaseSchema):
    coeff: str
    xi: List[NonNegative]


class SymbolSchema(BaseSchema):
    """sum coeff(x) xi^exponent, ordered by xi-degree descending."""

    dim: Dimension
    terms: List[SymbolTermSchema] = []

    def to_model(self) -> SymbolPoly:
        terms: dict = {}
        for term in self.terms:
            exp = _exponent(term.xi, self.dim, "xi exponent")
            coeff = parse_polynomial(term.coeff, self.dim)
            terms[exp] = terms[exp] + coeff if exp in terms else coeff
        return SymbolPoly(self.dim, terms)

    @classmethod
    def from_model(cls, sym: SymbolPoly) -> "SymbolSchema":
        return cls(dim=sym.dim, terms=[
            SymbolTermSchema(coeff=str(coeff), xi=list(exp)) for exp, coeff in sym.terms
        ])

