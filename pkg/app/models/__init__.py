from app.models.rational import Rational, as_rational, format_rational
from app.models.polynomial import NEG_INFINITY, LambdaPoly, MultiPoly, poly_arith
from app.models.operator import DensityOperator, HatVectorField, OperatorTerm, QuasiDensity, VectorField
from app.models.geometry import Connection, PrincipalSymbolHat, VolumeStructure
from app.models.symbol import DLOCoefficientTable, SdiffFamilyParams, SymbolPoly, TriangularFamilyParams

__all__ = [
    "Rational",
    "as_rational",
    "format_rational",
    "NEG_INFINITY",
    "LambdaPoly",
    "MultiPoly",
    "poly_arith",
    "DensityOperator",
    "HatVectorField",
    "OperatorTerm",
    "QuasiDensity",
    "VectorField",
    "Connection",
    "PrincipalSymbolHat",
    "VolumeStructure",
    "DLOCoefficientTable",
    "SdiffFamilyParams",
    "SymbolPoly",
    "TriangularFamilyParams",
]
