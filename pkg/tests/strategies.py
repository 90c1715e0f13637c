"""
Hypothesis strategies for the algebra types.
Sizes stay small so that exact arithmetic remains fast.
"""
from fractions import Fraction

from hypothesis import strategies as st

from app.models.operator import DensityOperator, HatVectorField, VectorField
from app.models.polynomial import LambdaPoly, MultiPoly
from app.services.checks import multi_indices


def rationals(span: int = 4, max_denominator: int = 3):
    return st.fractions(min_value=-span, max_value=span, max_denominator=max_denominator)


def weights(excluded=()):
    return rationals(span=6).filter(lambda value: value not in excluded)


@st.composite
def polys(draw, dim: int = 1, degree: int = 2, max_terms: int = 3):
    exponents = multi_indices(dim, degree)
    terms = draw(st.dictionaries(st.sampled_from(exponents), rationals(), max_size=max_terms))
    return MultiPoly(dim, terms)


@st.composite
def lambda_polys(draw, degree: int = 3):
    return LambdaPoly(draw(st.lists(rationals(), max_size=degree + 1)))


@st.composite
def operators(draw, dim: int = 1, order: int = 2, degree: int = 2, w_degree: int = 0, max_terms: int = 4):
    keys = [(alpha, wpow) for alpha in multi_indices(dim, order) for wpow in range(w_degree + 1)]
    chosen = draw(st.lists(st.sampled_from(keys), max_size=max_terms, unique=True))
    return DensityOperator(dim, {key: draw(polys(dim, degree)) for key in chosen})


@st.composite
def fields(draw, dim: int = 1, degree: int = 2):
    return VectorField(dim, tuple(draw(polys(dim, degree)) for _ in range(dim)))


@st.composite
def hat_fields(draw, dim: int = 1, degree: int = 2):
    return HatVectorField(draw(fields(dim, degree)), draw(polys(dim, degree)))


def x(dim: int, index: int) -> MultiPoly:
    return MultiPoly.variable(dim, index)


def const(dim: int, value) -> MultiPoly:
    return MultiPoly.constant(dim, Fraction(value))
