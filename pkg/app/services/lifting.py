"""
One entry point for every pencil lifting, selected by method name.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from app.exceptions import OrderError, ParseError
from app.models.geometry import VolumeStructure
from app.models.operator import DensityOperator
from app.models.polynomial import NEG_INFINITY
from app.models.rational import as_rational
from app.models.symbol import MAX_ORDER, DLOCoefficientTable, SdiffFamilyParams, TriangularFamilyParams
from app.services import pencils, projective, sdiff


TableProvider = Callable[[int, int], DLOCoefficientTable]

LIFT_METHODS = (
    "first-order",
    "first-order-affine",
    "canonical2",
    "iso",
    "volume",
    "sdiff-family",
    "line",
    "disting",
    "dlo",
    "triangular",
    "selfadj2",
)
TABLE_METHODS = ("dlo", "triangular", "selfadj2")
VOLUME_METHODS = ("volume", "sdiff-family", "line", "disting")


@dataclass(frozen=True, kw_only=True)
class LiftParams:
    """Every parameter a lifting method may use; each method reads only its own."""

    lam: Fraction
    p: Fraction | None = None
    q: Fraction | None = None
    c: Fraction | None = None
    mu: Fraction | None = None
    n: int | None = None
    b: Fraction | None = None
    cvals: tuple[Fraction, ...] = ()
    dvals: tuple[Fraction, ...] = ()
    rows: tuple[tuple[Fraction, ...], ...] | None = None
    volume: VolumeStructure | None = None
    tables: TableProvider | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "lam", as_rational(self.lam))
        for name in ("p", "q", "c", "mu", "b"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, as_rational(value))


def _require(value, method: str, name: str):
    if value is None:
        raise ParseError(f"method '{method}' requires --{name}")
    return value


def resolve_order(n: int | None, inferred) -> int:
    """Return n, or the inferred order or degree when n is None, bounded by MAX_ORDER."""
    if n is None:
        n = 0 if inferred == NEG_INFINITY else int(inferred)
    if n > MAX_ORDER:
        raise OrderError(f"order {n} exceeds the supported maximum {MAX_ORDER}")
    return n


def _order(delta: DensityOperator, params: LiftParams) -> int:
    return resolve_order(params.n, delta.spatial_order)


def _volume(delta: DensityOperator, params: LiftParams) -> VolumeStructure:
    return params.volume if params.volume is not None else VolumeStructure.lebesgue(delta.dim)


def _table(delta: DensityOperator, params: LiftParams, n: int) -> DLOCoefficientTable:
    if params.tables is None:
        raise ParseError("no coefficient table provider configured")
    return params.tables(delta.dim, n)


def lift(delta: DensityOperator, method: str, params: LiftParams) -> DensityOperator:
    """Dispatch to the named lifting."""
    lam = params.lam
    if method == "first-order":
        p = params.p if params.p is not None else Fraction(0)
        q = params.q if params.q is not None else Fraction(1)
        return pencils.first_order_pencil(delta, lam, p, q)
    if method == "first-order-affine":
        return pencils.first_order_affine_pencil(delta, lam, _require(params.c, method, "c"))
    if method == "canonical2":
        return pencils.canonical_second_order_lift(delta, lam)
    if method == "iso":
        return pencils.duval_ovsienko_iso(delta, lam, _require(params.mu, method, "mu"))
    if method == "volume":
        return sdiff.volume_lift(delta, lam, _volume(delta, params))
    if method == "sdiff-family":
        n = resolve_order(params.n if params.n is not None else (len(params.cvals) or None), delta.spatial_order)
        family = SdiffFamilyParams(
            n=n, lam=lam, b=params.b or Fraction(0), c=params.cvals, dcoef=params.dvals,
        )
        return sdiff.sdiff_family_lift(delta, family, _volume(delta, params))
    if method == "line":
        n = _order(delta, params)
        return sdiff.line_lift(delta, n, lam, _require(params.b, method, "b"), _volume(delta, params))
    if method == "disting":
        return sdiff.distinguished_lift(delta, _order(delta, params), lam, _volume(delta, params))
    if method == "dlo":
        n = _order(delta, params)
        return projective.dlo_pencil(delta, lam, _table(delta, params, n))
    if method == "triangular":
        rows = _require(params.rows or None, method, "rows")
        family = TriangularFamilyParams(n=len(rows) - 1, lam=lam, rows=rows)
        return projective.triangular_family_lift(delta, family, _table(delta, params, family.n))
    if method == "selfadj2":
        p = params.p if params.p is not None else Fraction(0)
        q = params.q if params.q is not None else Fraction(1)
        return projective.second_order_selfadjoint_family(delta, lam, p, q, _table(delta, params, 2))
    raise ParseError(f"unknown lifting method '{method}'; expected one of {', '.join(LIFT_METHODS)}")
