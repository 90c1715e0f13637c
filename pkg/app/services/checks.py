"""
Randomized property checks behind the ``check`` verb.

Every trial draws its data from ``random.Random(seed + index)``, so a report
is reproducible from (property, method, d, n, seed) alone. Trials run on a
thread pool; the report lists them by index whatever the completion order.
"""
import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Callable

from app.config import settings
from app.exceptions import DensopsError, ParseError
from app.models.geometry import PrincipalSymbolHat, VolumeStructure
from app.models.operator import DensityOperator, HatVectorField, VectorField
from app.models.polynomial import LambdaPoly, MultiPoly
from app.models.rational import format_rational
from app.models.symbol import DLOCoefficientTable, SymbolPoly
from app.services import densities, pencils, projective, sdiff
from app.services.dlo_solver import compare_with_reference
from app.services.lifting import LIFT_METHODS, TABLE_METHODS, VOLUME_METHODS, LiftParams, lift
from app.services.symbols import proj_generators


logger = logging.getLogger(__name__)

SECOND_ORDER_EXCLUDED = pencils.SINGULAR_SECOND_ORDER_WEIGHTS


# ============================================================================
# Random data
# ============================================================================

def random_rational(rng: random.Random, span: int = 3) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.choice((1, 1, 1, 2, 3)))


def random_weight(rng: random.Random, excluded=()) -> Fraction:
    while True:
        value = Fraction(rng.randint(-6, 6), rng.choice((1, 2, 3)))
        if value not in excluded:
            return value


def multi_indices(dim: int, max_total: int) -> list[tuple[int, ...]]:
    out = []
    for total in range(max_total + 1):
        for combo in combinations_with_replacement(range(dim), total):
            exp = [0] * dim
            for index in combo:
                exp[index] += 1
            out.append(tuple(exp))
    return out


def random_poly(rng: random.Random, dim: int, degree: int, terms: int = 3) -> MultiPoly:
    exponents = multi_indices(dim, degree)
    out = MultiPoly.zero(dim)
    for _ in range(terms):
        out = out + MultiPoly.monomial(rng.choice(exponents), rng.randint(-3, 3))
    return out


def random_operator(rng: random.Random, dim: int, order: int, degree: int = 2, w_degree: int = 0) -> DensityOperator:
    terms = {}
    for alpha in multi_indices(dim, order):
        for wpow in range(w_degree + 1):
            if rng.random() < 0.6:
                terms[(alpha, wpow)] = random_poly(rng, dim, degree, terms=2)
    return DensityOperator(dim, terms)


def random_field(rng: random.Random, dim: int, degree: int) -> VectorField:
    return VectorField(dim, tuple(random_poly(rng, dim, degree, terms=2) for _ in range(dim)))


def random_volume(rng: random.Random, dim: int, degree: int = 2) -> VolumeStructure:
    """Gamma = grad phi for a random polynomial potential phi."""
    return VolumeStructure.from_potential(random_poly(rng, dim, degree))


def divergence_free_field(rng: random.Random, vol: VolumeStructure, degree: int = 2) -> VectorField:
    """
    A field with div_rho X = 0: in dimension >= 2 it is built from a stream
    function chi in the (x1, x2) plane, X = (d2 chi - G2 chi, G1 chi - d1 chi, 0, ...).
    In dimension 1 only constant fields of the Lebesgue volume qualify.
    """
    dim = vol.dim
    if dim == 1:
        if not vol.gamma[0].is_zero():
            return VectorField.zero(1)
        return VectorField(1, (MultiPoly.constant(1, rng.randint(-3, 3)),))
    chi = random_poly(rng, dim, degree)
    g1, g2 = vol.gamma[0], vol.gamma[1]
    components = [chi.partial(2) - g2 * chi, g1 * chi - chi.partial(1)]
    components.extend(MultiPoly.zero(dim) for _ in range(dim - 2))
    return VectorField(dim, tuple(components))


def random_second_order_symbol(rng: random.Random, dim: int, degree: int = 2) -> PrincipalSymbolHat:
    S = [[MultiPoly.zero(dim)] * dim for _ in range(dim)]
    for i in range(dim):
        for k in range(i, dim):
            S[i][k] = S[k][i] = random_poly(rng, dim, degree, terms=2)
    B = [random_poly(rng, dim, degree, terms=2) for _ in range(dim)]
    return PrincipalSymbolHat.build(S, B, random_poly(rng, dim, degree, terms=2))


# ============================================================================
# Context and reports
# ============================================================================

@dataclass(frozen=True, kw_only=True)
class CheckContext:
    d: int
    n: int
    method: str | None = None
    tables: Callable[[int, int], DLOCoefficientTable] | None = field(default=None, compare=False)

    def table(self, n: int | None = None) -> DLOCoefficientTable:
        if self.tables is None:
            raise ParseError("no coefficient table provider configured")
        return self.tables(self.d, self.n if n is None else n)


@dataclass(frozen=True)
class TrialResult:
    index: int
    seed: int
    counterexample: dict | None = None

    @property
    def passed(self) -> bool:
        return self.counterexample is None


@dataclass(frozen=True)
class CheckReport:
    name: str
    method: str | None
    d: int
    n: int
    trials: tuple[TrialResult, ...]

    @property
    def passed(self) -> bool:
        return all(trial.passed for trial in self.trials)

    @property
    def failures(self) -> list[TrialResult]:
        return [trial for trial in self.trials if not trial.passed]


def _mismatch(what: str, expected, found, **extra) -> dict:
    detail = {"check": what, "expected": str(expected), "found": str(found)}
    detail.update({key: str(value) for key, value in extra.items()})
    return detail


def _fmt(value: Fraction) -> str:
    return format_rational(value)


# ============================================================================
# Properties
# ============================================================================

def _lift_params(rng: random.Random, method: str, ctx: CheckContext, delta: DensityOperator):
    """Random admissible parameters for ``method`` plus the weight used on the restricted side."""
    lam = random_weight(rng, SECOND_ORDER_EXCLUDED)
    n = ctx.n
    extra: dict = {}
    target = lam
    if method == "first-order":
        while True:
            p, q = random_rational(rng), random_rational(rng)
            if (p, q) != (0, 0) and p * lam + q != 0:
                break
        extra = {"p": p, "q": q}
    elif method == "first-order-affine":
        extra = {"c": random_rational(rng)}
    elif method == "iso":
        target = random_weight(rng, SECOND_ORDER_EXCLUDED)
        extra = {"mu": target}
    elif method in VOLUME_METHODS:
        vol = random_volume(rng, ctx.d) if ctx.d > 1 else VolumeStructure.lebesgue(1)
        extra = {"volume": vol, "n": n}
        if method in ("sdiff-family", "line"):
            extra["b"] = random_rational(rng)
        if method == "sdiff-family":
            extra["cvals"] = tuple(random_rational(rng) for _ in range(n))
            extra["dvals"] = tuple(random_rational(rng) for _ in range(n))
    elif method == "triangular":
        rows = []
        for i in range(n + 1):
            while True:
                row = tuple(random_rational(rng) for _ in range(i + 1))
                if sum(a * lam ** j for j, a in enumerate(row)) != 0:
                    break
            rows.append(row)
        extra = {"rows": tuple(rows)}
    elif method == "selfadj2":
        while True:
            p, q = random_rational(rng), random_rational(rng)
            if (p, q) != (0, 0) and p + q * lam * (lam - 1) != 0:
                break
        extra = {"p": p, "q": q}
    elif method == "dlo":
        extra = {"n": n}
    return LiftParams(lam=lam, tables=ctx.tables, **extra), target


def _input_order(method: str, ctx: CheckContext) -> int:
    if method in ("first-order", "first-order-affine"):
        return 1
    if method in ("canonical2", "iso", "selfadj2"):
        return 2
    return ctx.n


def check_equivariance(rng: random.Random, ctx: CheckContext) -> dict | None:
    """ad_K(lift(delta)) = lift(ad_K delta) for the fields the method is equivariant under."""
    method = ctx.method or "dlo"
    order = _input_order(method, ctx)
    delta = random_operator(rng, ctx.d, order)
    params, target = _lift_params(rng, method, ctx, delta)
    if method in TABLE_METHODS:
        fields = proj_generators(ctx.d)
    elif method in VOLUME_METHODS:
        fields = [divergence_free_field(rng, params.volume)]
    else:
        fields = [random_field(rng, ctx.d, 3), *proj_generators(ctx.d)]
    lifted = lift(delta, method, params)
    for k in fields:
        restricted_lie = None if method != "iso" else target
        lhs = densities.ad_action(k, lifted, restricted_lie)
        rhs = lift(densities.ad_action(k, delta, params.lam), method, params)
        if lhs != rhs:
            return _mismatch("equivariance", lhs, rhs, operator=delta, field=k.components, weight=_fmt(params.lam))
    return None


def check_adjoint(rng: random.Random, ctx: CheckContext) -> dict | None:
    """The adjoint is an involutive anti-homomorphism with d* = -d and w* = 1 - w."""
    d, order = ctx.d, min(ctx.n, 3)
    a = random_operator(rng, d, order, w_degree=1)
    b = random_operator(rng, d, order, w_degree=1)
    if densities.adjoint(densities.adjoint(a)) != a:
        return _mismatch("involution", a, densities.adjoint(densities.adjoint(a)))
    lhs = densities.adjoint(a.compose(b))
    rhs = densities.adjoint(b).compose(densities.adjoint(a))
    if lhs != rhs:
        return _mismatch("anti-homomorphism", rhs, lhs, a=a, b=b)
    w = DensityOperator.weight(d)
    if densities.adjoint(w) != DensityOperator.identity(d) - w:
        return _mismatch("weight", "1 - w", densities.adjoint(w))
    for i in range(1, d + 1):
        partial = DensityOperator.derivative(d, i)
        if densities.adjoint(partial) != -partial:
            return _mismatch("derivative", -partial, densities.adjoint(partial))
    return None


def check_divergence(rng: random.Random, ctx: CheckContext) -> dict | None:
    """div X = -(X + X*) and div L_X = 0."""
    x = random_field(rng, ctx.d, 3)
    hat = HatVectorField(x, random_poly(rng, ctx.d, 3))
    op = hat.to_operator()
    expected = -(op + densities.adjoint(op))
    if densities.divergence_hat(hat) != expected:
        return _mismatch("divergence", expected, densities.divergence_hat(hat), field=x.components)
    lie = densities.divergence_hat(densities.lie_lift_hat(x))
    if not lie.is_zero():
        return _mismatch("lie divergence", 0, lie, field=x.components)
    return None


def check_canonical2(rng: random.Random, ctx: CheckContext) -> dict | None:
    """The canonical second-order lift is self-adjoint, kills 1 and passes through delta."""
    delta = random_operator(rng, ctx.d, 2)
    lam = random_weight(rng, SECOND_ORDER_EXCLUDED)
    lifted = pencils.canonical_second_order_lift(delta, lam)
    if not densities.is_self_adjoint(lifted):
        return _mismatch("self-adjoint", lifted, densities.adjoint(lifted), operator=delta, weight=_fmt(lam))
    unit = densities.apply_to_unit(lifted)
    if not unit.is_zero():
        return _mismatch("normalization", 0, unit, operator=delta, weight=_fmt(lam))
    if densities.restrict(lifted, lam) != delta:
        return _mismatch("restriction", delta, densities.restrict(lifted, lam), weight=_fmt(lam))
    return None


def check_uniqueness(rng: random.Random, ctx: CheckContext) -> dict | None:
    """The only self-adjoint normalized operator with a given symbol is the canonical one."""
    sym = random_second_order_symbol(rng, min(ctx.d, 2))
    report = pencils.self_adjoint_normalized_solutions(sym, 2)
    expected = pencils.operator_from_symbol(sym)
    if report.kernel_rank != 0:
        return _mismatch("kernel rank", 0, report.kernel_rank, S=sym.S, B=sym.B, C=sym.C)
    if report.operator != expected:
        return _mismatch("uniqueness", expected, report.operator)
    return None


def check_iso(rng: random.Random, ctx: CheckContext) -> dict | None:
    """Closed form of the isomorphism and its action on L_X L_Y."""
    d = ctx.d
    lam = random_weight(rng, SECOND_ORDER_EXCLUDED)
    mu = random_weight(rng, SECOND_ORDER_EXCLUDED)
    delta = random_operator(rng, d, 2)
    via_lift = pencils.duval_ovsienko_iso(delta, lam, mu)
    closed = pencils.duval_ovsienko_closed_form(delta, lam, mu)
    if via_lift != closed:
        return _mismatch("closed form", via_lift, closed, operator=delta, weight=_fmt(lam), target=_fmt(mu))
    x, y = random_field(rng, d, 2), random_field(rng, d, 2)
    at = densities.lie_derivative
    product = at(x, lam).compose(at(y, lam))
    expected = at(x, mu).compose(at(y, mu)) + at(x.bracket(y), mu).scale((mu - lam) / (2 * lam - 1))
    found = pencils.duval_ovsienko_iso(product, lam, mu)
    if found != expected:
        return _mismatch("L_X L_Y", expected, found, X=x.components, Y=y.components)
    symmetrized = pencils.symmetrized_lift(x, y, lam)
    canonical = pencils.canonical_second_order_lift(product, lam)
    if symmetrized != canonical:
        return _mismatch("symmetrized", canonical, symmetrized, X=x.components, Y=y.components)
    return None


def check_inverse(rng: random.Random, ctx: CheckContext) -> dict | None:
    """The full symbol map and the quantization are mutually inverse."""
    table = ctx.table()
    lam = random_weight(rng)
    delta = random_operator(rng, ctx.d, ctx.n)
    back = projective.quantize(projective.full_symbol(delta, lam, table), lam, table)
    if back != delta:
        return _mismatch("quantize o symbol", delta, back, weight=_fmt(lam))
    sym = SymbolPoly.naive(random_operator(rng, ctx.d, ctx.n))
    again = projective.full_symbol(projective.quantize(sym, lam, table), lam, table)
    if again != sym:
        return _mismatch("symbol o quantize", sym, again, weight=_fmt(lam))
    return None


def _recurrence_failures(table: DLOCoefficientTable) -> list[str]:
    failures = []
    for k in range(table.max_order + 1):
        for p in range(1, k + 1):
            total = sum(
                (table.ctilde_at(k, p - i) * table.c_at(k - p + i, i) for i in range(p + 1)),
                LambdaPoly(),
            )
            if not total.is_zero():
                failures.append(f"k={k}, p={p}: {total.format('l')}")
    return failures


def check_recurrence(rng: random.Random, ctx: CheckContext) -> dict | None:
    """sum_i c~_{p-i}^(k) c_i^(k-p+i) = 0 for p > 0."""
    failures = _recurrence_failures(ctx.table())
    return {"check": "recurrence", "failures": failures} if failures else None


def check_distinguished(rng: random.Random, ctx: CheckContext) -> dict | None:
    """The distinguished lift has adjoint (-1)^n times itself and passes through delta."""
    n = ctx.n
    vol = random_volume(rng, ctx.d)
    lam = random_weight(rng, (Fraction(1, 2),))
    delta = random_operator(rng, ctx.d, n)
    lifted = sdiff.distinguished_lift(delta, n, lam, vol)
    expected = lifted if n % 2 == 0 else -lifted
    if densities.adjoint(lifted) != expected:
        return _mismatch("(anti-)self-adjoint", expected, densities.adjoint(lifted), operator=delta)
    if densities.restrict(lifted, lam) != delta:
        return _mismatch("restriction", delta, densities.restrict(lifted, lam), weight=_fmt(lam))
    return None


def check_volume_independence(rng: random.Random, ctx: CheckContext) -> dict | None:
    """The top two orders of the distinguished lift do not depend on the volume."""
    n = max(ctx.n, 2)
    lam = random_weight(rng, (Fraction(1, 2),))
    delta = random_operator(rng, ctx.d, n)
    first, second = random_volume(rng, ctx.d), random_volume(rng, ctx.d)
    difference = (
        sdiff.distinguished_lift(delta, n, lam, first)
        - sdiff.distinguished_lift(delta, n, lam, second)
    )
    top = sdiff.truncate_mod_vertical(difference, n - 2)
    if not top.is_zero():
        return _mismatch("volume independence", 0, top, operator=delta, weight=_fmt(lam))
    return None


def check_schwarzian(rng: random.Random, ctx: CheckContext) -> dict | None:
    """The Schwarzian scalar transforms as a function under proj(R^d)."""
    d = ctx.d
    lam = random_weight(rng)
    delta = random_operator(rng, d, 2)
    value = projective.schwarzian_scalar(delta, lam, d)
    for k in proj_generators(d):
        lhs = projective.schwarzian_scalar(densities.ad_action(k, delta, lam), lam, d)
        rhs = k.act(value)
        if lhs != rhs:
            return _mismatch("scalar law", rhs, lhs, operator=delta, field=k.components, weight=_fmt(lam))
    return None


def check_table(rng: random.Random, ctx: CheckContext) -> dict | None:
    """The solved table agrees with the closed forms and satisfies the recurrence."""
    table = ctx.table()
    failures = compare_with_reference(table) + _recurrence_failures(table)
    return {"check": "table", "failures": failures} if failures else None


CHECKS: dict[str, Callable[[random.Random, CheckContext], dict | None]] = {
    "equivariance": check_equivariance,
    "adjoint": check_adjoint,
    "divergence": check_divergence,
    "canonical2": check_canonical2,
    "uniqueness": check_uniqueness,
    "iso": check_iso,
    "inverse": check_inverse,
    "recurrence": check_recurrence,
    "distinguished": check_distinguished,
    "volume-independence": check_volume_independence,
    "schwarzian": check_schwarzian,
    "table": check_table,
}


# ============================================================================
# Runner
# ============================================================================

def _run_trial(prop, ctx: CheckContext, index: int, seed: int) -> TrialResult:
    trial_seed = seed + index
    try:
        counterexample = prop(random.Random(trial_seed), ctx)
    except DensopsError as exc:
        counterexample = {"check": "error", "error": exc.to_dict()}
    if counterexample is not None:
        logger.info("Counterexample in trial %d (seed %d): %s", index, trial_seed, counterexample)
    return TrialResult(index=index, seed=trial_seed, counterexample=counterexample)


def run_check(
    name: str,
    *,
    method: str | None = None,
    d: int = 1,
    n: int = 2,
    trials: int | None = None,
    seed: int | None = None,
    tables: Callable[[int, int], DLOCoefficientTable] | None = None,
    workers: int | None = None,
) -> CheckReport:
    """Run ``trials`` independent trials of a named property."""
    if name not in CHECKS:
        raise ParseError(f"unknown property '{name}'; expected one of {', '.join(CHECKS)}")
    if method is not None and method not in LIFT_METHODS:
        raise ParseError(f"unknown lifting method '{method}'")
    if d < 1 or n < 0:
        raise ParseError(f"invalid check dimensions d={d}, n={n}")
    trials = trials if trials is not None else settings.CHECK_TRIALS
    seed = seed if seed is not None else settings.CHECK_SEED
    workers = workers if workers is not None else settings.CHECK_WORKERS
    ctx = CheckContext(d=d, n=n, method=method, tables=tables)
    prop = CHECKS[name]

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        futures = [pool.submit(_run_trial, prop, ctx, index, seed) for index in range(trials)]
        results = tuple(future.result() for future in futures)
    return CheckReport(name=name, method=method, d=d, n=n, trials=results)
