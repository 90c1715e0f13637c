"""
The command driver: one verb, its validated options, and stdin in; exit code
and output text out.

Exit codes: 0 on success, 1 when a ``check`` finds a counterexample, 2 on any
domain error (the error envelope is still printed on stdout).
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from pydantic import BaseModel, ConfigDict, ValidationError

from app.config import settings
from app.exceptions import DensopsError, DimensionError, ParseError
from app.models.operator import DensityOperator, QuasiDensity
from app.models.polynomial import MultiPoly
from app.models.symbol import SymbolPoly
from app.schemas.base import BaseSchema, Dimension, rational
from app.schemas.commands import (
    AdjointOptions,
    AdjointRequest,
    ApplyOptions,
    ApplyRequest,
    CheckOptions,
    CheckReportSchema,
    ComposeOptions,
    ComposeRequest,
    DecomposeOptions,
    DecomposeRequest,
    DecomposeResult,
    ErrorResponse,
    LiftOptions,
    LiftRequest,
    MatrixFile,
    QuantizeOptions,
    QuantizeRequest,
    RestrictOptions,
    RestrictRequest,
    SchwarzianOptions,
    SchwarzianRequest,
    SymbolOptions,
    SymbolRequest,
    TableOptions,
    TrialFailure,
)
from app.schemas.geometry import VolumeSchema
from app.schemas.operator import DensitySchema, OperatorSchema, PolynomialSchema, SymbolSchema
from app.schemas.table import TableSchema
from app.services import densities, projective
from app.services.checks import CheckReport, run_check
from app.services.lifting import LiftParams, lift, resolve_order
from app.services.parser import (
    format_density,
    format_operator,
    format_polynomial,
    format_symbol,
    infer_dim,
    operator_to_latex,
    parse_density,
    parse_operator,
    parse_symbol,
)
from app.tables import TableRegistry, get_table_registry


logger = logging.getLogger(__name__)

VERB_OPTIONS: dict[str, type[BaseSchema]] = {
    "compose": ComposeOptions,
    "adjoint": AdjointOptions,
    "restrict": RestrictOptions,
    "apply": ApplyOptions,
    "lift": LiftOptions,
    "decompose": DecomposeOptions,
    "symbol": SymbolOptions,
    "quantize": QuantizeOptions,
    "check": CheckOptions,
    "schwarzian": SchwarzianOptions,
    "table": TableOptions,
}


@dataclass(frozen=True)
class Command:
    verb: str
    options: dict = field(default_factory=dict)


class _Dimensioned(BaseModel):
    model_config = ConfigDict(extra="ignore")

    dim: Dimension


# ============================================================================
# Inputs
# ============================================================================

def validation_message(exc: ValidationError) -> str:
    parts = []
    for error in exc.errors():
        where = ".".join(str(loc) for loc in error["loc"]) or "input"
        parts.append(f"{where}: {error['msg']}")
    return "; ".join(parts)


def parse_options(cmd: Command) -> BaseSchema:
    """Validate the flag map of a command; unknown flags are rejected."""
    schema = VERB_OPTIONS.get(cmd.verb)
    if schema is None:
        raise ParseError(f"unknown verb '{cmd.verb}'; expected one of {', '.join(VERB_OPTIONS)}")
    options = {key: value for key, value in cmd.options.items() if value is not None}
    try:
        return schema.model_validate(options)
    except ValidationError as exc:
        raise ParseError(f"invalid options for '{cmd.verb}': {validation_message(exc)}") from None


@dataclass
class Inputs:
    """Resolves option values, where "-" stands for the whole of stdin."""

    stdin: bytes = b""

    def text(self, value: str) -> str:
        if value != "-":
            return value
        try:
            return self.stdin.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"stdin is not valid UTF-8: {exc.reason}") from None


def is_json(text: str) -> bool:
    return text.lstrip().startswith("{")


def _validate_json(schema: type[BaseModel], text: str):
    try:
        return schema.model_validate_json(text)
    except ValidationError as exc:
        raise ParseError(f"invalid {schema.__name__} JSON: {validation_message(exc)}") from None


def dimension(d: int | None, *sources: str) -> int:
    """The given d, or the largest dimension any source declares or uses."""
    if d is not None:
        return d
    dims = [
        _validate_json(_Dimensioned, src).dim if is_json(src) else infer_dim(src)
        for src in sources
    ]
    return max(dims, default=1)


def _checked(model, d: int):
    if model.dim != d:
        raise DimensionError(f"input has dimension {model.dim}, expected {d}")
    return model


def read_operator(text: str, d: int) -> DensityOperator:
    if is_json(text):
        return _checked(_validate_json(OperatorSchema, text).to_model(), d)
    return parse_operator(text, d)


def read_symbol(text: str, d: int) -> SymbolPoly:
    if is_json(text):
        return _checked(_validate_json(SymbolSchema, text).to_model(), d)
    return parse_symbol(text, d)


def read_density(text: str, d: int) -> QuasiDensity:
    if is_json(text):
        return _checked(_validate_json(DensitySchema, text).to_model(), d)
    return parse_density(text, d)


def read_file(path: Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None


# ============================================================================
# Outputs
# ============================================================================

def render_operator(op: DensityOperator, fmt: str) -> str:
    if fmt == "dsl":
        return format_operator(op)
    if fmt == "latex":
        return operator_to_latex(op)
    return OperatorSchema.from_model(op).model_dump_json()


def render_report(report: CheckReport) -> str:
    return CheckReportSchema(
        property=report.name,
        method=report.method,
        d=report.d,
        n=report.n,
        trials=len(report.trials),
        passed=report.passed,
        failures=[
            TrialFailure(trial=t.index, seed=t.seed, detail=t.counterexample)
            for t in report.failures
        ],
    ).model_dump_json()


def render_error(exc: DensopsError) -> str:
    return ErrorResponse.model_validate({"error": exc.to_dict()}).model_dump_json(exclude_none=True)


# ============================================================================
# Verbs
# ============================================================================

def execute_compose(req: ComposeRequest, inputs: Inputs) -> DensityOperator:
    a_text, b_text = inputs.text(req.a), inputs.text(req.b)
    d = dimension(req.d, a_text, b_text)
    return densities.compose(read_operator(a_text, d), read_operator(b_text, d))


def execute_adjoint(req: AdjointRequest, inputs: Inputs) -> DensityOperator:
    text = inputs.text(req.op)
    return densities.adjoint(read_operator(text, dimension(req.d, text)))


def execute_restrict(req: RestrictRequest, inputs: Inputs) -> DensityOperator:
    text = inputs.text(req.op)
    return densities.restrict(read_operator(text, dimension(req.d, text)), rational(req.lam))


def execute_apply(req: ApplyRequest, inputs: Inputs) -> QuasiDensity:
    op_text, density_text = inputs.text(req.op), inputs.text(req.density)
    d = dimension(req.d, op_text, density_text)
    return densities.apply(read_operator(op_text, d), read_density(density_text, d))


def lift_params(req: LiftRequest, d: int, tables: TableRegistry) -> LiftParams:
    """Turn validated lift options into the parameters of ``lifting.lift``."""
    volume = None
    gamma_file = getattr(req, "gamma_file", None)
    if gamma_file is not None:
        volume = _checked(_validate_json(VolumeSchema, read_file(gamma_file)).to_model(), d)
    elif req.gamma is not None or req.potential is not None:
        volume = VolumeSchema(dim=d, gamma=req.gamma, potential=req.potential).to_model()

    rows = req.rows
    matrix_file = getattr(req, "matrix_file", None)
    if matrix_file is not None:
        rows = _validate_json(MatrixFile, read_file(matrix_file)).rows

    def optional(value):
        return rational(value) if value is not None else None

    return LiftParams(
        lam=rational(req.lam),
        p=optional(req.p),
        q=optional(req.q),
        c=optional(req.c),
        mu=optional(req.mu),
        b=optional(req.b),
        n=req.n,
        cvals=tuple(rational(v) for v in req.cvals),
        dvals=tuple(rational(v) for v in req.dvals),
        rows=tuple(tuple(rational(v) for v in row) for row in rows) if rows else None,
        volume=volume,
        tables=tables.get,
    )


def execute_lift(req: LiftRequest, inputs: Inputs, tables: TableRegistry) -> DensityOperator:
    text = inputs.text(req.op)
    d = dimension(req.d, text)
    result = lift(read_operator(text, d), req.method, lift_params(req, d, tables))
    logger.debug("lift %s at %s: %d terms", req.method, req.lam, len(result.terms))
    return result


def execute_decompose(req: DecomposeRequest, inputs: Inputs, tables: TableRegistry) -> list[DensityOperator]:
    text = inputs.text(req.op)
    d = dimension(req.d, text)
    delta = read_operator(text, d)
    n = resolve_order(req.n, delta.spatial_order)
    return projective.graded_decompose(delta, rational(req.lam), tables.get(d, n), n)


def execute_symbol(req: SymbolRequest, inputs: Inputs, tables: TableRegistry) -> SymbolPoly:
    text = inputs.text(req.op)
    d = dimension(req.d, text)
    delta = read_operator(text, d)
    n = resolve_order(req.n, delta.spatial_order)
    return projective.full_symbol(delta, rational(req.lam), tables.get(d, n))


def execute_quantize(req: QuantizeRequest, inputs: Inputs, tables: TableRegistry) -> DensityOperator:
    text = inputs.text(req.symbol)
    d = dimension(req.d, text)
    sym = read_symbol(text, d)
    n = resolve_order(req.n, sym.degree)
    return projective.quantize(sym, rational(req.mu), tables.get(d, n))


def execute_schwarzian(req: SchwarzianRequest, inputs: Inputs) -> MultiPoly:
    text = inputs.text(req.op)
    d = dimension(req.d, text)
    return projective.schwarzian_scalar(read_operator(text, d), rational(req.lam), d)


# ============================================================================
# CLI handlers
# ============================================================================

Handler = Callable[[BaseSchema, Inputs, TableRegistry], tuple[int, str]]


def _compose(options: ComposeOptions, inputs: Inputs, tables: TableRegistry):
    return 0, render_operator(execute_compose(options, inputs), options.format)


def _adjoint(options: AdjointOptions, inputs: Inputs, tables: TableRegistry):
    return 0, render_operator(execute_adjoint(options, inputs), options.format)


def _restrict(options: RestrictOptions, inputs: Inputs, tables: TableRegistry):
    return 0, render_operator(execute_restrict(options, inputs), options.format)


def _apply(options: ApplyOptions, inputs: Inputs, tables: TableRegistry):
    result = execute_apply(options, inputs)
    if options.format == "dsl":
        return 0, format_density(result)
    return 0, DensitySchema.from_model(result).model_dump_json()


def _lift(options: LiftOptions, inputs: Inputs, tables: TableRegistry):
    return 0, render_operator(execute_lift(options, inputs, tables), options.format)


def _decompose(options: DecomposeOptions, inputs: Inputs, tables: TableRegistry):
    components = execute_decompose(options, inputs, tables)
    if options.format != "json":
        return 0, "\n".join(render_operator(component, options.format) for component in components)
    result = DecomposeResult(
        dim=components[0].dim,
        lam=options.lam,
        components=[OperatorSchema.from_model(component) for component in components],
    )
    return 0, result.model_dump_json()


def _symbol(options: SymbolOptions, inputs: Inputs, tables: TableRegistry):
    sym = execute_symbol(options, inputs, tables)
    if options.format == "dsl":
        return 0, format_symbol(sym)
    return 0, SymbolSchema.from_model(sym).model_dump_json()


def _quantize(options: QuantizeOptions, inputs: Inputs, tables: TableRegistry):
    return 0, render_operator(execute_quantize(options, inputs, tables), options.format)


def _check(options: CheckOptions, inputs: Inputs, tables: TableRegistry):
    report = run_check(
        options.property,
        method=options.method,
        d=options.d or 1,
        n=options.n,
        trials=options.trials,
        seed=options.seed,
        tables=tables.get,
    )
    if not report.passed:
        logger.warning("%s: %d of %d trials failed", report.name, len(report.failures), len(report.trials))
    return (0 if report.passed else 1), render_report(report)


def _schwarzian(options: SchwarzianOptions, inputs: Inputs, tables: TableRegistry):
    scalar = execute_schwarzian(options, inputs)
    if options.format == "dsl":
        return 0, format_polynomial(scalar)
    return 0, PolynomialSchema.from_model(scalar).model_dump_json()


def _table(options: TableOptions, inputs: Inputs, tables: TableRegistry):
    d = options.d or 1
    n = options.n if options.n is not None else settings.DEFAULT_MAX_ORDER
    table = tables.verify(d, n) if options.verify else tables.get(d, n)
    return 0, TableSchema.from_model(table).model_dump_json()


HANDLERS: dict[str, Handler] = {
    "compose": _compose,
    "adjoint": _adjoint,
    "restrict": _restrict,
    "apply": _apply,
    "lift": _lift,
    "decompose": _decompose,
    "symbol": _symbol,
    "quantize": _quantize,
    "check": _check,
    "schwarzian": _schwarzian,
    "table": _table,
}


def run(cmd: Command, stdin: bytes = b"", tables: TableRegistry | None = None) -> tuple[int, str]:
    """Execute one command and return (exit code, stdout text)."""
    try:
        options = parse_options(cmd)
        return HANDLERS[cmd.verb](options, Inputs(stdin), tables or get_table_registry())
    except DensopsError as exc:
        logger.info("%s failed: %s", cmd.verb, exc.message)
        return 2, render_error(exc)
