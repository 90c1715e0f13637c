from pathlib import Path
from typing import List, Literal, Optional

from pydantic import Field

from app.schemas.base import BaseSchema, Dimension, Order, RationalText
from app.schemas.operator import OperatorSchema


OutputFormat = Literal["json", "dsl", "latex"]
TextFormat = Literal["json", "dsl"]


# ============================================================================
# Requests (HTTP bodies; the CLI options below extend them)
# ============================================================================

class CommandBase(BaseSchema):
    """Fields shared by every verb. ``d`` is inferred from the inputs when omitted."""

    d: Optional[Dimension] = None


class ComposeRequest(CommandBase):
    a: str
    b: str


class AdjointRequest(CommandBase):
    op: str


class RestrictRequest(CommandBase):
    op: str
    lam: RationalText


class ApplyRequest(CommandBase):
    op: str
    density: str


class LiftRequest(CommandBase):
    """Operator, weight and the parameters of one lifting method."""

    method: Optional[str] = None
    op: str
    lam: RationalText
    p: Optional[RationalText] = None
    q: Optional[RationalText] = None
    c: Optional[RationalText] = None
    mu: Optional[RationalText] = None
    b: Optional[RationalText] = None
    n: Optional[Order] = None
    cvals: List[RationalText] = []
    dvals: List[RationalText] = []
    rows: Optional[List[List[RationalText]]] = None
    gamma: Optional[List[str]] = None
    potential: Optional[str] = None


class DecomposeRequest(CommandBase):
    op: str
    lam: RationalText
    n: Optional[Order] = None


class SymbolRequest(CommandBase):
    op: str
    lam: RationalText
    n: Optional[Order] = None


class QuantizeRequest(CommandBase):
    symbol: str
    mu: RationalText
    n: Optional[Order] = None


class SchwarzianRequest(CommandBase):
    op: str
    lam: RationalText


class MatrixFile(BaseSchema):
    """Lower-triangular rows a_ij of a triangular family, as read from --matrix-file."""

    rows: List[List[RationalText]]


# ============================================================================
# CLI options
# ============================================================================

class OperatorOutput(BaseSchema):
    format: OutputFormat = "json"


class TextOutput(BaseSchema):
    format: TextFormat = "json"


class ComposeOptions(ComposeRequest, OperatorOutput):
    pass


class AdjointOptions(AdjointRequest, OperatorOutput):
    pass


class RestrictOptions(RestrictRequest, OperatorOutput):
    pass


class ApplyOptions(ApplyRequest, TextOutput):
    pass


class LiftOptions(LiftRequest, OperatorOutput):
    """Lift flags, which may also point at JSON files."""

    gamma_file: Optional[Path] = None
    matrix_file: Optional[Path] = None


class DecomposeOptions(DecomposeRequest, OperatorOutput):
    pass


class SymbolOptions(SymbolRequest, TextOutput):
    pass


class QuantizeOptions(QuantizeRequest, OperatorOutput):
    pass


class SchwarzianOptions(SchwarzianRequest, TextOutput):
    pass


class CheckOptions(CommandBase):
    property: str
    method: Optional[str] = None
    n: Order = 2
    trials: Optional[int] = Field(None, ge=1, le=100000)
    seed: Optional[int] = None


class TableOptions(CommandBase):
    n: Optional[Order] = None
    verify: bool = False


# ============================================================================
# Results
# ============================================================================

class DecomposeResult(BaseSchema):
    """Graded pieces Delta_n, ..., Delta_0 of an operator."""

    dim: Dimension
    lam: RationalText
    components: List[OperatorSchema]


class TrialFailure(BaseSchema):
    trial: int
    seed: int
    detail: dict


class CheckReportSchema(BaseSchema):
    property: str
    method: Optional[str] = None
    d: int
    n: int
    trials: int
    passed: bool
    failures: List[TrialFailure] = []


class ErrorBody(BaseSchema):
    code: str
    message: str
    line: Optional[int] = None
    column: Optional[int] = None


class ErrorResponse(BaseSchema):
    error: ErrorBody
