from fastapi import APIRouter, Depends
from starlette.concurrency import run_in_threadpool

from app.dependencies.tables import get_tables
from app.schemas.commands import QuantizeRequest, SchwarzianRequest, SymbolRequest
from app.schemas.operator import OperatorSchema, PolynomialSchema, SymbolSchema
from app.services.commands import Inputs, execute_quantize, execute_schwarzian, execute_symbol
from app.tables import TableRegistry


router = APIRouter(prefix="/symbols", tags=["symbols"])


@router.post("/full", response_model=SymbolSchema)
async def full_symbol(
    data: SymbolRequest,
    tables: TableRegistry = Depends(get_tables),
):
    """Projectively equivariant full symbol of an operator on weight-lambda densities."""
    sym = await run_in_threadpool(execute_symbol, data, Inputs(), tables)
    return SymbolSchema.from_model(sym)


@router.post("/quantize", response_model=OperatorSchema)
async def quantize(
    data: QuantizeRequest,
    tables: TableRegistry = Depends(get_tables),
):
    """Projectively equivariant quantization at weight mu."""
    op = await run_in_threadpool(execute_quantize, data, Inputs(), tables)
    return OperatorSchema.from_model(op)


@router.post("/schwarzian", response_model=PolynomialSchema)
async def schwarzian(data: SchwarzianRequest):
    """Projectively invariant scalar of a second-order operator."""
    return PolynomialSchema.from_model(execute_schwarzian(data, Inputs()))
