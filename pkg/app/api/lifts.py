from fastapi import APIRouter, Depends
from starlette.concurrency import run_in_threadpool

from app.dependencies.tables import get_tables
from app.schemas.commands import DecomposeRequest, DecomposeResult, LiftRequest
from app.schemas.operator import OperatorSchema
from app.services.commands import Inputs, execute_decompose, execute_lift
from app.tables import TableRegistry


router = APIRouter(prefix="/lifts", tags=["lifts"])


@router.post("/decompose", response_model=DecomposeResult)
async def decompose(
    data: DecomposeRequest,
    tables: TableRegistry = Depends(get_tables),
):
    """
    Split an operator into its projectively graded pieces.
    Pieces are listed from the top order down to order 0.
    """
    components = await run_in_threadpool(execute_decompose, data, Inputs(), tables)
    return DecomposeResult(
        dim=components[0].dim,
        lam=data.lam,
        components=[OperatorSchema.from_model(c) for c in components],
    )


@router.post("/{method}", response_model=OperatorSchema)
async def lift(
    method: str,
    data: LiftRequest,
    tables: TableRegistry = Depends(get_tables),
):
    """
    Lift an operator on weight-lambda densities to a pencil.
    The method in the path overrides the one in the body.
    """
    data = data.model_copy(update={"method": method})
    result = await run_in_threadpool(execute_lift, data, Inputs(), tables)
    return OperatorSchema.from_model(result)
