from fastapi import APIRouter, Depends, Path, Query
from starlette.concurrency import run_in_threadpool

from app.dependencies.tables import get_tables
from app.schemas.table import TableSchema
from app.tables import TableRegistry


router = APIRouter(prefix="/tables", tags=["tables"])


@router.get("/{d}/{n}", response_model=TableSchema)
async def get_table(
    d: int = Path(..., ge=1, le=8),
    n: int = Path(..., ge=0, le=8),
    verify: bool = Query(False),
    tables: TableRegistry = Depends(get_tables),
):
    """
    Coefficient table c_r^(k), c~_r^(k) for dimension d and orders up to n.
    Use verify=true to re-solve and compare with the cached table.
    """
    solve = tables.verify if verify else tables.get
    table = await run_in_threadpool(solve, d, n)
    return TableSchema.from_model(table)
