from fastapi import APIRouter

from app.schemas.commands import AdjointRequest, ApplyRequest, ComposeRequest, RestrictRequest
from app.schemas.operator import DensitySchema, OperatorSchema
from app.services.commands import (
    Inputs,
    execute_adjoint,
    execute_apply,
    execute_compose,
    execute_restrict,
)


router = APIRouter(prefix="/operators", tags=["operators"])


@router.post("/compose", response_model=OperatorSchema)
async def compose(data: ComposeRequest):
    """Normal-ordered product a o b."""
    return OperatorSchema.from_model(execute_compose(data, Inputs()))


@router.post("/adjoint", response_model=OperatorSchema)
async def adjoint(data: AdjointRequest):
    """Canonical adjoint (d* = -d, w* = 1 - w)."""
    return OperatorSchema.from_model(execute_adjoint(data, Inputs()))


@router.post("/restrict", response_model=OperatorSchema)
async def restrict(data: RestrictRequest):
    """Restriction of a pencil to w = lambda."""
    return OperatorSchema.from_model(execute_restrict(data, Inputs()))


@router.post("/apply", response_model=DensitySchema)
async def apply(data: ApplyRequest):
    """Apply an operator to a sum of densities of different weights."""
    return DensitySchema.from_model(execute_apply(data, Inputs()))
