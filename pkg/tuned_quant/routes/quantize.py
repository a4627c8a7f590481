import asyncio

from fastapi import APIRouter

from tuned_quant.models.operator import (
    CommuteReport,
    CommuteRequest,
    OperatorReport,
    QuantizeRequest,
    TransformReport,
    TransformRequest,
)
from tuned_quant.services.reports import run_commute, run_quantize, run_transform

router = APIRouter(tags=["quantize"])


@router.post("/quantize")
async def quantize_expression(request: QuantizeRequest) -> OperatorReport:
    return await asyncio.to_thread(run_quantize, request)


@router.post("/commute")
async def commute_expressions(request: CommuteRequest) -> CommuteReport:
    return await asyncio.to_thread(run_commute, request)


@router.post("/transform")
async def transform_expression(request: TransformRequest) -> TransformReport:
    return await asyncio.to_thread(run_transform, request)
