import asyncio

from fastapi import APIRouter, HTTPException
from loguru import logger

from tuned_quant.models.operator import SpectrumRequest
from tuned_quant.services.reports import run_spectrum
from tuned_quant.services.spectral import SpectrumReport

router = APIRouter(prefix="/spectrum", tags=["spectrum"])


@router.post("")
async def spectrum(request: SpectrumRequest) -> SpectrumReport:
    try:
        return await asyncio.to_thread(run_spectrum, request)
    except ValueError as exc:
        logger.warning("Spectrum request rejected params={!r} error={}", request.params, str(exc))
        raise HTTPException(status_code=400, detail=str(exc)) from exc
