import csv
import io
from uuid import uuid4

from fastapi import APIRouter, HTTPException, Request
from fastapi.responses import Response, StreamingResponse
from loguru import logger

from tuned_quant.config import Settings, settings
from tuned_quant.models.check import SuiteProgressEvent, SuiteReport
from tuned_quant.services.state import remember, suite_store
from tuned_quant.services.suite import CHECKS, iter_suite

router = APIRouter(prefix="/check-suite", tags=["check-suite"])


@router.post("")
async def run_check_suite_stream(request: Request) -> StreamingResponse:
    app_settings: Settings = getattr(request.app.state, "settings", settings)
    run_id = str(uuid4())
    checks = getattr(request.app.state, "checks", CHECKS)
    total = len(checks)
    logger.info("Check suite requested run_id={} total_checks={}", run_id, total)

    async def event_stream():
        completed = 0
        finished = {}

        async for index, result in iter_suite(app_settings, checks):
            completed += 1
            finished[index] = result
            logger.info(
                "Check suite progress run_id={} name={} status={} progress={}/{}",
                run_id,
                result.name,
                result.status.value,
                completed,
                total,
            )
            event = SuiteProgressEvent(run_id=run_id, completed=completed, total=total, result=result)
            yield f"data: {event.model_dump_json()}\n\n"

        remember(
            SuiteReport(
                run_id=run_id,
                total=total,
                completed=completed,
                results=[finished[i] for i in sorted(finished)],
            ),
            app_settings.max_stored_runs,
        )
        logger.info("Check suite finished run_id={} completed={}", run_id, completed)
        yield "event: done\ndata: done\n\n"

    return StreamingResponse(event_stream(), media_type="text/event-stream")


@router.get("/{run_id}/export.csv")
async def export_suite_csv(run_id: str) -> Response:
    snapshot = suite_store.get(run_id)
    if not snapshot:
        logger.warning("CSV export missing run_id={}", run_id)
        raise HTTPException(status_code=404, detail="Run not found")

    output = io.StringIO()
    writer = csv.writer(output)
    writer.writerow(["run_id", "name", "status", "detail", "reference", "duration_ms"])
    for result in snapshot.results:
        writer.writerow(
            [
                snapshot.run_id,
                result.name,
                result.status.value,
                result.detail,
                result.reference or "",
                f"{result.duration_ms:.2f}",
            ]
        )

    headers = {"Content-Disposition": f'attachment; filename="check-suite-{run_id}.csv"'}
    logger.info("CSV export generated run_id={} rows={}", run_id, len(snapshot.results))
    return Response(content=output.getvalue(), media_type="text/csv", headers=headers)
