import sys
import time
from contextlib import asynccontextmanager
from uuid import uuid4

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response
from loguru import logger

from tuned_quant.config import Settings, settings
from tuned_quant.routes.health import router as health_router
from tuned_quant.routes.quantize import router as quantize_router
from tuned_quant.routes.spectrum import router as spectrum_router
from tuned_quant.routes.suite import router as suite_router
from tuned_quant.services.errors import TunedQuantError

LOG_FORMAT = "{time:YYYY-MM-DD HH:mm:ss.SSS} | {level} | req={extra[request_id]} | {name}:{function}:{line} | {message}"


def configure_logging(app_settings: Settings) -> None:
    """Single stderr sink; shared by the API lifespan and the CLI."""
    logger.configure(patcher=lambda record: record["extra"].setdefault("request_id", "-"))
    logger.remove()
    logger.add(sys.stderr, level=app_settings.log_level.upper(), format=LOG_FORMAT, diagnose=app_settings.debug)


@asynccontextmanager
async def lifespan(app: FastAPI):
    configure_logging(settings)
    app.state.settings = settings
    logger.info(
        "Starting app app_name={} log_level={} default_n={} metric_kind={} max_concurrency={}",
        settings.app_name,
        settings.log_level,
        settings.default_n,
        settings.metric_kind,
        settings.max_concurrency,
    )
    yield
    logger.info("Shutting down app app_name={}", settings.app_name)


app = FastAPI(title=settings.app_name, debug=settings.debug, lifespan=lifespan)

for router in (health_router, quantize_router, spectrum_router, suite_router):
    app.include_router(router)


@app.exception_handler(TunedQuantError)
async def engine_error_handler(request: Request, exc: TunedQuantError) -> JSONResponse:
    logger.warning("Request rejected path={} error_type={} error={}", request.url.path, type(exc).__name__, str(exc))
    return JSONResponse(status_code=400, content={"detail": str(exc), "error_type": type(exc).__name__})


@app.middleware("http")
async def add_request_context(request: Request, call_next) -> Response:
    # Engine modules log through the global logger; contextualize tags their lines too.
    request_id = request.headers.get("x-request-id") or uuid4().hex
    start = time.perf_counter()
    with logger.contextualize(request_id=request_id):
        logger.info("Request start method={} path={}", request.method, request.url.path)
        try:
            response = await call_next(request)
        except Exception:
            logger.exception("Request failed method={} path={}", request.method, request.url.path)
            raise
        logger.info(
            "Request finish method={} path={} status={} duration_ms={:.2f}",
            request.method,
            request.url.path,
            response.status_code,
            (time.perf_counter() - start) * 1000,
        )
    response.headers["X-Request-ID"] = request_id
    return response
