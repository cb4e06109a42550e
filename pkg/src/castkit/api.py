"""HTTP front end over the service functions."""

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from . import __version__, service
from .service import (DiffRequest, DiffResponse, ErrorBody, MeasureRequest,
                      MeasureResponse, RunRequest, RunResponse, ServiceError)

app = FastAPI(title="castkit", version=__version__)


@app.exception_handler(ServiceError)
async def service_error(request, exc: ServiceError):
    body = ErrorBody(kind=exc.kind, message=exc.message, exit_code=exc.exit_code)
    return JSONResponse(status_code=400, content=body.model_dump())


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/run", response_model=RunResponse, responses={400: {"model": ErrorBody}})
def run(req: RunRequest):
    return service.run(req)


@app.post("/measure", response_model=MeasureResponse, responses={400: {"model": ErrorBody}})
def measure(req: MeasureRequest):
    return service.measure(req)


@app.post("/diff", response_model=DiffResponse, responses={400: {"model": ErrorBody}})
def diff(req: DiffRequest):
    return service.diff(req)
