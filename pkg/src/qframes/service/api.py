"""FastAPI app exposing every command at ``POST /run/{command}``."""
from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import QFramesError
from .handlers import COMMANDS, ConfigError, run_command
from .schemas import REQUESTS, RunResponse


def create_app() -> FastAPI:
    app = FastAPI(title="qframes", version=__version__)

    @app.exception_handler(QFramesError)
    async def _domain(_: Request, exc: QFramesError):
        return JSONResponse(status_code=400, content={"error": exc.name, "detail": str(exc)})

    @app.exception_handler(ConfigError)
    async def _config(_: Request, exc: ConfigError):
        return JSONResponse(status_code=422, content={"error": "ConfigError", "detail": str(exc)})

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.get("/commands")
    def commands() -> dict:
        return {name: REQUESTS[name].model_json_schema() for name in COMMANDS}

    @app.post("/run/{command}", response_model=RunResponse)
    def run(command: str, payload: dict) -> RunResponse:
        if command not in REQUESTS:
            return JSONResponse(status_code=404, content={"error": "UnknownCommand", "detail": command})
        return RunResponse(command=command, records=run_command(command, payload))

    return app


app = create_app()
