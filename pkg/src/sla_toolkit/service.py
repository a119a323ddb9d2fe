"""HTTP facade over the catalog, validator, and store.

Every endpoint is a thin composition of library operations and holds no
mutable in-process state: the catalog is immutable after startup and all
document state lives under the store root. Error bodies are
``{"code", "message"}``; validation reports are returned with status 200
(the report is the resource) while creation refuses invalid documents
with 422.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import FileResponse, JSONResponse, PlainTextResponse

from . import catalog as catalog_mod
from .catalog import Catalog
from .composer import parse, validate_document
from .errors import (
    ActivityNotFound,
    CorruptDocument,
    DocumentNotFound,
    JsonSyntaxError,
    SchemaShapeError,
    SchemaVersionUnsupported,
    StoreLocked,
)
from .store import DocumentStore

DEFAULT_BODY_LIMIT = 1024 * 1024  # 1 MiB


@dataclass(frozen=True)
class ServiceConfig:
    catalog_path: Path
    store_path: Path
    bind_address: str = "127.0.0.1:8000"
    request_body_limit: int = DEFAULT_BODY_LIMIT
    assets_path: Path | None = None
    cors_origins: tuple[str, ...] = field(default=())

    def host_port(self) -> tuple[str, int]:
        host, sep, port = self.bind_address.rpartition(":")
        if not sep or not port.isdigit():
            raise ValueError(f"bind_address must be host:port, got {self.bind_address!r}")
        return host or "127.0.0.1", int(port)


def _error_response(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse({"code": code, "message": message}, status_code=status)


def create_app(config: ServiceConfig) -> FastAPI:
    """Build the application; loads (and thereby validates) the catalog."""
    if config.request_body_limit <= 0:
        raise ValueError("request_body_limit must be positive")
    catalog: Catalog = catalog_mod.load_catalog(config.catalog_path)
    store = DocumentStore(config.store_path)

    app = FastAPI(title="sla-toolkit", docs_url=None, redoc_url=None, openapi_url=None)
    app.state.catalog = catalog
    app.state.store = store
    app.state.config = config

    if config.cors_origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(config.cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )

    async def _read_document_body(request: Request):
        """Return (doc, None) or (None, error response) for a JSON body."""
        body = await request.body()
        if len(body) > config.request_body_limit:
            return None, _error_response(
                413, "BODY_TOO_LARGE", f"request body exceeds {config.request_body_limit} bytes"
            )
        try:
            return parse(body), None
        except JsonSyntaxError as exc:
            return None, _error_response(400, "JSON_SYNTAX", str(exc))
        except SchemaVersionUnsupported as exc:
            return None, _error_response(400, "SCHEMA_VERSION_UNSUPPORTED", str(exc))
        except SchemaShapeError as exc:
            return None, _error_response(400, "SCHEMA_SHAPE", str(exc))

    @app.get("/healthz")
    async def healthz() -> PlainTextResponse:
        return PlainTextResponse("ok")

    @app.get("/catalog/activities")
    async def activities() -> JSONResponse:
        entries = [
            {
                "name": definition.activity_name,
                "deployment_layer": definition.deployment_layer,
                "programming_model": definition.programming_model,
            }
            for definition in catalog.activities.values()
        ]
        return JSONResponse(entries)

    @app.get("/catalog/activities/{name:path}")
    async def activity_schema(name: str) -> JSONResponse:
        try:
            schema = catalog_mod.resolve_activity_schema(catalog, name)
        except ActivityNotFound as exc:
            return _error_response(404, "UNKNOWN_ACTIVITY", str(exc))
        return JSONResponse(schema.to_json_dict())

    @app.get("/catalog/application-slos")
    async def application_slos() -> JSONResponse:
        return JSONResponse([m.to_json_dict() for m in catalog.application_slos])

    @app.post("/sla/validate")
    async def validate(request: Request) -> JSONResponse:
        doc, error = await _read_document_body(request)
        if error is not None:
            return error
        return JSONResponse(validate_document(catalog, doc).to_json_dict())

    @app.post("/sla", status_code=201)
    async def create(request: Request) -> JSONResponse:
        doc, error = await _read_document_body(request)
        if error is not None:
            return error
        report = validate_document(catalog, doc)
        if not report.valid:
            return JSONResponse(report.to_json_dict(), status_code=422)
        try:
            doc_id = store.put(doc)
        except StoreLocked as exc:
            return _error_response(503, "STORE_LOCKED", str(exc))
        summary = next(s for s in store.list() if s.id == doc_id)
        return JSONResponse(
            {"id": doc_id, "summary": summary.to_json_dict()}, status_code=201
        )

    @app.get("/slas")
    async def list_slas() -> JSONResponse:
        return JSONResponse([s.to_json_dict() for s in store.list()])

    @app.get("/slas/{doc_id}")
    async def get_sla(doc_id: str) -> Response:
        try:
            data = store.get_bytes(doc_id)
        except (DocumentNotFound, CorruptDocument) as exc:
            return _error_response(404, "NOT_FOUND", str(exc))
        return Response(content=data, media_type="application/json")

    index_html = config.assets_path / "index.html" if config.assets_path else None
    if index_html is not None and index_html.is_file():
        from fastapi.staticfiles import StaticFiles

        assets_dir = config.assets_path / "assets"
        if assets_dir.is_dir():
            app.mount("/assets", StaticFiles(directory=assets_dir), name="assets")

        @app.get("/")
        async def wizard_index() -> FileResponse:
            return FileResponse(index_html)

    else:

        @app.get("/")
        async def service_info() -> JSONResponse:
            return JSONResponse(
                {"service": "sla-toolkit", "catalog_version": catalog.version}
            )

    return app


def run(config: ServiceConfig) -> None:
    """Serve until interrupted (blocking)."""
    import uvicorn

    host, port = config.host_port()
    uvicorn.run(create_app(config), host=host, port=port, log_level="info")
