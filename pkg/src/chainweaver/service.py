"""HTTP service exposing chain CRUD, validation, execution, and debugging.

The web editor (and any other client) speaks only this surface. Run
progress is published as an ordered, gapless event stream per run; a
client can reconnect and replay from the last sequence number it saw.

State is in-memory: a chain store seeded with the gallery, and a registry
of run sessions. Mutations on one run are serialized; separate runs are
independent.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from typing import Any, Iterator

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse, StreamingResponse

from .backends import BackendError, EchoBackend, HttpBackend, LLMBackend, ScriptedBackend
from .executor import (
    HttpTransport,
    InputError,
    KindError,
    RunEvent,
    RunState,
    RunStatus,
    StateError,
    answer_user_action,
    edit_node_output,
    resume,
    run_chain,
    run_node_unit,
)
from .gallery import answer_from_doc, gallery_entry, list_gallery
from .model import validate_chain
from .persistence import (
    ChainFile,
    Fixtures,
    FormatError,
    chain_file_from_doc,
    chain_file_to_doc,
    stub_transport,
)
from .values import Value

DEFAULT_PORT = 8787
PORT_ENV = "CHAINWEAVER_PORT"

IDEMPOTENCY_HEADER = "Idempotency-Key"


class ApiError(Exception):
    """Maps straight onto the wire error body {code, message, path?}."""

    def __init__(self, status: int, code: str, message: str, path: str | None = None, extra: dict | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.path = path
        self.extra = extra or {}

    def body(self) -> dict:
        doc: dict[str, Any] = {"code": self.code, "message": self.message}
        if self.path is not None:
            doc["path"] = self.path
        doc.update(self.extra)
        return doc


@dataclass
class RunSession:
    """One run plus its event log; mutations are serialized by ``op_lock``."""

    run_id: str
    chain_id: str
    backend: LLMBackend | None
    transport: HttpTransport | None
    fixtures: Fixtures | None
    state: RunState | None = None
    events: list[dict] = field(default_factory=list)
    op_lock: threading.Lock = field(default_factory=threading.Lock)
    cond: threading.Condition = field(default_factory=threading.Condition)

    def emit(self, event: RunEvent) -> None:
        with self.cond:
            self.events.append(
                {"runId": self.run_id, "sequence": len(self.events) + 1, "payload": event.to_json()}
            )
            self.cond.notify_all()

    def finished(self) -> bool:
        return self.state is not None and self.state.status in (RunStatus.DONE, RunStatus.FAILED)


class ServiceState:
    def __init__(self) -> None:
        self.chains: dict[str, ChainFile] = {}
        self.runs: dict[str, RunSession] = {}
        self.lock = threading.Lock()
        self.idempotency: dict[tuple[str, str, str], tuple[int, str]] = {}
        self.run_counter = 0
        for entry in list_gallery():
            self.chains[entry.chain_file.chain.id] = entry.chain_file

    def chain_file(self, chain_id: str) -> ChainFile:
        with self.lock:
            cf = self.chains.get(chain_id)
        if cf is None:
            raise ApiError(404, "NOT_FOUND", f"no chain {chain_id!r}")
        return cf

    def session(self, run_id: str) -> RunSession:
        with self.lock:
            session = self.runs.get(run_id)
        if session is None:
            raise ApiError(404, "NOT_FOUND", f"no run {run_id!r}")
        return session

    def new_run_id(self) -> str:
        with self.lock:
            self.run_counter += 1
            return f"run-{self.run_counter:06d}"


def _values_from_doc(doc: Any, what: str) -> dict[str, Value]:
    if doc is None:
        return {}
    if not isinstance(doc, dict):
        raise ApiError(422, "BAD_REQUEST", f"{what} must be an object")
    out: dict[str, Value] = {}
    for key, raw in doc.items():
        try:
            out[key] = Value.from_json(raw)
        except ValueError as exc:
            raise ApiError(422, "BAD_REQUEST", f"bad value for {what} {key!r}: {exc}") from exc
    return out


def _resolve_backend(
    spec: Any, chain_fixtures: Fixtures | None
) -> tuple[LLMBackend, HttpTransport | None, Fixtures | None]:
    """Build the backend (and API-stub transport) a run should use.

    ``configRef`` may name a gallery entry ("gallery:<id>") whose fixtures
    supply scripted rules and API stubs; with no configRef, the run target
    chain's own fixtures are used.
    """
    spec = spec or {}
    if not isinstance(spec, dict):
        raise ApiError(422, "BAD_REQUEST", "backend must be an object")
    kind = spec.get("kind", "scripted")
    config_ref = spec.get("configRef")
    fixtures = chain_fixtures
    if isinstance(config_ref, str) and config_ref.startswith("gallery:"):
        try:
            fixtures = gallery_entry(config_ref.split(":", 1)[1]).chain_file.fixtures
        except KeyError as exc:
            raise ApiError(422, "BAD_REQUEST", f"unknown backend configRef {config_ref!r}") from exc
    elif config_ref is not None:
        raise ApiError(422, "BAD_REQUEST", f"unknown backend configRef {config_ref!r}")

    transport = stub_transport(fixtures.api_stubs) if fixtures and fixtures.api_stubs else None
    if kind == "echo":
        return EchoBackend(), transport, fixtures
    if kind == "scripted":
        if fixtures is None or not fixtures.scripted_rules:
            raise ApiError(422, "BAD_REQUEST", "scripted backend needs fixtures with scriptedRules")
        return ScriptedBackend(fixtures.scripted_rules), transport, fixtures
    if kind == "http":
        try:
            return HttpBackend(), transport, fixtures
        except BackendError as exc:
            raise ApiError(422, "BAD_REQUEST", str(exc)) from exc
    raise ApiError(422, "BAD_REQUEST", f"unknown backend kind {kind!r}")


def create_app(state: ServiceState | None = None, ui_dir: str | None = None) -> FastAPI:
    service = state or ServiceState()
    app = FastAPI(title="chainweaver", version="0.1.0")
    app.state.service = service

    # the editor may be served from another origin during development
    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(status_code=exc.status, content=exc.body())

    @app.middleware("http")
    async def _idempotency(request: Request, call_next):
        key = request.headers.get(IDEMPOTENCY_HEADER)
        if not key or request.method in ("GET", "HEAD"):
            return await call_next(request)
        cache_key = (request.method, request.url.path, key)
        with service.lock:
            cached = service.idempotency.get(cache_key)
        if cached is not None:
            status, body = cached
            return Response(content=body, status_code=status, media_type="application/json")
        response = await call_next(request)
        if response.headers.get("content-type", "").startswith("application/json"):
            chunks = [section async for section in response.body_iterator]
            body_bytes = b"".join(chunks)
            with service.lock:
                service.idempotency[cache_key] = (response.status_code, body_bytes.decode("utf-8"))
            return Response(
                content=body_bytes,
                status_code=response.status_code,
                media_type="application/json",
            )
        return response

    # ------------------------------------------------------------------
    # Chains

    @app.get("/chains")
    def get_chains() -> list[dict]:
        with service.lock:
            files = list(service.chains.values())
        return [
            {"id": cf.chain.id, "name": cf.chain.name, "description": cf.chain.description}
            for cf in sorted(files, key=lambda cf: cf.chain.id)
        ]

    @app.get("/chains/{chain_id}")
    def get_chain(chain_id: str) -> dict:
        return chain_file_to_doc(service.chain_file(chain_id))

    @app.put("/chains/{chain_id}")
    async def put_chain(chain_id: str, request: Request) -> dict:
        doc = await _json_body(request)
        chain_file = _parse_chain_file(doc)
        if chain_file.chain.id != chain_id:
            raise ApiError(
                422, "ID_MISMATCH", f"path id {chain_id!r} does not match chain id {chain_file.chain.id!r}"
            )
        diagnostics = validate_chain(chain_file.chain)
        if diagnostics:
            raise ApiError(
                422,
                "INVALID_CHAIN",
                "chain does not validate",
                extra={"diagnostics": [d.to_json() for d in diagnostics]},
            )
        with service.lock:
            service.chains[chain_id] = chain_file
        return chain_file_to_doc(chain_file)

    @app.delete("/chains/{chain_id}", status_code=204)
    def delete_chain(chain_id: str) -> Response:
        with service.lock:
            if chain_id not in service.chains:
                raise ApiError(404, "NOT_FOUND", f"no chain {chain_id!r}")
            del service.chains[chain_id]
        return Response(status_code=204)

    @app.post("/chains/{chain_id}/validate")
    async def validate_chain_endpoint(chain_id: str, request: Request) -> list[dict]:
        body = await request.body()
        if body:
            chain_file = _parse_chain_file(json.loads(body))
            chain = chain_file.chain
        else:
            chain = service.chain_file(chain_id).chain
        return [d.to_json() for d in validate_chain(chain)]

    @app.get("/gallery")
    def get_gallery() -> list[dict]:
        return [entry.to_json() for entry in list_gallery()]

    # ------------------------------------------------------------------
    # Runs

    @app.post("/chains/{chain_id}/runs", status_code=201)
    async def post_run(chain_id: str, request: Request) -> dict:
        body = await _json_body(request, default={})
        chain_file = service.chain_file(chain_id)
        chain = chain_file.chain
        inputs = dict((chain_file.fixtures.sample_inputs if chain_file.fixtures else {}))
        inputs.update(_values_from_doc(body.get("inputs"), "input"))
        breakpoints = body.get("breakpoints", [])
        if not isinstance(breakpoints, list) or any(not isinstance(b, str) for b in breakpoints):
            raise ApiError(422, "BAD_REQUEST", "breakpoints must be a list of node ids")
        backend, transport, fixtures = _resolve_backend(body.get("backend"), chain_file.fixtures)

        session = RunSession(
            run_id=service.new_run_id(),
            chain_id=chain_id,
            backend=backend,
            transport=transport,
            fixtures=fixtures,
        )
        with service.lock:
            service.runs[session.run_id] = session
        with session.op_lock:
            try:
                session.state = run_chain(
                    chain,
                    inputs,
                    tuple(breakpoints),
                    backend,
                    on_event=session.emit,
                    http_transport=transport,
                    run_id=session.run_id,
                )
            except (InputError, ValueError) as exc:
                with service.lock:
                    del service.runs[session.run_id]
                raise ApiError(422, "BAD_REQUEST", str(exc)) from exc
        return {"runId": session.run_id}

    @app.get("/runs/{run_id}")
    def get_run(run_id: str) -> dict:
        session = service.session(run_id)
        with session.op_lock:
            assert session.state is not None
            return session.state.to_json()

    @app.post("/runs/{run_id}/resume")
    def post_resume(run_id: str) -> dict:
        session = service.session(run_id)
        with session.op_lock:
            assert session.state is not None
            try:
                session.state = resume(
                    session.state,
                    session.backend,
                    on_event=session.emit,
                    http_transport=session.transport,
                )
            except StateError as exc:
                raise ApiError(409, "ILLEGAL_STATE", str(exc)) from exc
            return session.state.to_json()

    @app.post("/runs/{run_id}/nodes/{node_id}/output")
    async def post_output_edit(run_id: str, node_id: str, request: Request) -> dict:
        body = await _json_body(request)
        handle = body.get("handle")
        if not isinstance(handle, str):
            raise ApiError(422, "BAD_REQUEST", "body needs a string 'handle'")
        try:
            value = Value.from_json(body.get("value"))
        except ValueError as exc:
            raise ApiError(422, "BAD_REQUEST", f"bad value: {exc}") from exc
        session = service.session(run_id)
        with session.op_lock:
            assert session.state is not None
            try:
                session.state = edit_node_output(
                    session.state, node_id, handle, value, on_event=session.emit
                )
            except StateError as exc:
                raise ApiError(409, "ILLEGAL_STATE", str(exc)) from exc
            except KindError as exc:
                raise ApiError(422, "KIND_ERROR", str(exc)) from exc
            except KeyError as exc:
                raise ApiError(404, "NOT_FOUND", str(exc.args[0] if exc.args else exc)) from exc
            return session.state.to_json()

    @app.post("/runs/{run_id}/nodes/{node_id}/answer")
    async def post_answer(run_id: str, node_id: str, request: Request) -> dict:
        body = await _json_body(request)
        try:
            answer = answer_from_doc(body)
        except ValueError as exc:
            raise ApiError(422, "BAD_REQUEST", str(exc)) from exc
        session = service.session(run_id)
        with session.op_lock:
            assert session.state is not None
            try:
                session.state = answer_user_action(session.state, node_id, answer, on_event=session.emit)
            except StateError as exc:
                raise ApiError(409, "ILLEGAL_STATE", str(exc)) from exc
            except IndexError as exc:
                raise ApiError(422, "BAD_INDEX", str(exc)) from exc
            except KindError as exc:
                raise ApiError(422, "KIND_ERROR", str(exc)) from exc
            return session.state.to_json()

    @app.post("/chains/{chain_id}/nodes/{node_id}/unit-test")
    async def post_unit_test(chain_id: str, node_id: str, request: Request) -> dict:
        body = await _json_body(request, default={})
        chain_file = service.chain_file(chain_id)
        node = chain_file.chain.get_node(node_id)
        if node is None:
            raise ApiError(404, "NOT_FOUND", f"no node {node_id!r} in chain {chain_id!r}")
        bindings = _values_from_doc(body.get("bindings"), "binding")
        backend, transport, _ = _resolve_backend(body.get("backend"), chain_file.fixtures)
        try:
            record = run_node_unit(node, bindings, backend, http_transport=transport)
        except InputError as exc:
            raise ApiError(422, "BAD_REQUEST", str(exc)) from exc
        return record.to_json()

    # ------------------------------------------------------------------
    # Event stream

    @app.get("/runs/{run_id}/events")
    def get_events(run_id: str, since: int = 0, follow: bool = False) -> StreamingResponse:
        session = service.session(run_id)

        def stream() -> Iterator[str]:
            cursor = since
            while True:
                with session.cond:
                    while len(session.events) <= cursor and follow and not session.finished():
                        session.cond.wait(timeout=30.0)
                    pending = session.events[cursor:]
                for envelope in pending:
                    cursor = envelope["sequence"]
                    yield json.dumps(envelope, sort_keys=True) + "\n"
                if not follow:
                    return
                if pending and pending[-1]["payload"]["type"] == "runFinished":
                    return
                if not pending:
                    # follow timed out with nothing new (paused run); end the
                    # stream, clients reconnect with ?since=<last seen>
                    return

        return StreamingResponse(stream(), media_type="application/x-ndjson")

    return app


async def _json_body(request: Request, default: dict | None = None) -> dict:
    raw = await request.body()
    if not raw:
        if default is not None:
            return default
        raise ApiError(422, "BAD_REQUEST", "request body required")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ApiError(422, "BAD_REQUEST", f"body is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ApiError(422, "BAD_REQUEST", "body must be a JSON object")
    return doc


def _parse_chain_file(doc: Any) -> ChainFile:
    try:
        return chain_file_from_doc(doc)
    except FormatError as exc:
        raise ApiError(422, "FORMAT_ERROR", exc.message, path=exc.path) from exc


def serve(port: int | None = None, host: str = "127.0.0.1", ui_dir: str | None = None) -> None:
    """Run the service under uvicorn (blocking).

    Serves the web editor at /ui when a built frontend is found (pass
    ``ui_dir`` or run from a checkout containing frontend/public).
    """
    import uvicorn

    if ui_dir is None:
        candidate = os.path.join(os.getcwd(), "frontend", "public")
        if os.path.isdir(candidate):
            ui_dir = candidate
    resolved = port if port is not None else int(os.environ.get(PORT_ENV, DEFAULT_PORT))
    uvicorn.run(create_app(ui_dir=ui_dir), host=host, port=resolved, log_level="warning")
