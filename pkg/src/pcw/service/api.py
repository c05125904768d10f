"""HTTP API over sessions and tool instances.

A thin layer: requests are validated, dispatched to the tools package,
and results serialized. Navigation never happens server-side; a
navigate action comes back as {"navigate": {file, line}} for the client
to act on.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, Query
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from ..slices import UnknownElement
from ..tools import (
    BadOption,
    EmptySlice,
    GraphModel,
    ParamValidation,
    ScriptSyntaxError,
    StaleAction,
    UnknownTool,
    apply_action,
    graph_to_dot,
    model_to_json,
    run_tool_script,
)
from .config import ServerConfig
from .sessions import ParseFailed, SessionStore, UnknownSession, UnknownToolId


class OpenProjectBody(BaseModel):
    path: str


class CreateToolBody(BaseModel):
    projectId: str
    script: dict | str


class ActionBody(BaseModel):
    actionId: str


def _element_json(e) -> dict:
    return {"id": e.id, "kind": e.kind, "attrs": dict(e.attrs)}


def _link_json(l) -> dict:
    return {"id": l.id, "kind": l.kind, "source": l.source,
            "target": l.target, "attrs": dict(l.attrs)}


def _error(status: int, kind: str, reason: str, **extra) -> JSONResponse:
    body = {"error": kind, "reason": reason}
    body.update(extra)
    return JSONResponse(body, status_code=status)


def create_app(config: ServerConfig = ServerConfig()) -> FastAPI:
    app = FastAPI(title="pcw", docs_url=None, redoc_url=None)
    store = SessionStore(config)
    app.state.store = store

    if config.cors_allow:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(config.cors_allow),
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.post("/api/projects")
    def open_project(body: OpenProjectBody):
        try:
            session = store.open(body.path)
        except ParseFailed as err:
            return _error(422, "ParseFailed", str(err),
                          diagnostics=err.diagnostics)
        return {"projectId": session.id, "diagnostics": []}

    @app.get("/api/projects/{pid}/slice/roots")
    def slice_roots(pid: str):
        try:
            session = store.session(pid)
        except UnknownSession:
            return _error(404, "UnknownProject", pid)
        roots = session.provider.load_roots()
        return {"elements": [_element_json(e) for e in roots]}

    @app.get("/api/projects/{pid}/elements/{eid}/children")
    def element_children(pid: str, eid: str):
        try:
            session = store.session(pid)
        except UnknownSession:
            return _error(404, "UnknownProject", pid)
        try:
            elements, links = session.provider.load_children(eid)
        except UnknownElement:
            return _error(404, "UnknownElement", eid)
        return {
            "elements": [_element_json(e) for e in elements],
            "links": [_link_json(l) for l in links],
        }

    @app.get("/api/projects/{pid}/source")
    def source(pid: str, file: str,
               from_: int = Query(alias="from", ge=1),
               to: int = Query(ge=1)):
        try:
            session = store.session(pid)
        except UnknownSession:
            return _error(404, "UnknownProject", pid)
        if to < from_:
            return _error(400, "BadRange", f"from {from_} exceeds to {to}")
        root = Path(session.root).resolve()
        target = (root / file).resolve()
        # refuse anything that escapes the project directory
        if root not in target.parents and target != root:
            return _error(400, "BadPath", file)
        if not target.is_file():
            return _error(404, "UnknownFile", file)
        lines = target.read_text(encoding="utf-8").splitlines()
        selected = lines[from_ - 1:to]
        return {"file": file, "from": from_, "to": to, "lines": selected}

    @app.post("/api/tools")
    def create_tool(body: CreateToolBody):
        try:
            session = store.session(body.projectId)
        except UnknownSession:
            return _error(404, "UnknownProject", body.projectId)
        script = body.script if isinstance(body.script, str) \
            else json.dumps(body.script)
        try:
            instance = run_tool_script(script, session.context)
        except ScriptSyntaxError as err:
            return _error(400, "ScriptSyntaxError", str(err))
        except UnknownTool as err:
            return _error(400, "UnknownTool", str(err))
        except ParamValidation as err:
            return _error(400, "ParamValidation", str(err))
        except (BadOption, EmptySlice) as err:
            return _error(422, type(err).__name__, str(err))
        store.register_tool(session, instance)
        return {"toolId": instance.id, "kind": instance.kind,
                "model": model_to_json(instance.model)}

    @app.post("/api/tools/{tid}/actions")
    def post_action(tid: str, body: ActionBody):
        try:
            lock = store.tool_lock(tid)
        except UnknownToolId:
            return _error(404, "UnknownTool", tid)
        with lock:
            session, instance = store.tool(tid)
            try:
                result = apply_action(instance, body.actionId)
            except StaleAction as err:
                return _error(409, "StaleAction", str(err))
            if result.navigation is not None:
                nav = result.navigation
                return {"toolId": tid,
                        "navigate": {"file": nav.file, "line": nav.line}}
            store.replace_tool(session, result.instance)
            return {"toolId": tid,
                    "model": model_to_json(result.instance.model)}

    @app.get("/api/tools/{tid}/export")
    def export_tool(tid: str, format: str = Query()):
        try:
            _session, instance = store.tool(tid)
        except UnknownToolId:
            return _error(404, "UnknownTool", tid)
        if format == "json":
            return model_to_json(instance.model)
        if format == "dot":
            if not isinstance(instance.model, GraphModel):
                return _error(400, "UnsupportedFormat",
                              f"{instance.kind} has no DOT form")
            return PlainTextResponse(graph_to_dot(instance.model))
        return _error(400, "UnsupportedFormat", format)

    return app
