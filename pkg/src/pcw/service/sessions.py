"""Project sessions: parsed projects plus their open tool instances.

Sessions are in-memory and independent; opening the same path twice
gives two sessions that share nothing. Actions on one tool instance are
serialized by a per-tool lock, so concurrent requests cannot interleave
a read-modify-replace.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field

from ..minilang import EmptyProject, InvalidForest, IoError, MiniProvider, parse_project
from ..tools import ToolContext, ToolInstance
from .config import ServerConfig


class ParseFailed(Exception):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        first = self.diagnostics[0] if self.diagnostics else None
        super().__init__(
            f"{first['file']}:{first['line']}:{first['column']}: {first['message']}"
            if first else "parse failed")


class UnknownSession(KeyError):
    pass


class UnknownToolId(KeyError):
    pass


def _diag_json(d) -> dict:
    return {"file": d.file, "line": d.line, "column": d.column,
            "message": d.message}


@dataclass
class ProjectSession:
    id: str
    root: str
    provider: MiniProvider
    context: ToolContext
    tools: dict = field(default_factory=dict)  # tool id -> ToolInstance


def open_project(path: str, config: ServerConfig = ServerConfig(),
                 session_id: str = "p1") -> ProjectSession:
    """Parse a project directory into a fresh session."""
    try:
        forest = parse_project(path)
    except (IoError, EmptyProject) as err:
        raise ParseFailed([{"file": str(path), "line": 0, "column": 0,
                            "message": str(err)}]) from err
    errors = [d for d in forest.diagnostics if d.severity == "error"]
    if errors:
        raise ParseFailed([_diag_json(d) for d in errors])
    try:
        provider = MiniProvider(forest)
    except InvalidForest as err:
        raise ParseFailed([{"file": str(path), "line": 0, "column": 0,
                            "message": str(err)}]) from err
    context = ToolContext(provider, bounds=config.bounds(),
                          config=config.solver_config())
    return ProjectSession(session_id, str(path), provider, context)


class SessionStore:
    """All live sessions and a global tool-id index."""

    def __init__(self, config: ServerConfig = ServerConfig()):
        self.config = config
        self._sessions: dict = {}
        self._tool_owner: dict = {}  # tool id -> session id
        self._tool_locks: dict = {}
        self._ids = itertools.count(1)
        self._lock = threading.Lock()

    def open(self, path: str) -> ProjectSession:
        with self._lock:
            session_id = f"p{next(self._ids)}"
        session = open_project(path, self.config, session_id)
        with self._lock:
            self._sessions[session_id] = session
        return session

    def session(self, session_id: str) -> ProjectSession:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise UnknownSession(session_id) from None

    def register_tool(self, session: ProjectSession,
                      instance: ToolInstance) -> None:
        with self._lock:
            session.tools[instance.id] = instance
            self._tool_owner[instance.id] = session.id
            self._tool_locks[instance.id] = threading.Lock()

    def tool(self, tool_id: str) -> tuple:
        """(owning session, current instance) for a tool id."""
        try:
            session = self._sessions[self._tool_owner[tool_id]]
            return session, session.tools[tool_id]
        except KeyError:
            raise UnknownToolId(tool_id) from None

    def tool_lock(self, tool_id: str) -> threading.Lock:
        try:
            return self._tool_locks[tool_id]
        except KeyError:
            raise UnknownToolId(tool_id) from None

    def replace_tool(self, session: ProjectSession,
                     instance: ToolInstance) -> None:
        session.tools[instance.id] = instance
