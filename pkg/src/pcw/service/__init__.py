"""HTTP service, session store, and CLI entry point."""

from .api import create_app
from .config import ConfigError, ServerConfig, load_config, parse_config
from .sessions import (
    ParseFailed,
    ProjectSession,
    SessionStore,
    UnknownSession,
    UnknownToolId,
    open_project,
)

__all__ = [
    "ConfigError",
    "ParseFailed",
    "ProjectSession",
    "ServerConfig",
    "SessionStore",
    "UnknownSession",
    "UnknownToolId",
    "create_app",
    "load_config",
    "open_project",
    "parse_config",
]
