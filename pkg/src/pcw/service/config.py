"""Server configuration: flat key=value files.

Recognized keys:
    port=8245
    solver.cmd=z3 -in
    bounds.loopUnroll=8
    bounds.maxPaths=10000
    bounds.intBound=1024
    bounds.stringLenBound=256
    cors.allow=http://localhost:5173,http://127.0.0.1:5173
"""

from __future__ import annotations

from dataclasses import dataclass

from ..symexec import Bounds, SolverConfig


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class ServerConfig:
    port: int = 8245
    solver_cmd: str | None = None
    loop_unroll: int = 8
    max_paths: int = 10_000
    int_bound: int = 1024
    string_len_bound: int = 256
    cors_allow: tuple = ()

    def bounds(self) -> Bounds:
        return Bounds(loop_unroll=self.loop_unroll, max_paths=self.max_paths)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            int_low=-self.int_bound,
            int_high=self.int_bound,
            max_string_length=self.string_len_bound,
            solver_cmd=self.solver_cmd,
        )


def _positive(key: str, raw: str) -> int:
    try:
        value = int(raw, 10)
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ConfigError(f"{key} must be positive, got {value}")
    return value


def parse_config(text: str) -> ServerConfig:
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key=value, got {stripped!r}")
        key, _, raw = stripped.partition("=")
        key, raw = key.strip(), raw.strip()
        if key == "port":
            port = _positive(key, raw)
            if port > 65535:
                raise ConfigError(f"port out of range: {port}")
            values["port"] = port
        elif key == "solver.cmd":
            values["solver_cmd"] = raw or None
        elif key == "bounds.loopUnroll":
            values["loop_unroll"] = _positive(key, raw)
        elif key == "bounds.maxPaths":
            values["max_paths"] = _positive(key, raw)
        elif key == "bounds.intBound":
            values["int_bound"] = _positive(key, raw)
        elif key == "bounds.stringLenBound":
            values["string_len_bound"] = _positive(key, raw)
        elif key == "cors.allow":
            values["cors_allow"] = tuple(
                origin.strip() for origin in raw.split(",") if origin.strip())
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    return ServerConfig(**values)


def load_config(path: str) -> ServerConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as err:
        raise ConfigError(str(err)) from err
