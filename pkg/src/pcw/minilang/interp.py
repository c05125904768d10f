"""Reference tree-walking interpreter for MiniLang.

This is the semantic oracle: CFG-level execution must agree with it on
every program.  It interprets the syntax tree directly and shares no
code with the lowering pipeline.
"""

from __future__ import annotations

from ..regexlib.backtrack import match_pattern
from .cfg import int_div, int_mod
from .syntax import (
    AssignStmt,
    BinaryExpr,
    Block,
    BoolLit,
    CallExpr,
    CallStmt,
    IfStmt,
    IntLit,
    LenExpr,
    LetStmt,
    MatchesExpr,
    NameExpr,
    ReturnStmt,
    StrLit,
    UnaryExpr,
    WhileStmt,
)


class MiniRuntimeError(Exception):
    pass


class OutOfFuel(Exception):
    pass


class _Return(Exception):
    def __init__(self, value):
        self.value = value


class _Env:
    def __init__(self):
        self.frames = [{}]

    def push(self):
        self.frames.append({})

    def pop(self):
        self.frames.pop()

    def declare(self, name, value):
        self.frames[-1][name] = value

    def get(self, name):
        for frame in reversed(self.frames):
            if name in frame:
                return frame[name]
        raise MiniRuntimeError(f"unbound variable {name!r}")

    def set(self, name, value):
        for frame in reversed(self.frames):
            if name in frame:
                frame[name] = value
                return
        raise MiniRuntimeError(f"unbound variable {name!r}")


def _binary(op: str, left, right):
    if op == "+":
        return left + right
    if op == "-":
        return left - right
    if op == "*":
        return left * right
    if op == "/":
        if right == 0:
            raise MiniRuntimeError("division by zero")
        return int_div(left, right)
    if op == "%":
        if right == 0:
            raise MiniRuntimeError("division by zero")
        return int_mod(left, right)
    if op == "<":
        return left < right
    if op == "<=":
        return left <= right
    if op == ">":
        return left > right
    if op == ">=":
        return left >= right
    if op == "==":
        return left == right
    if op == "!=":
        return left != right
    raise MiniRuntimeError(f"unknown operator {op!r}")


class Interpreter:
    def __init__(self, table: dict, fuel: int = 100_000):
        self.table = table
        self.fuel = fuel

    def _tick(self):
        self.fuel -= 1
        if self.fuel < 0:
            raise OutOfFuel()

    def _observe(self, qname: str, stmt, value) -> None:
        """Hook: called with every value a statement computes (let/assign/
        return) in method `qname`.  No-op here; tracing subclasses override."""

    def run(self, qname: str, args: list):
        method = self.table.get(qname)
        if method is None:
            raise MiniRuntimeError(f"no method {qname}")
        if len(args) != len(method.params):
            raise MiniRuntimeError(f"{qname} takes {len(method.params)} args")
        env = _Env()
        for param, value in zip(method.params, args):
            env.declare(param.name, value)
        try:
            self._block(method.body, env, qname)
        except _Return as ret:
            return ret.value
        return None

    def _block(self, block: Block, env: _Env, qname: str) -> None:
        env.push()
        try:
            for stmt in block.stmts:
                self._stmt(stmt, env, qname)
        finally:
            env.pop()

    def _stmt(self, stmt, env: _Env, qname: str) -> None:
        self._tick()
        if isinstance(stmt, LetStmt):
            value = self._eval(stmt.expr, env)
            self._observe(qname, stmt, value)
            env.declare(stmt.name, value)
        elif isinstance(stmt, AssignStmt):
            value = self._eval(stmt.expr, env)
            self._observe(qname, stmt, value)
            env.set(stmt.name, value)
        elif isinstance(stmt, IfStmt):
            if self._eval(stmt.cond, env):
                self._block(stmt.then, env, qname)
            elif stmt.els is not None:
                self._block(stmt.els, env, qname)
        elif isinstance(stmt, WhileStmt):
            while self._eval(stmt.cond, env):
                self._tick()
                self._block(stmt.body, env, qname)
        elif isinstance(stmt, ReturnStmt):
            value = None if stmt.expr is None else self._eval(stmt.expr, env)
            self._observe(qname, stmt, value)
            raise _Return(value)
        elif isinstance(stmt, CallStmt):
            self._eval(stmt.call, env)
        else:
            raise MiniRuntimeError(f"cannot execute {stmt!r}")

    def _eval(self, expr, env: _Env):
        if isinstance(expr, IntLit):
            return expr.value
        if isinstance(expr, BoolLit):
            return expr.value
        if isinstance(expr, StrLit):
            return expr.value
        if isinstance(expr, NameExpr):
            return env.get(expr.name)
        if isinstance(expr, UnaryExpr):
            value = self._eval(expr.operand, env)
            return (not value) if expr.op == "!" else -value
        if isinstance(expr, BinaryExpr):
            if expr.op == "&&":
                return bool(self._eval(expr.left, env)) and bool(self._eval(expr.right, env))
            if expr.op == "||":
                return bool(self._eval(expr.left, env)) or bool(self._eval(expr.right, env))
            return _binary(expr.op, self._eval(expr.left, env), self._eval(expr.right, env))
        if isinstance(expr, LenExpr):
            return len(self._eval(expr.operand, env))
        if isinstance(expr, MatchesExpr):
            return match_pattern(expr.pattern, self._eval(expr.operand, env))
        if isinstance(expr, CallExpr):
            args = [self._eval(a, env) for a in expr.args]
            return self.run(expr.callee, args)
        raise MiniRuntimeError(f"cannot evaluate {expr!r}")


def run_method(table: dict, qname: str, args: list, fuel: int = 100_000):
    """One-shot convenience wrapper around Interpreter."""
    return Interpreter(table, fuel).run(qname, args)
