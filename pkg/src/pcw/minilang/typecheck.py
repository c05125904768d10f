"""MiniLang type checker.

Lexically scoped, no shadowing, no implicit coercions.  Types are int,
bool, and string.  Calls are checked against the project-wide method
table, so a misspelled qualified name is a type error here (call-site
RESOLUTION against extracted facts is a separate, lazier concern).
"""

from __future__ import annotations

from ..regexlib import RegexSyntaxError, UnsupportedFeature, parse_regex
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
    MethodDecl,
    NameExpr,
    ReturnStmt,
    StrLit,
    SyntaxForest,
    UnaryExpr,
    WhileStmt,
)

_ARITH = {"+", "-", "*", "/", "%"}
_COMPARE = {"<", "<=", ">", ">="}
_EQUALITY = {"==", "!="}
_LOGIC = {"&&", "||"}


class MiniTypeError(Exception):
    def __init__(self, message: str, span=None):
        super().__init__(message)
        self.message = message
        self.span = span


def build_method_table(forest: SyntaxForest) -> dict:
    """Map qualified names to MethodDecl; duplicates are an error."""
    table: dict[str, MethodDecl] = {}
    for tree in forest.files:
        for ns in tree.namespaces:
            for cls in ns.classes:
                for method in cls.methods:
                    qname = f"{ns.name}.{cls.name}.{method.name}"
                    if qname in table:
                        raise MiniTypeError(f"duplicate method {qname}", method.span)
                    table[qname] = method
    return table


class _Scope:
    def __init__(self):
        self.frames = [{}]

    def push(self):
        self.frames.append({})

    def pop(self):
        self.frames.pop()

    def lookup(self, name: str) -> str | None:
        for frame in reversed(self.frames):
            if name in frame:
                return frame[name]
        return None

    def declare(self, name: str, type_: str, span) -> None:
        if self.lookup(name) is not None:
            raise MiniTypeError(f"variable {name!r} already defined", span)
        self.frames[-1][name] = type_


def _infer(expr, scope: _Scope, table: dict) -> str:
    if isinstance(expr, IntLit):
        return "int"
    if isinstance(expr, BoolLit):
        return "bool"
    if isinstance(expr, StrLit):
        return "string"
    if isinstance(expr, NameExpr):
        type_ = scope.lookup(expr.name)
        if type_ is None:
            raise MiniTypeError(f"undeclared variable {expr.name!r}", expr.span)
        return type_
    if isinstance(expr, UnaryExpr):
        want = "bool" if expr.op == "!" else "int"
        _expect(expr.operand, want, scope, table)
        return want
    if isinstance(expr, BinaryExpr):
        if expr.op in _ARITH:
            _expect(expr.left, "int", scope, table)
            _expect(expr.right, "int", scope, table)
            return "int"
        if expr.op in _COMPARE:
            _expect(expr.left, "int", scope, table)
            _expect(expr.right, "int", scope, table)
            return "bool"
        if expr.op in _LOGIC:
            _expect(expr.left, "bool", scope, table)
            _expect(expr.right, "bool", scope, table)
            return "bool"
        if expr.op in _EQUALITY:
            left = _infer(expr.left, scope, table)
            right = _infer(expr.right, scope, table)
            if left != right:
                raise MiniTypeError(f"cannot compare {left} with {right}", expr.span)
            return "bool"
        raise MiniTypeError(f"unknown operator {expr.op!r}", expr.span)
    if isinstance(expr, LenExpr):
        _expect(expr.operand, "string", scope, table)
        return "int"
    if isinstance(expr, MatchesExpr):
        _expect(expr.operand, "string", scope, table)
        try:
            parse_regex(expr.pattern)
        except (RegexSyntaxError, UnsupportedFeature) as err:
            raise MiniTypeError(f"invalid regex literal: {err}", expr.span) from err
        return "bool"
    if isinstance(expr, CallExpr):
        result = _check_call(expr, scope, table)
        if result is None:
            raise MiniTypeError(f"{expr.callee} returns no value", expr.span)
        return result
    raise MiniTypeError(f"unsupported expression {expr!r}", getattr(expr, "span", None))


def _expect(expr, want: str, scope: _Scope, table: dict) -> None:
    got = _infer(expr, scope, table)
    if got != want:
        raise MiniTypeError(f"expected {want}, got {got}", expr.span)


def _check_call(call: CallExpr, scope: _Scope, table: dict) -> str | None:
    method = table.get(call.callee)
    if method is None:
        raise MiniTypeError(f"unknown method {call.callee}", call.span)
    if len(call.args) != len(method.params):
        raise MiniTypeError(
            f"{call.callee} takes {len(method.params)} arguments, got {len(call.args)}",
            call.span,
        )
    for arg, param in zip(call.args, method.params):
        _expect(arg, param.type, scope, table)
    return method.return_type


def _check_block(block: Block, scope: _Scope, table: dict, return_type) -> None:
    scope.push()
    for stmt in block.stmts:
        _check_stmt(stmt, scope, table, return_type)
    scope.pop()


def _check_stmt(stmt, scope: _Scope, table: dict, return_type) -> None:
    if isinstance(stmt, LetStmt):
        type_ = _infer(stmt.expr, scope, table)
        scope.declare(stmt.name, type_, stmt.span)
    elif isinstance(stmt, AssignStmt):
        declared = scope.lookup(stmt.name)
        if declared is None:
            raise MiniTypeError(f"undeclared variable {stmt.name!r}", stmt.span)
        _expect(stmt.expr, declared, scope, table)
    elif isinstance(stmt, IfStmt):
        _expect(stmt.cond, "bool", scope, table)
        _check_block(stmt.then, scope, table, return_type)
        if stmt.els is not None:
            _check_block(stmt.els, scope, table, return_type)
    elif isinstance(stmt, WhileStmt):
        _expect(stmt.cond, "bool", scope, table)
        _check_block(stmt.body, scope, table, return_type)
    elif isinstance(stmt, ReturnStmt):
        if return_type is None:
            if stmt.expr is not None:
                raise MiniTypeError("return with a value in a method returning nothing", stmt.span)
        else:
            if stmt.expr is None:
                raise MiniTypeError(f"return needs a {return_type} value", stmt.span)
            _expect(stmt.expr, return_type, scope, table)
    elif isinstance(stmt, CallStmt):
        _check_call(stmt.call, scope, table)
    else:
        raise MiniTypeError(f"unsupported statement {stmt!r}", getattr(stmt, "span", None))


def check_method(method: MethodDecl, table: dict) -> None:
    """Type-check one method body against the project method table."""
    scope = _Scope()
    for param in method.params:
        scope.declare(param.name, param.type, param.span)
    _check_block(method.body, scope, table, method.return_type)
