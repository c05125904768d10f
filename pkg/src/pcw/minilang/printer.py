"""MiniLang pretty printer.

Prints parsed trees back to source.  Parsed expression trees are always
precedence-consistent, so no parentheses are emitted (the grammar has
none).  Round-trip: parse(print(parse(text))) is structurally equal to
parse(text).
"""

from __future__ import annotations

from .syntax import (
    AssignStmt,
    BinaryExpr,
    Block,
    BoolLit,
    CallExpr,
    CallStmt,
    FileTree,
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

_STRING_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t"}


def _string(text: str) -> str:
    return '"' + "".join(_STRING_ESCAPES.get(c, c) for c in text) + '"'


def print_expr(expr) -> str:
    if isinstance(expr, IntLit):
        return str(expr.value)
    if isinstance(expr, BoolLit):
        return "true" if expr.value else "false"
    if isinstance(expr, StrLit):
        return _string(expr.value)
    if isinstance(expr, NameExpr):
        return expr.name
    if isinstance(expr, UnaryExpr):
        return expr.op + print_expr(expr.operand)
    if isinstance(expr, BinaryExpr):
        return f"{print_expr(expr.left)} {expr.op} {print_expr(expr.right)}"
    if isinstance(expr, LenExpr):
        return f"len({print_expr(expr.operand)})"
    if isinstance(expr, MatchesExpr):
        return f"matches({print_expr(expr.operand)}, {_string(expr.pattern)})"
    if isinstance(expr, CallExpr):
        return f"{expr.callee}({', '.join(print_expr(a) for a in expr.args)})"
    raise TypeError(f"not an expression: {expr!r}")


def _print_block(block: Block, indent: int, out: list) -> None:
    pad = "  " * indent
    out.append(pad + "{")
    for stmt in block.stmts:
        _print_stmt(stmt, indent + 1, out)
    out.append(pad + "}")


def _print_stmt(stmt, indent: int, out: list) -> None:
    pad = "  " * indent
    if isinstance(stmt, LetStmt):
        out.append(f"{pad}let {stmt.name} = {print_expr(stmt.expr)};")
    elif isinstance(stmt, AssignStmt):
        out.append(f"{pad}{stmt.name} = {print_expr(stmt.expr)};")
    elif isinstance(stmt, IfStmt):
        out.append(f"{pad}if ({print_expr(stmt.cond)})")
        _print_block(stmt.then, indent, out)
        if stmt.els is not None:
            out.append(pad + "else")
            _print_block(stmt.els, indent, out)
    elif isinstance(stmt, WhileStmt):
        out.append(f"{pad}while ({print_expr(stmt.cond)})")
        _print_block(stmt.body, indent, out)
    elif isinstance(stmt, ReturnStmt):
        out.append(f"{pad}return;" if stmt.expr is None else f"{pad}return {print_expr(stmt.expr)};")
    elif isinstance(stmt, CallStmt):
        out.append(f"{pad}{print_expr(stmt.call)};")
    else:
        raise TypeError(f"not a statement: {stmt!r}")


def print_file(tree: FileTree) -> str:
    out: list[str] = []
    for ns in tree.namespaces:
        out.append(f"namespace {ns.name} {{")
        for cls in ns.classes:
            out.append(f"  class {cls.name} {{")
            for method in cls.methods:
                for attr in method.attrs:
                    args = ", ".join(_string(a) for a in attr.args)
                    out.append(f"    @{attr.name}({args})")
                params = ", ".join(f"{p.name}: {p.type}" for p in method.params)
                arrow = f" -> {method.return_type}" if method.return_type else ""
                out.append(f"    fn {method.name}({params}){arrow}")
                _print_block(method.body, 2, out)
            out.append("  }")
        out.append("}")
    return "\n".join(out) + "\n"
