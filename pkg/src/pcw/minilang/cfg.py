"""Control-flow-graph IR: basic blocks, pure expression trees, terminators.

Normal form invariants, established by lowering:
  - calls appear only as CallAssign statements; every other expression
    position is call-free and pure
  - short-circuit && and || never appear in IR expressions (lowered to
    branches)
  - Return carries an atom (variable or constant) or nothing
Integer division and modulo truncate toward zero; division by zero is a
runtime error in every evaluator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .syntax import Span

# --- expressions --------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class IntConst:
    value: int


@dataclass(frozen=True)
class BoolConst:
    value: bool


@dataclass(frozen=True)
class StrConst:
    value: str


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Len:
    operand: "Expr"


@dataclass(frozen=True)
class Matches:
    operand: "Expr"
    pattern: str


Expr = Union[Var, IntConst, BoolConst, StrConst, Unary, Binary, Len, Matches]
Atom = Union[Var, IntConst, BoolConst, StrConst]

CONSTS = (IntConst, BoolConst, StrConst)


def is_atom(expr) -> bool:
    return isinstance(expr, (Var,) + CONSTS)


def expr_vars(expr) -> set:
    """Free variables of a pure IR expression."""
    if isinstance(expr, Var):
        return {expr.name}
    if isinstance(expr, CONSTS):
        return set()
    if isinstance(expr, Unary):
        return expr_vars(expr.operand)
    if isinstance(expr, Binary):
        return expr_vars(expr.left) | expr_vars(expr.right)
    if isinstance(expr, Len):
        return expr_vars(expr.operand)
    if isinstance(expr, Matches):
        return expr_vars(expr.operand)
    raise TypeError(f"not an IR expression: {expr!r}")


def subst(expr, mapping: dict):
    """Substitute variables by expressions (capture is impossible: no binders)."""
    if isinstance(expr, Var):
        return mapping.get(expr.name, expr)
    if isinstance(expr, CONSTS):
        return expr
    if isinstance(expr, Unary):
        return Unary(expr.op, subst(expr.operand, mapping))
    if isinstance(expr, Binary):
        return Binary(expr.op, subst(expr.left, mapping), subst(expr.right, mapping))
    if isinstance(expr, Len):
        return Len(subst(expr.operand, mapping))
    if isinstance(expr, Matches):
        return Matches(subst(expr.operand, mapping), expr.pattern)
    raise TypeError(f"not an IR expression: {expr!r}")


def int_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def int_mod(a: int, b: int) -> int:
    return a - int_div(a, b) * b


# --- statements and terminators ------------------------------------------------


@dataclass(frozen=True)
class Assign:
    sid: str
    target: str
    expr: Expr
    span: Span = field(compare=False, default=None)


@dataclass(frozen=True)
class CallAssign:
    sid: str
    target: str | None
    callee: str  # qualified name
    args: tuple
    span: Span = field(compare=False, default=None)


@dataclass(frozen=True)
class Jump:
    sid: str
    target: str
    span: Span = field(compare=False, default=None)


@dataclass(frozen=True)
class Branch:
    sid: str
    cond: Expr
    then_target: str
    else_target: str
    span: Span = field(compare=False, default=None)


@dataclass(frozen=True)
class Return:
    sid: str
    value: Atom | None
    span: Span = field(compare=False, default=None)


@dataclass
class BasicBlock:
    id: str
    statements: tuple
    terminator: Jump | Branch | Return


@dataclass
class Cfg:
    method: str
    params: tuple  # ordered (name, type) pairs
    return_type: str | None
    entry: str
    blocks: dict  # block id -> BasicBlock, in creation order

    def block(self, block_id: str) -> BasicBlock:
        return self.blocks[block_id]

    def successors(self, block_id: str) -> tuple:
        term = self.blocks[block_id].terminator
        if isinstance(term, Jump):
            return (term.target,)
        if isinstance(term, Branch):
            return (term.then_target, term.else_target)
        return ()

    def all_statements(self):
        """Yield (block, statement) for statements and terminators alike."""
        for block in self.blocks.values():
            for stmt in block.statements:
                yield block, stmt
            yield block, block.terminator

    def statement(self, sid: str):
        for _, stmt in self.all_statements():
            if stmt.sid == sid:
                return stmt
        raise KeyError(sid)

    def call_sites(self) -> list:
        return [s for _, s in self.all_statements() if isinstance(s, CallAssign)]
