"""Lowering from MiniLang syntax trees to normalized CFGs.

Normalization: every call is hoisted into a CallAssign with a fresh `$t`
temporary (source identifiers cannot contain `$`), short-circuit && and
|| become branches, and return values are forced into atoms.  Statements
after a terminator in the same block are unreachable and dropped, and
unreachable blocks are pruned so the reachability invariant holds.

Lowering is lazy and cached per method; `lower_counts` makes the
laziness observable.
"""

from __future__ import annotations

import threading
from collections import Counter

from ..slices import UnknownElement
from .cfg import (
    Assign,
    BasicBlock,
    Binary,
    BoolConst,
    Branch,
    CallAssign,
    Cfg,
    IntConst,
    Jump,
    Len,
    Matches,
    Return,
    StrConst,
    Unary,
    Var,
    is_atom,
)
from .syntax import (
    AssignStmt,
    BinaryExpr,
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
from .typecheck import MiniTypeError, check_method


class _Block:
    def __init__(self, block_id: str):
        self.id = block_id
        self.stmts = []
        self.terminator = None


class _Lowerer:
    def __init__(self, qname: str, method):
        self.qname = qname
        self.method = method
        self.blocks: dict[str, _Block] = {}
        self.current: _Block | None = None
        self.temp_n = 0
        self.sid_n = 0

    def new_block(self) -> _Block:
        block = _Block(f"b{len(self.blocks)}")
        self.blocks[block.id] = block
        return block

    def fresh_temp(self) -> str:
        name = f"$t{self.temp_n}"
        self.temp_n += 1
        return name

    def fresh_sid(self) -> str:
        sid = f"s{self.sid_n}"
        self.sid_n += 1
        return sid

    def emit(self, stmt) -> None:
        self.current.stmts.append(stmt)

    def terminate(self, term) -> None:
        self.current.terminator = term
        self.current = None

    # --- expressions ---------------------------------------------------------

    def lower_expr(self, expr):
        if isinstance(expr, IntLit):
            return IntConst(expr.value)
        if isinstance(expr, BoolLit):
            return BoolConst(expr.value)
        if isinstance(expr, StrLit):
            return StrConst(expr.value)
        if isinstance(expr, NameExpr):
            return Var(expr.name)
        if isinstance(expr, UnaryExpr):
            return Unary(expr.op, self.lower_expr(expr.operand))
        if isinstance(expr, BinaryExpr):
            if expr.op in ("&&", "||"):
                return self._short_circuit(expr)
            return Binary(expr.op, self.lower_expr(expr.left), self.lower_expr(expr.right))
        if isinstance(expr, LenExpr):
            return Len(self.lower_expr(expr.operand))
        if isinstance(expr, MatchesExpr):
            return Matches(self.lower_expr(expr.operand), expr.pattern)
        if isinstance(expr, CallExpr):
            args = tuple(self.lower_expr(a) for a in expr.args)
            temp = self.fresh_temp()
            self.emit(CallAssign(self.fresh_sid(), temp, expr.callee, args, expr.span))
            return Var(temp)
        raise MiniTypeError(f"cannot lower {expr!r}", getattr(expr, "span", None))

    def _short_circuit(self, expr: BinaryExpr):
        temp = self.fresh_temp()
        self.emit(Assign(self.fresh_sid(), temp, self.lower_expr(expr.left), expr.span))
        rhs = self.new_block()
        done = self.new_block()
        if expr.op == "&&":
            self.terminate(Branch(self.fresh_sid(), Var(temp), rhs.id, done.id, expr.span))
        else:
            self.terminate(Branch(self.fresh_sid(), Var(temp), done.id, rhs.id, expr.span))
        self.current = rhs
        self.emit(Assign(self.fresh_sid(), temp, self.lower_expr(expr.right), expr.span))
        self.terminate(Jump(self.fresh_sid(), done.id, expr.span))
        self.current = done
        return Var(temp)

    # --- statements ----------------------------------------------------------

    def lower_block(self, block) -> None:
        for stmt in block.stmts:
            if self.current is None:
                break  # unreachable after return
            self.lower_stmt(stmt)

    def lower_stmt(self, stmt) -> None:
        if isinstance(stmt, (LetStmt, AssignStmt)):
            value = self.lower_expr(stmt.expr)
            self.emit(Assign(self.fresh_sid(), stmt.name, value, stmt.span))
        elif isinstance(stmt, CallStmt):
            args = tuple(self.lower_expr(a) for a in stmt.call.args)
            self.emit(CallAssign(self.fresh_sid(), None, stmt.call.callee, args, stmt.span))
        elif isinstance(stmt, IfStmt):
            cond = self.lower_expr(stmt.cond)
            then_b = self.new_block()
            else_b = self.new_block() if stmt.els is not None else None
            join = self.new_block()
            self.terminate(
                Branch(self.fresh_sid(), cond, then_b.id, (else_b or join).id, stmt.span)
            )
            self.current = then_b
            self.lower_block(stmt.then)
            if self.current is not None:
                self.terminate(Jump(self.fresh_sid(), join.id, stmt.span))
            if else_b is not None:
                self.current = else_b
                self.lower_block(stmt.els)
                if self.current is not None:
                    self.terminate(Jump(self.fresh_sid(), join.id, stmt.span))
            self.current = join
        elif isinstance(stmt, WhileStmt):
            header = self.new_block()
            self.terminate(Jump(self.fresh_sid(), header.id, stmt.span))
            self.current = header
            cond = self.lower_expr(stmt.cond)
            body_b = self.new_block()
            exit_b = self.new_block()
            self.terminate(Branch(self.fresh_sid(), cond, body_b.id, exit_b.id, stmt.span))
            self.current = body_b
            self.lower_block(stmt.body)
            if self.current is not None:
                self.terminate(Jump(self.fresh_sid(), header.id, stmt.span))
            self.current = exit_b
        elif isinstance(stmt, ReturnStmt):
            if stmt.expr is None:
                self.terminate(Return(self.fresh_sid(), None, stmt.span))
                return
            value = self.lower_expr(stmt.expr)
            if not is_atom(value):
                temp = self.fresh_temp()
                self.emit(Assign(self.fresh_sid(), temp, value, stmt.span))
                value = Var(temp)
            self.terminate(Return(self.fresh_sid(), value, stmt.span))
        else:
            raise MiniTypeError(f"cannot lower {stmt!r}", getattr(stmt, "span", None))

    # --- whole method ----------------------------------------------------------

    def lower(self) -> Cfg:
        entry = self.new_block()
        self.current = entry
        self.lower_block(self.method.body)
        tail = self.current
        if tail is not None:
            self.terminate(Return(self.fresh_sid(), None, self.method.span))
        reachable = self._reachable(entry.id)
        if tail is not None and tail.id in reachable and self.method.return_type is not None:
            raise MiniTypeError(
                f"missing return in {self.qname}: a path reaches the end of the body",
                self.method.span,
            )
        blocks = {
            b.id: BasicBlock(b.id, tuple(b.stmts), b.terminator)
            for b in self.blocks.values()
            if b.id in reachable
        }
        params = tuple((p.name, p.type) for p in self.method.params)
        return Cfg(self.qname, params, self.method.return_type, entry.id, blocks)

    def _reachable(self, entry_id: str) -> set:
        seen = {entry_id}
        stack = [entry_id]
        while stack:
            term = self.blocks[stack.pop()].terminator
            targets = ()
            if isinstance(term, Jump):
                targets = (term.target,)
            elif isinstance(term, Branch):
                targets = (term.then_target, term.else_target)
            for t in targets:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return seen


def lower_method(qname: str, method) -> Cfg:
    return _Lowerer(qname, method).lower()


class LoweringContext:
    """Lazy, cached, thread-safe lowering over a project method table.

    A method is type-checked and lowered at most once; `lower_counts`
    records how many times each lowering actually ran.
    """

    def __init__(self, table: dict):
        self._table = table
        self._cache: dict[str, Cfg] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._master = threading.Lock()
        self.lower_counts: Counter = Counter()

    @property
    def table(self) -> dict:
        return self._table

    def cfg(self, qname: str) -> Cfg:
        with self._master:
            cached = self._cache.get(qname)
            if cached is not None:
                return cached
            if qname not in self._table:
                raise UnknownElement(qname)
            lock = self._locks.setdefault(qname, threading.Lock())
        with lock:
            if qname not in self._cache:
                check_method(self._table[qname], self._table)
                cfg = lower_method(qname, self._table[qname])
                self.lower_counts[qname] += 1
                self._cache[qname] = cfg
        return self._cache[qname]
