"""Bounded symbolic path exploration over the lowered CFG form.

The explorer keeps one symbolic store per activation frame, mapping each
local to an expression over the entry method's parameter symbols: every
assignment substitutes the store into the right-hand side eagerly and
constant-folds, so branch conditions mention parameters only and the
collected path condition needs no renaming step afterwards.

Calls are inlined up to a depth bound, loops are unrolled up to a visit
bound per block, and the number of completed paths is capped; crossing
any bound sets the `truncated` flag on the result rather than raising,
so a method that never terminates still yields an (empty, truncated)
result.  BudgetExceeded is reserved for the degenerate case where the
bounds themselves forbid enumerating anything (a non-positive path cap).
"""

from __future__ import annotations

from dataclasses import dataclass

from ..minilang.cfg import (
    Assign,
    Binary,
    BoolConst,
    Branch,
    CallAssign,
    IntConst,
    Jump,
    Len,
    Matches,
    Return,
    StrConst,
    Unary,
    Var,
    int_div,
    int_mod,
    subst,
)
from ..regexlib import parse_regex
from ..regexlib.backtrack import match_pattern
from .constraints import (
    NEGATED_OP,
    BoolAtom,
    IntCmp,
    LinearExpr,
    PathCondition,
    StrEq,
    StrMatches,
    UnsupportedConstraint,
    len_symbol,
    lin_add,
    lin_const,
    lin_scale,
    lin_sub,
    lin_var,
)

_CONST_NODES = (IntConst, BoolConst, StrConst)


class BudgetExceeded(Exception):
    """No path completed within the exploration bounds."""


@dataclass(frozen=True)
class Bounds:
    loop_unroll: int = 8
    max_paths: int = 10_000
    inline_depth: int = 8


@dataclass(frozen=True)
class Target:
    kind: str  # "statement" | "call"
    method: str | None = None
    sid: str | None = None
    callee: str | None = None

    @staticmethod
    def statement(method: str, sid: str) -> "Target":
        return Target("statement", method=method, sid=sid)

    @staticmethod
    def call(callee: str) -> "Target":
        return Target("call", callee=callee)


@dataclass(frozen=True)
class PathEnd:
    condition: PathCondition
    reached: bool
    return_expr: object = None  # folded Return atom when the path ended at one


@dataclass(frozen=True)
class ExplorationResult:
    paths: tuple
    truncated: bool

    @property
    def explored(self) -> int:
        return len(self.paths)


def fold(expr):
    """Constant-fold a store-substituted expression.

    Division by zero is left unfolded; the encoder then reports the
    condition as unsupported instead of guessing a semantics.
    """
    if isinstance(expr, (Var,) + _CONST_NODES):
        return expr
    if isinstance(expr, Unary):
        inner = fold(expr.operand)
        if expr.op == "!" and isinstance(inner, BoolConst):
            return BoolConst(not inner.value)
        if expr.op == "-" and isinstance(inner, IntConst):
            return IntConst(-inner.value)
        return Unary(expr.op, inner)
    if isinstance(expr, Binary):
        left = fold(expr.left)
        right = fold(expr.right)
        if isinstance(left, _CONST_NODES) and isinstance(right, _CONST_NODES):
            value = _const_binary(expr.op, left.value, right.value)
            if value is not None:
                return IntConst(value) if isinstance(value, int) and not isinstance(value, bool) else BoolConst(value)
        return Binary(expr.op, left, right)
    if isinstance(expr, Len):
        inner = fold(expr.operand)
        if isinstance(inner, StrConst):
            return IntConst(len(inner.value))
        return Len(inner)
    if isinstance(expr, Matches):
        inner = fold(expr.operand)
        if isinstance(inner, StrConst):
            return BoolConst(match_pattern(expr.pattern, inner.value))
        return Matches(inner, expr.pattern)
    raise TypeError(f"unexpected IR expression {expr!r}")


def _const_binary(op: str, left, right):
    if op == "+":
        return left + right
    if op == "-":
        return left - right
    if op == "*":
        return left * right
    if op == "/":
        return None if right == 0 else int_div(left, right)
    if op == "%":
        return None if right == 0 else int_mod(left, right)
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
    return None


class _NonLinear(Exception):
    def __init__(self, reason: str):
        self.reason = reason


def _linear_of(expr) -> LinearExpr:
    if isinstance(expr, IntConst):
        return lin_const(expr.value)
    if isinstance(expr, Var):
        return lin_var(expr.name)
    if isinstance(expr, Len):
        if isinstance(expr.operand, Var):
            return lin_var(len_symbol(expr.operand.name))
        raise _NonLinear("length of a compound string expression")
    if isinstance(expr, Unary) and expr.op == "-":
        return lin_scale(_linear_of(expr.operand), -1)
    if isinstance(expr, Binary):
        if expr.op == "+":
            return lin_add(_linear_of(expr.left), _linear_of(expr.right))
        if expr.op == "-":
            return lin_sub(_linear_of(expr.left), _linear_of(expr.right))
        if expr.op == "*":
            left = fold(expr.left)
            right = fold(expr.right)
            if isinstance(left, IntConst):
                return lin_scale(_linear_of(right), left.value)
            if isinstance(right, IntConst):
                return lin_scale(_linear_of(left), right.value)
            raise _NonLinear("nonlinear multiplication")
        raise _NonLinear(f"operator {expr.op!r} is not linear")
    raise _NonLinear(f"integer expression {type(expr).__name__} is not linear")


def encode_condition(cond, expected: bool, sorts: dict):
    """One constraint equivalent to `cond == expected`, or Unsupported.

    `sorts` maps entry parameter names to their declared types, settling
    the sort of bare variable comparisons.
    """
    if isinstance(cond, BoolConst):
        # Ground truth with no symbols: encode as a trivially true or
        # false comparison so the solver settles it uniformly.
        return IntCmp("==" if cond.value is expected else "!=", lin_const(0))
    if isinstance(cond, Var):
        return BoolAtom(cond.name, expected)
    if isinstance(cond, Unary) and cond.op == "!":
        return encode_condition(cond.operand, not expected, sorts)
    if isinstance(cond, Matches):
        if isinstance(cond.operand, Var):
            return StrMatches(cond.operand.name, parse_regex(cond.pattern),
                              positive=expected, pattern=cond.pattern)
        return UnsupportedConstraint("matches over a compound string expression")
    if isinstance(cond, Binary) and cond.op in ("<", "<=", ">", ">=", "==", "!="):
        left, right = cond.left, cond.right
        sort = _operand_sort(left, sorts) or _operand_sort(right, sorts)
        if sort == "string":
            return _encode_string_eq(cond, expected)
        if sort == "bool":
            return _encode_bool_eq(cond, expected)
        op = cond.op if expected else NEGATED_OP[cond.op]
        try:
            return IntCmp(op, lin_sub(_linear_of(left), _linear_of(right)))
        except _NonLinear as err:
            return UnsupportedConstraint(err.reason)
    return UnsupportedConstraint(f"condition shape {type(cond).__name__}")


def _operand_sort(expr, sorts: dict) -> str | None:
    if isinstance(expr, StrConst):
        return "string"
    if isinstance(expr, BoolConst):
        return "bool"
    if isinstance(expr, IntConst):
        return "int"
    if isinstance(expr, Var):
        return sorts.get(expr.name)
    if isinstance(expr, (Matches,)):
        return "bool"
    if isinstance(expr, (Len,)):
        return "int"
    if isinstance(expr, (Binary, Unary)):
        return None  # typed int or bool; the int path handles both attempts
    return None


def _encode_string_eq(cond: Binary, expected: bool):
    # Only Var-vs-literal survives folding with a definite answer.
    var, lit = cond.left, cond.right
    if isinstance(var, StrConst):
        var, lit = lit, var
    if not (isinstance(var, Var) and isinstance(lit, StrConst)):
        return UnsupportedConstraint("string comparison between two unknowns")
    if cond.op not in ("==", "!="):
        return UnsupportedConstraint(f"string comparison {cond.op!r}")
    wants_equal = (cond.op == "==") is expected
    if wants_equal:
        return StrEq(var.name, lit.value)
    return StrMatches(var.name, _literal_regex(lit.value), positive=False,
                      pattern=None)


def _literal_regex(text: str):
    from ..regexlib.syntax import Concat, Literal

    return Concat(tuple(Literal(ch) for ch in text))


def _encode_bool_eq(cond: Binary, expected: bool):
    var, lit = cond.left, cond.right
    if isinstance(var, BoolConst):
        var, lit = lit, var
    if not (isinstance(var, Var) and isinstance(lit, BoolConst)):
        return UnsupportedConstraint("boolean comparison between two unknowns")
    if cond.op not in ("==", "!="):
        return UnsupportedConstraint(f"boolean comparison {cond.op!r}")
    wants_equal = (cond.op == "==") is expected
    return BoolAtom(var.name, lit.value if wants_equal else not lit.value)


def div_guards(expr):
    """(guards, faults, unsupported reason) for the divisions inside `expr`.

    A path that evaluates `expr` without faulting implies every divisor was
    nonzero, so each division contributes an IntCmp `divisor != 0` guard.
    A literal zero divisor means the evaluation always faults; a divisor
    with no linear form yields an unsupported-reason instead.
    """
    guards: list = []
    faults = False
    unsupported = None

    def walk(e) -> None:
        nonlocal faults, unsupported
        if isinstance(e, Binary):
            walk(e.left)
            walk(e.right)
            if e.op in ("/", "%"):
                divisor = e.right
                if isinstance(divisor, IntConst):
                    if divisor.value == 0:
                        faults = True
                else:
                    try:
                        guards.append(IntCmp("!=", _linear_of(divisor)))
                    except _NonLinear as err:
                        unsupported = f"division guard: {err.reason}"
        elif isinstance(e, Unary):
            walk(e.operand)
        elif isinstance(e, (Len, Matches)):
            walk(e.operand)

    walk(expr)
    return guards, faults, unsupported


@dataclass
class _Frame:
    qname: str
    cfg: object
    block: str
    index: int
    store: dict  # local name -> folded expression over entry symbols
    visits: dict  # block id -> entries on this path
    ret_target: str | None  # caller variable receiving the return value

    def clone(self) -> "_Frame":
        return _Frame(self.qname, self.cfg, self.block, self.index,
                      dict(self.store), dict(self.visits), self.ret_target)


@dataclass
class _State:
    frames: list
    constraints: tuple = ()
    spans: tuple = ()

    def clone(self) -> "_State":
        return _State([f.clone() for f in self.frames], self.constraints, self.spans)


def explore_paths(cfg, bounds: Bounds = Bounds(), target: Target | None = None,
                  resolve=None) -> ExplorationResult:
    """Enumerate feasible-looking paths of `cfg` up to the given bounds.

    `resolve` maps a callee qname to its Cfg for inlining; without it any
    call site ends the path and sets the truncation flag.  Each completed
    path reports whether it hit `target` (a statement in some inlined
    frame, or a call to a given method) before finishing.
    """
    if bounds.max_paths < 1:
        raise BudgetExceeded("path budget forbids completing any path")
    sorts = dict(cfg.params)
    paths: list = []
    flags = {"truncated": False}

    root = _Frame(cfg.method, cfg, cfg.entry, 0, {}, {cfg.entry: 1}, None)
    stack = [_State([root])]

    while stack:
        if len(paths) >= bounds.max_paths:
            flags["truncated"] = True
            break
        state = stack.pop()
        outcome = _run(state, stack, bounds, target, resolve, sorts, flags)
        if outcome is not None:
            paths.append(outcome)

    return ExplorationResult(tuple(paths), flags["truncated"])


def _run(state: _State, stack: list, bounds: Bounds, target, resolve, sorts,
         flags: dict):
    """Advance one state until it completes (PathEnd), dies (None), or forks."""
    while True:
        frame = state.frames[-1]
        block = frame.cfg.block(frame.block)

        if frame.index < len(block.statements):
            stmt = block.statements[frame.index]
            if _is_statement_target(target, frame, stmt):
                return _finish(state, reached=True)
            if isinstance(stmt, Assign):
                value = fold(subst(stmt.expr, frame.store))
                if not _guard(state, value, stmt.span):
                    return _finish(state, reached=False)
                frame.store[stmt.target] = value
                frame.index += 1
                continue
            if isinstance(stmt, CallAssign):
                args = [fold(subst(a, frame.store)) for a in stmt.args]
                for arg in args:
                    if not _guard(state, arg, stmt.span):
                        return _finish(state, reached=False)
                if target is not None and target.kind == "call" and stmt.callee == target.callee:
                    return _finish(state, reached=True)
                if resolve is None or len(state.frames) > bounds.inline_depth:
                    flags["truncated"] = True
                    return None
                callee = resolve(stmt.callee)
                store = {name: arg for (name, _), arg in zip(callee.params, args)}
                frame.index += 1
                state.frames.append(_Frame(callee.method, callee, callee.entry, 0,
                                           store, {callee.entry: 1}, stmt.target))
                continue
            raise TypeError(f"unexpected statement {stmt!r}")

        term = block.terminator
        if _is_statement_target(target, frame, term):
            value = None
            if isinstance(term, Return) and term.value is not None:
                value = fold(subst(term.value, frame.store))
            return _finish(state, reached=True, return_expr=value)

        if isinstance(term, Jump):
            if not _enter(frame, term.target, bounds):
                flags["truncated"] = True
                return None
            continue

        if isinstance(term, Branch):
            cond = fold(subst(term.cond, frame.store))
            if not _guard(state, cond, term.span):
                return _finish(state, reached=False)
            if isinstance(cond, BoolConst):
                arm = term.then_target if cond.value else term.else_target
                if not _enter(frame, arm, bounds):
                    flags["truncated"] = True
                    return None
                continue
            for arm, expected in ((term.else_target, False), (term.then_target, True)):
                branch = state.clone()
                forked = branch.frames[-1]
                if not _enter(forked, arm, bounds):
                    flags["truncated"] = True
                    continue
                constraint = encode_condition(cond, expected, sorts)
                branch.constraints = state.constraints + (constraint,)
                branch.spans = state.spans + (term.span,)
                stack.append(branch)
            return None

        if isinstance(term, Return):
            value = None
            if term.value is not None:
                value = fold(subst(term.value, frame.store))
            if len(state.frames) == 1:
                return _finish(state, reached=False, return_expr=value)
            state.frames.pop()
            caller = state.frames[-1]
            if frame.ret_target is not None:
                caller.store[frame.ret_target] = value
            continue

        raise TypeError(f"unexpected terminator {term!r}")


def _guard(state: _State, expr, span) -> bool:
    """Record division side conditions for `expr`; False means it must fault."""
    guards, faults, unsupported = div_guards(expr)
    for g in guards:
        state.constraints += (g,)
        state.spans += (span,)
    if unsupported is not None:
        state.constraints += (UnsupportedConstraint(unsupported),)
        state.spans += (span,)
    return not faults


def _enter(frame: _Frame, block_id: str, bounds: Bounds) -> bool:
    count = frame.visits.get(block_id, 0) + 1
    if count > bounds.loop_unroll:
        return False
    frame.visits[block_id] = count
    frame.block = block_id
    frame.index = 0
    return True


def _is_statement_target(target, frame: _Frame, stmt) -> bool:
    return (target is not None and target.kind == "statement"
            and frame.qname == target.method and stmt.sid == target.sid)


def _finish(state: _State, reached: bool, return_expr=None) -> PathEnd:
    return PathEnd(PathCondition(state.constraints, state.spans), reached, return_expr)
