"""Concrete big-step execution over lowered CFGs.

This is the ground-truth companion to the symbolic explorer: models
produced by the solver are replayed here, and the trace must actually
visit the queried target.  It deliberately runs on the CFG form rather
than reusing the AST interpreter, so the two can cross-check lowering.
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
)
from ..regexlib.backtrack import match_pattern

DEFAULT_FUEL = 1_000_000

_SORT_CHECK = {"int": int, "bool": bool, "string": str}


class FuelExhausted(Exception):
    pass


class ConcreteError(Exception):
    """Runtime fault: bad arguments, division by zero, missing method."""


@dataclass(frozen=True)
class Trace:
    visited: tuple  # (method, statement-id) pairs, terminators included
    calls: tuple    # (callee, arg tuple) per call site, in execution order
    value: object   # the entry method's return value (None for void)

    def visited_call(self, callee: str) -> bool:
        return any(c == callee for c, _ in self.calls)


class _Fuel:
    def __init__(self, amount: int):
        self.left = amount

    def spend(self) -> None:
        if self.left <= 0:
            raise FuelExhausted("step budget exhausted")
        self.left -= 1


def concrete_execute(resolve, method: str, args, fuel: int = DEFAULT_FUEL) -> Trace:
    """Run `method` on concrete `args`; `resolve` maps qnames to CFGs."""
    trace, error = try_execute(resolve, method, args, fuel)
    if error is not None:
        raise error
    return trace


def try_execute(resolve, method: str, args, fuel: int = DEFAULT_FUEL):
    """(trace, error or None); the trace is partial when a fault cut it off.

    Faulting runs still visited everything up to the fault, which is what
    reachability verification needs to inspect.
    """
    cfg = resolve(method)
    visited: list = []
    calls: list = []
    try:
        value = _call(resolve, cfg, list(args), _Fuel(fuel), visited, calls)
    except (ConcreteError, FuelExhausted) as err:
        return Trace(tuple(visited), tuple(calls), None), err
    return Trace(tuple(visited), tuple(calls), value), None


def _call(resolve, cfg, args, fuel: _Fuel, visited, calls):
    if len(args) != len(cfg.params):
        raise ConcreteError(
            f"{cfg.method} takes {len(cfg.params)} arguments, got {len(args)}")
    env: dict = {}
    for (name, type_), value in zip(cfg.params, args):
        expected = _SORT_CHECK[type_]
        if not isinstance(value, expected) or (expected is int and isinstance(value, bool)):
            raise ConcreteError(f"{cfg.method} parameter {name} expects {type_}")
        env[name] = value

    block = cfg.block(cfg.entry)
    while True:
        for stmt in block.statements:
            fuel.spend()
            visited.append((cfg.method, stmt.sid))
            if isinstance(stmt, Assign):
                env[stmt.target] = _eval(stmt.expr, env)
            elif isinstance(stmt, CallAssign):
                arg_values = [_eval(a, env) for a in stmt.args]
                calls.append((stmt.callee, tuple(arg_values)))
                callee = resolve(stmt.callee)
                result = _call(resolve, callee, arg_values, fuel, visited, calls)
                if stmt.target is not None:
                    env[stmt.target] = result
            else:
                raise ConcreteError(f"unexpected statement {stmt!r}")

        term = block.terminator
        fuel.spend()
        visited.append((cfg.method, term.sid))
        if isinstance(term, Jump):
            block = cfg.block(term.target)
        elif isinstance(term, Branch):
            taken = term.then_target if _eval(term.cond, env) else term.else_target
            block = cfg.block(taken)
        elif isinstance(term, Return):
            return _eval(term.value, env) if term.value is not None else None
        else:
            raise ConcreteError(f"unexpected terminator {term!r}")


def _eval(expr, env: dict):
    if isinstance(expr, Var):
        return env[expr.name]
    if isinstance(expr, (IntConst, BoolConst, StrConst)):
        return expr.value
    if isinstance(expr, Unary):
        value = _eval(expr.operand, env)
        return (not value) if expr.op == "!" else -value
    if isinstance(expr, Binary):
        left = _eval(expr.left, env)
        right = _eval(expr.right, env)
        return _binary(expr.op, left, right)
    if isinstance(expr, Len):
        return len(_eval(expr.operand, env))
    if isinstance(expr, Matches):
        return match_pattern(expr.pattern, _eval(expr.operand, env))
    raise ConcreteError(f"unexpected expression {expr!r}")


def _binary(op: str, left, right):
    if op == "+":
        return left + right
    if op == "-":
        return left - right
    if op == "*":
        return left * right
    if op == "/":
        if right == 0:
            raise ConcreteError("division by zero")
        return int_div(left, right)
    if op == "%":
        if right == 0:
            raise ConcreteError("division by zero")
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
    raise ConcreteError(f"unknown operator {op!r}")
