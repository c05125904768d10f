"""Reaching definitions, liveness, def-use closure, and method summaries.

Definition ids: a real statement sid, `param:<i>` for the pseudo-def a
parameter gets at entry, or `uninit:<v>` for the synthetic uninitialized
def every local starts with (a use reached by one would be a
read-before-write).  Lattice values are frozensets of (variable, def-id)
pairs.

Dependency is data dependence only: branch conditions propagate nothing
(a method called only under a tainted `if` is not data-dependent).  Call
results are handled opaquely here (any tainted argument taints the
CallAssign target), which keeps lone-CFG summaries sound; the
interprocedural pass refines this with callee summaries.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..minilang.cfg import Assign, Branch, CallAssign, Jump, Return, expr_vars
from .dataflow import DataflowProblem, DataflowResult, solve_dataflow


class UnknownSeed(Exception):
    pass


def statement_def(stmt) -> str | None:
    if isinstance(stmt, Assign):
        return stmt.target
    if isinstance(stmt, CallAssign):
        return stmt.target
    return None


def statement_uses(stmt) -> set:
    if isinstance(stmt, Assign):
        return expr_vars(stmt.expr)
    if isinstance(stmt, CallAssign):
        out = set()
        for arg in stmt.args:
            out |= expr_vars(arg)
        return out
    if isinstance(stmt, Branch):
        return expr_vars(stmt.cond)
    if isinstance(stmt, Return):
        return expr_vars(stmt.value) if stmt.value is not None else set()
    if isinstance(stmt, Jump):
        return set()
    raise TypeError(f"not a CFG statement: {stmt!r}")


def _locals_of(cfg) -> set:
    out = set()
    for _, stmt in cfg.all_statements():
        target = statement_def(stmt)
        if target is not None:
            out.add(target)
    return out - {name for name, _ in cfg.params}


def _entry_defs(cfg) -> frozenset:
    defs = {(name, f"param:{i}") for i, (name, _) in enumerate(cfg.params)}
    defs |= {(v, f"uninit:{v}") for v in _locals_of(cfg)}
    return frozenset(defs)


def _step(defs: set, stmt) -> set:
    target = statement_def(stmt)
    if target is None:
        return defs
    return {(v, d) for v, d in defs if v != target} | {(target, stmt.sid)}


@dataclass
class ReachingResult:
    """Block-level dataflow result plus statement-level lookups."""

    cfg: object
    result: DataflowResult

    def at_statement(self, sid: str) -> frozenset:
        """Definitions reaching the given statement or terminator."""
        for block in self.cfg.blocks.values():
            defs = set(self.result.in_values[block.id])
            if block.id == self.cfg.entry:
                defs |= _entry_defs(self.cfg)
            for stmt in block.statements:
                if stmt.sid == sid:
                    return frozenset(defs)
                defs = _step(defs, stmt)
            if block.terminator.sid == sid:
                return frozenset(defs)
        raise KeyError(sid)


def reaching_definitions(cfg) -> ReachingResult:
    def transfer(block, value):
        defs = set(value)
        if block.id == cfg.entry:
            defs |= _entry_defs(cfg)
        for stmt in block.statements:
            defs = _step(defs, stmt)
        return frozenset(defs)

    problem = DataflowProblem(
        direction="forward",
        bottom=frozenset(),
        join=lambda a, b: a | b,
        transfer=transfer,
        equals=lambda a, b: a == b,
    )
    return ReachingResult(cfg, solve_dataflow(cfg, problem))


def liveness(cfg) -> DataflowResult:
    """Backward may-liveness; in_values[b] = variables live at block entry."""

    def transfer(block, live):
        live = set(live)
        live |= statement_uses(block.terminator)
        for stmt in reversed(block.statements):
            target = statement_def(stmt)
            if target is not None:
                live.discard(target)
            live |= statement_uses(stmt)
        return frozenset(live)

    problem = DataflowProblem(
        direction="backward",
        bottom=frozenset(),
        join=lambda a, b: a | b,
        transfer=transfer,
        equals=lambda a, b: a == b,
    )
    return solve_dataflow(cfg, problem)


# --- def-use dependency ---------------------------------------------------------


def _seed_pairs(cfg, seed) -> frozenset:
    params = [name for name, _ in cfg.params]
    if isinstance(seed, int):
        if not 0 <= seed < len(params):
            raise UnknownSeed(f"parameter index {seed} out of range for {cfg.method}")
        return frozenset({(params[seed], f"param:{seed}")})
    if seed in params:
        i = params.index(seed)
        return frozenset({(seed, f"param:{i}")})
    defs = {
        (seed, stmt.sid)
        for _, stmt in cfg.all_statements()
        if statement_def(stmt) == seed
    }
    if not defs:
        raise UnknownSeed(f"{seed!r} is neither a parameter nor assigned in {cfg.method}")
    return frozenset(defs)


def _dependency(cfg, tainted: set) -> tuple[set, set]:
    """Worklist closure: returns (tainted def pairs, dependent statement sids).

    Branches are skipped (control dependence is out of scope); Jump has
    no data at all; Assign/CallAssign/Return join the result when they
    read a tainted definition, and value-producing statements re-taint
    their own definition.
    """
    reaching = reaching_definitions(cfg)
    dependent: set = set()
    changed = True
    while changed:
        changed = False
        for _, stmt in cfg.all_statements():
            if isinstance(stmt, (Branch, Jump)) or stmt.sid in dependent:
                continue
            uses = statement_uses(stmt)
            if not uses:
                continue
            live_defs = reaching.at_statement(stmt.sid)
            if any(pair in tainted and pair[0] in uses for pair in live_defs):
                dependent.add(stmt.sid)
                target = statement_def(stmt)
                if target is not None:
                    tainted.add((target, stmt.sid))
                changed = True
    return tainted, dependent


def dependency_closure(cfg, seed) -> set:
    """Sids of statements whose computed value depends on the seed
    (a parameter index or a variable name); data dependence only."""
    tainted = set(_seed_pairs(cfg, seed))
    _, dependent = _dependency(cfg, tainted)
    return dependent


@dataclass(frozen=True)
class MethodSummary:
    method: str
    param_to_return: frozenset  # param indices that may flow to the return value
    param_to_call_arg: frozenset  # (param index, call-site sid, arg index)


def method_summary(cfg) -> MethodSummary:
    """Flow relation of one method, over-approximate by construction."""
    to_return = set()
    to_call_arg = set()
    returns = {
        stmt.sid for _, stmt in cfg.all_statements() if isinstance(stmt, Return)
    }
    reaching = reaching_definitions(cfg)
    for i in range(len(cfg.params)):
        tainted = set(_seed_pairs(cfg, i))
        tainted, dependent = _dependency(cfg, tainted)
        if dependent & returns:
            to_return.add(i)
        for _, stmt in cfg.all_statements():
            if not isinstance(stmt, CallAssign):
                continue
            live = reaching.at_statement(stmt.sid)
            for j, arg in enumerate(stmt.args):
                arg_vars = expr_vars(arg)
                if any(pair in tainted for pair in live if pair[0] in arg_vars):
                    to_call_arg.add((i, stmt.sid, j))
    return MethodSummary(cfg.method, frozenset(to_return), frozenset(to_call_arg))
