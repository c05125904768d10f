"""Generic monotone data-flow framework with a worklist solver.

A problem supplies the lattice pieces (bottom, join, equals) and a
transfer function over whole blocks.  Entry/exit boundary facts are the
problem's business: instances are built per CFG, so the transfer closure
can special-case the entry block (reaching definitions seeds parameter
pseudo-definitions that way).

The solver is direction-agnostic: backward problems run on the reversed
flow graph, with `in` holding the transfer output (facts at block entry)
and `out` the join over successors.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable

DEFAULT_BUDGET = 1_000_000


class AnalysisBudgetExceeded(Exception):
    pass


@dataclass
class DataflowProblem:
    direction: str  # "forward" | "backward"
    bottom: object
    join: Callable
    transfer: Callable  # (block, value) -> value
    equals: Callable


@dataclass
class DataflowResult:
    in_values: dict  # block id -> value at block entry
    out_values: dict  # block id -> value at block exit
    iterations: int


def _edges(cfg) -> tuple[dict, dict]:
    succs = {bid: list(cfg.successors(bid)) for bid in cfg.blocks}
    preds: dict = {bid: [] for bid in cfg.blocks}
    for bid, targets in succs.items():
        for t in targets:
            preds[t].append(bid)
    return succs, preds


def solve_dataflow(cfg, problem: DataflowProblem, budget: int = DEFAULT_BUDGET, order=None):
    """Worklist iteration to fixpoint; raises AnalysisBudgetExceeded after
    `budget` block visits.  `order` only seeds the initial worklist; the
    result is the same for every order (least fixpoint)."""
    if problem.direction not in ("forward", "backward"):
        raise ValueError(f"bad direction {problem.direction!r}")
    succs, preds = _edges(cfg)
    if problem.direction == "backward":
        succs, preds = preds, succs
    # `sources` feed a block's input; `sinks` consume its output
    sources, sinks = preds, succs

    in_values = {bid: problem.bottom for bid in cfg.blocks}
    out_values = {bid: problem.bottom for bid in cfg.blocks}
    worklist = deque(order if order is not None else cfg.blocks)
    queued = set(worklist)
    visits = 0
    while worklist:
        visits += 1
        if visits > budget:
            raise AnalysisBudgetExceeded(f"{visits} block visits on {cfg.method}")
        bid = worklist.popleft()
        queued.discard(bid)
        incoming = problem.bottom
        for src in sources[bid]:
            incoming = problem.join(incoming, out_values[src])
        in_values[bid] = incoming
        outgoing = problem.transfer(cfg.blocks[bid], incoming)
        if not problem.equals(outgoing, out_values[bid]):
            out_values[bid] = outgoing
            for nxt in sinks[bid]:
                if nxt not in queued:
                    queued.add(nxt)
                    worklist.append(nxt)

    if problem.direction == "backward":
        # report values in CFG orientation: in = facts at block entry
        return DataflowResult(out_values, in_values, visits)
    return DataflowResult(in_values, out_values, visits)
