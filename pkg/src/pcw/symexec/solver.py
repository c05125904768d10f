"""Decision procedure for conjunctions of path constraints.

Strategy: split the conjunction into partitions of symbols connected by
shared constraints (a `len(s)` term links the string `s` into an integer
partition), then decide each partition on its own.

Strings are handled exactly: every string constraint becomes a DFA and
the intersection is checked for emptiness, so "unsat" on a pure-string
partition is a proof.  Integers are narrowed by interval reasoning,
first per constraint and then by propagating bounds across multi-symbol
linear constraints, and finally enumerated over a bounded window; if a
symbol's range was clipped by the window rather than by the constraints
themselves, exhausting it yields Unknown, never Unsat.  Models are
always re-checked by the constraint evaluator before being returned.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..regexlib import (
    StateBudgetExceeded,
    dfa_complement,
    dfa_for_length,
    dfa_for_literal,
    dfa_product,
    dfa_witness,
    regex_to_dfa,
)
from .constraints import (
    BoolAtom,
    IntCmp,
    SolverModel,
    StrEq,
    StrLen,
    StrMatches,
    UnsupportedConstraint,
    constraint_symbols,
    evaluate_constraint,
    infer_sorts,
    len_operand,
    len_symbol,
)

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"


class SolverError(Exception):
    """Internal soundness failure: a model did not satisfy its constraints."""


@dataclass(frozen=True)
class SolverConfig:
    int_low: int = -1024
    int_high: int = 1024
    max_string_length: int = 256
    state_budget: int = 100_000
    enum_cap: int = 500_000
    solver_cmd: str | None = None
    solver_timeout: float = 10.0


@dataclass(frozen=True)
class CheckResult:
    status: str
    model: SolverModel | None = None
    reason: str | None = None


def check_sat(constraints, config: SolverConfig = SolverConfig()) -> CheckResult:
    constraints = tuple(constraints)
    for c in constraints:
        if isinstance(c, UnsupportedConstraint):
            return CheckResult(UNKNOWN, reason=c.reason)
    sorts = infer_sorts(constraints)

    # Symbol-free constraints (constant comparisons) are decided outright;
    # partitioning would silently drop them.
    grounded = []
    for c in constraints:
        if constraint_symbols(c):
            grounded.append(c)
        elif not evaluate_constraint(c, {}):
            return CheckResult(UNSAT)
    constraints = tuple(grounded)

    groups = _partition(constraints)
    values: dict = {}
    unknown_reason = None
    for group in groups:
        res = _solve_partition(group, sorts, config)
        if res.status == UNSAT:
            return CheckResult(UNSAT)
        if res.status == UNKNOWN:
            unknown_reason = unknown_reason or res.reason
        else:
            values.update(res.model.as_dict())
    if unknown_reason is not None:
        return CheckResult(UNKNOWN, reason=unknown_reason)

    model = SolverModel.of(values)
    _verify(constraints, model)
    return CheckResult(SAT, model=model)


def _verify(constraints, model: SolverModel) -> None:
    values = model.as_dict()
    for c in constraints:
        if not evaluate_constraint(c, values):
            raise SolverError(f"model {values!r} violates {c!r}")


def _partition(constraints):
    """Group constraints whose symbol sets are transitively connected."""
    parent: dict = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    sym_sets = [constraint_symbols(c) for c in constraints]
    for syms in sym_sets:
        for s in syms:
            parent.setdefault(s, s)
        first = next(iter(syms), None)
        for s in syms:
            union(first, s)

    groups: dict = {}
    for c, syms in zip(constraints, sym_sets):
        if not syms:
            continue
        groups.setdefault(find(next(iter(syms))), []).append(c)
    return list(groups.values())


@dataclass
class _Interval:
    lo: int | None = None  # None means unbounded on that side
    hi: int | None = None
    empty: bool = False

    def clamp_lo(self, v: int) -> None:
        if self.lo is None or v > self.lo:
            self.lo = v

    def clamp_hi(self, v: int) -> None:
        if self.hi is None or v < self.hi:
            self.hi = v


def _ceil_div(p: int, q: int) -> int:
    return -((-p) // q)


def _narrow(interval: _Interval, op: str, a: int, c: int) -> None:
    """Fold `a*x + c op 0` (a != 0) into the interval for x."""
    if a < 0:
        a, c = -a, -c
        op = {"<": ">", "<=": ">=", ">": "<", ">=": "<="}.get(op, op)
    if op == "<":  # a*x <= -c - 1
        interval.clamp_hi((-c - 1) // a)
    elif op == "<=":
        interval.clamp_hi((-c) // a)
    elif op == ">":  # a*x >= -c + 1
        interval.clamp_lo(_ceil_div(-c + 1, a))
    elif op == ">=":
        interval.clamp_lo(_ceil_div(-c, a))
    elif op == "==":
        if (-c) % a != 0:
            interval.empty = True
        else:
            v = (-c) // a
            interval.clamp_lo(v)
            interval.clamp_hi(v)
    # "!=" gives no interval information


def _apply_upper(iv: _Interval, a: int, bound: int) -> None:
    """Fold `a*x <= bound` into the interval."""
    if a > 0:
        iv.clamp_hi(bound // a)
    else:
        iv.clamp_lo(_ceil_div(bound, a))


def _apply_lower(iv: _Interval, a: int, bound: int) -> None:
    """Fold `a*x >= bound` into the interval."""
    if a > 0:
        iv.clamp_lo(_ceil_div(bound, a))
    else:
        iv.clamp_hi(bound // a)


def _residual_bounds(terms, skip: int, intervals: dict):
    """Bounds of the sum of every term but `terms[skip]`; None = unbounded."""
    lo: int | None = 0
    hi: int | None = 0
    for i, (s, a) in enumerate(terms):
        if i == skip:
            continue
        iv = intervals[s]
        t_lo, t_hi = (iv.lo, iv.hi) if a > 0 else (iv.hi, iv.lo)
        if lo is not None:
            lo = None if t_lo is None else lo + a * t_lo
        if hi is not None:
            hi = None if t_hi is None else hi + a * t_hi
    return lo, hi


def _propagate(intervals: dict, int_cmps) -> bool:
    """Narrow intervals through multi-symbol constraints to a fixpoint.

    For `a*x + R + c op 0`, x keeps only values for which SOME value of
    the residual R inside the other symbols' boxes can still satisfy the
    constraint, so no solution is ever dropped and an emptied range is a
    proof of unsat (returned as False).
    """
    multi = [c for c in int_cmps if len(c.expr.terms) > 1 and c.op != "!="]
    if not multi:
        return True
    for _ in range(8):  # rounds only ever shrink; cutoff keeps this cheap
        changed = False
        for c in multi:
            for j, (sym, coeff) in enumerate(c.expr.terms):
                rest_lo, rest_hi = _residual_bounds(c.expr.terms, j, intervals)
                iv = intervals[sym]
                before = (iv.lo, iv.hi)
                if c.op in ("<", "<=", "==") and rest_lo is not None:
                    bound = -c.expr.const - rest_lo
                    if c.op == "<":
                        bound -= 1
                    _apply_upper(iv, coeff, bound)
                if c.op in (">", ">=", "==") and rest_hi is not None:
                    bound = -c.expr.const - rest_hi
                    if c.op == ">":
                        bound += 1
                    _apply_lower(iv, coeff, bound)
                if iv.lo is not None and iv.hi is not None and iv.lo > iv.hi:
                    iv.empty = True
                if iv.empty:
                    return False
                changed = changed or (iv.lo, iv.hi) != before
        if not changed:
            break
    return True


def _candidates(interval: _Interval, low: int, high: int):
    """Window-clipped candidate list plus whether the clip lost anything.

    Values are ordered small-magnitude first so enumeration finds natural
    witnesses before extreme ones.
    """
    lo = low if interval.lo is None else max(interval.lo, low)
    hi = high if interval.hi is None else min(interval.hi, high)
    clipped = (interval.lo is None or interval.lo < low or
               interval.hi is None or interval.hi > high)
    if lo > hi:
        return [], clipped
    ordered = sorted(range(lo, hi + 1), key=lambda v: (abs(v), v < 0))
    return ordered, clipped


def _solve_partition(group, sorts, config: SolverConfig) -> CheckResult:
    bools: dict = {}
    int_cmps = []
    str_cons: dict = {}  # string symbol -> [constraints]
    len_linked: set = set()

    for c in group:
        if isinstance(c, BoolAtom):
            if bools.setdefault(c.symbol, c.expected) != c.expected:
                return CheckResult(UNSAT)
        elif isinstance(c, IntCmp):
            int_cmps.append(c)
            for s, _ in c.expr.terms:
                inner = len_operand(s)
                if inner is not None:
                    len_linked.add(inner)
                    str_cons.setdefault(inner, [])
        elif isinstance(c, (StrLen, StrEq, StrMatches)):
            str_cons.setdefault(c.symbol, []).append(c)
        else:
            raise TypeError(f"unexpected constraint {c!r}")

    # Integer unknowns: plain int symbols plus len(s) pseudo-symbols.
    intervals: dict = {}
    for c in int_cmps:
        for s, _ in c.expr.terms:
            intervals.setdefault(s, _Interval())
    for s in intervals:
        if len_operand(s) is not None:
            intervals[s].clamp_lo(0)

    for c in int_cmps:
        if len(c.expr.terms) == 1:
            (s, a), = c.expr.terms
            _narrow(intervals[s], c.op, a, c.expr.const)
    if any(iv.empty for iv in intervals.values()):
        return CheckResult(UNSAT)
    for iv in intervals.values():
        if iv.lo is not None and iv.hi is not None and iv.lo > iv.hi:
            return CheckResult(UNSAT)
    if not _propagate(intervals, int_cmps):
        return CheckResult(UNSAT)

    names = sorted(intervals)
    spaces = []
    any_clipped = False
    for s in names:
        inner = len_operand(s)
        if inner is not None:
            vals, clipped = _candidates(intervals[s], 0, config.max_string_length)
        else:
            vals, clipped = _candidates(intervals[s], config.int_low, config.int_high)
        spaces.append(vals)
        any_clipped = any_clipped or clipped

    total = 1
    for vals in spaces:
        total *= len(vals)
        if total > config.enum_cap:
            return CheckResult(UNKNOWN, reason="integer search space too large")

    try:
        for combo in itertools.product(*spaces):
            assign = dict(zip(names, combo))
            if not all(_eval_int(c, assign) for c in int_cmps):
                continue
            str_res = _solve_strings(str_cons, assign, config)
            if str_res is None:
                continue  # this combo's string side is empty; provably so
            model_values = dict(bools)
            model_values.update(
                {s: v for s, v in assign.items() if len_operand(s) is None})
            model_values.update(str_res)
            return CheckResult(SAT, model=SolverModel.of(model_values))
    except StateBudgetExceeded:
        return CheckResult(UNKNOWN, reason="automaton state budget exceeded")

    if any_clipped:
        return CheckResult(UNKNOWN, reason="bounded integer search exhausted")
    # Every combination was refuted exactly (integer evaluation or DFA
    # emptiness) and no range was clipped, so the conjunction is unsat.
    return CheckResult(UNSAT)


def _eval_int(c: IntCmp, assign: dict) -> bool:
    total = c.expr.const + sum(coeff * assign[s] for s, coeff in c.expr.terms)
    op = c.op
    if op == "<":
        return total < 0
    if op == "<=":
        return total <= 0
    if op == ">":
        return total > 0
    if op == ">=":
        return total >= 0
    if op == "==":
        return total == 0
    return total != 0


def _solve_strings(str_cons: dict, int_assign: dict, config: SolverConfig):
    """A satisfying string per symbol, or None if some symbol's DFA is empty.

    int_assign supplies fixed values for any len(s) pseudo-symbols, which
    become exact length constraints on s.
    """
    out: dict = {}
    for symbol, cons in str_cons.items():
        dfa = None

        def add(d):
            nonlocal dfa
            dfa = d if dfa is None else dfa_product(dfa, d, "intersect",
                                                    state_budget=config.state_budget)

        length_key = len_symbol(symbol)
        if length_key in int_assign:
            add(dfa_for_length("==", int_assign[length_key],
                               state_budget=config.state_budget))
        for c in cons:
            if isinstance(c, StrEq):
                add(dfa_for_literal(c.literal))
            elif isinstance(c, StrLen):
                add(dfa_for_length(c.op, c.bound, state_budget=config.state_budget))
            elif isinstance(c, StrMatches):
                d = regex_to_dfa(c.regex, state_budget=config.state_budget)
                add(d if c.positive else dfa_complement(d))
            else:
                raise TypeError(f"unexpected string constraint {c!r}")

        if dfa is None:
            out[symbol] = ""
            continue
        witness = dfa_witness(dfa)
        if witness is None:
            return None
        out[symbol] = witness
    return out
