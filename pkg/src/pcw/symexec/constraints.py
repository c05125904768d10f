"""Constraint vocabulary shared by the path explorer and the solvers.

Sorts are int, bool, and string.  Integer constraints are linear
expressions compared against zero.  A linear term may reference the
length of a string symbol through the pseudo-symbol `len(s)`; the
evaluator resolves it against the string assignment, and the solver
treats it as a bounded integer unknown tied back to `s`.

Anything the vocabulary cannot express is carried as an
UnsupportedConstraint so downstream code degrades to Unknown instead of
silently dropping a condition.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..regexlib import match_fullmatch

CMP_OPS = ("<", "<=", ">", ">=", "==", "!=")

NEGATED_OP = {"<": ">=", "<=": ">", ">": "<=", ">=": "<", "==": "!=", "!=": "=="}


class SortError(Exception):
    pass


class ConstraintEvalError(Exception):
    pass


def len_symbol(name: str) -> str:
    return f"len({name})"


def len_operand(symbol: str) -> str | None:
    """The string symbol a `len(...)` pseudo-symbol refers to, if any."""
    if symbol.startswith("len(") and symbol.endswith(")"):
        return symbol[4:-1]
    return None


@dataclass(frozen=True)
class LinearExpr:
    terms: tuple  # ((symbol, coefficient), ...) sorted, coefficients nonzero
    const: int = 0

    @staticmethod
    def build(coeffs: dict, const: int) -> "LinearExpr":
        terms = tuple(sorted((s, c) for s, c in coeffs.items() if c != 0))
        return LinearExpr(terms, const)

    def symbols(self) -> set:
        return {s for s, _ in self.terms}


def lin_var(symbol: str) -> LinearExpr:
    return LinearExpr(((symbol, 1),), 0)


def lin_const(value: int) -> LinearExpr:
    return LinearExpr((), value)


def lin_add(a: LinearExpr, b: LinearExpr) -> LinearExpr:
    coeffs = dict(a.terms)
    for s, c in b.terms:
        coeffs[s] = coeffs.get(s, 0) + c
    return LinearExpr.build(coeffs, a.const + b.const)


def lin_scale(a: LinearExpr, k: int) -> LinearExpr:
    return LinearExpr.build({s: c * k for s, c in a.terms}, a.const * k)


def lin_sub(a: LinearExpr, b: LinearExpr) -> LinearExpr:
    return lin_add(a, lin_scale(b, -1))


@dataclass(frozen=True)
class IntCmp:
    op: str  # expr op 0
    expr: LinearExpr


@dataclass(frozen=True)
class BoolAtom:
    symbol: str
    expected: bool


@dataclass(frozen=True)
class StrLen:
    op: str
    symbol: str
    bound: int


@dataclass(frozen=True)
class StrEq:
    symbol: str
    literal: str


@dataclass(frozen=True)
class StrMatches:
    symbol: str
    regex: object  # RegexAst
    positive: bool = True
    pattern: str | None = field(default=None, compare=False)


@dataclass(frozen=True)
class UnsupportedConstraint:
    reason: str


Constraint = object  # union of the five kinds plus UnsupportedConstraint


@dataclass(frozen=True)
class PathCondition:
    constraints: tuple
    spans: tuple = ()  # originating branch spans, aligned with constraints

    def symbols(self) -> set:
        out: set = set()
        for c in self.constraints:
            out |= constraint_symbols(c)
        return out


@dataclass(frozen=True)
class SolverModel:
    assignment: tuple  # sorted (symbol, value) pairs

    @staticmethod
    def of(values: dict) -> "SolverModel":
        return SolverModel(tuple(sorted(values.items())))

    def as_dict(self) -> dict:
        return dict(self.assignment)

    def value(self, symbol: str):
        return dict(self.assignment)[symbol]


def constraint_symbols(c) -> set:
    """Base symbols a constraint mentions; `len(s)` contributes `s`."""
    if isinstance(c, IntCmp):
        out = set()
        for s, _ in c.expr.terms:
            inner = len_operand(s)
            out.add(inner if inner is not None else s)
        return out
    if isinstance(c, BoolAtom):
        return {c.symbol}
    if isinstance(c, (StrLen, StrEq, StrMatches)):
        return {c.symbol}
    if isinstance(c, UnsupportedConstraint):
        return set()
    raise TypeError(f"not a constraint: {c!r}")


def infer_sorts(constraints) -> dict:
    """Symbol -> "int" | "bool" | "string"; conflicting use is a SortError."""
    sorts: dict = {}

    def put(symbol: str, sort: str) -> None:
        old = sorts.setdefault(symbol, sort)
        if old != sort:
            raise SortError(f"{symbol} used as both {old} and {sort}")

    for c in constraints:
        if isinstance(c, IntCmp):
            for s, _ in c.expr.terms:
                inner = len_operand(s)
                if inner is not None:
                    put(inner, "string")
                else:
                    put(s, "int")
        elif isinstance(c, BoolAtom):
            put(c.symbol, "bool")
        elif isinstance(c, (StrLen, StrEq, StrMatches)):
            put(c.symbol, "string")
        elif not isinstance(c, UnsupportedConstraint):
            raise TypeError(f"not a constraint: {c!r}")
    return sorts


def _compare(op: str, left, right) -> bool:
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
    raise ValueError(f"bad comparison op {op!r}")


def evaluate_constraint(c, values: dict) -> bool:
    """Ground truth for one constraint under a full assignment."""
    if isinstance(c, IntCmp):
        total = c.expr.const
        for s, coeff in c.expr.terms:
            inner = len_operand(s)
            total += coeff * (len(values[inner]) if inner is not None else values[s])
        return _compare(c.op, total, 0)
    if isinstance(c, BoolAtom):
        return values[c.symbol] is c.expected
    if isinstance(c, StrLen):
        return _compare(c.op, len(values[c.symbol]), c.bound)
    if isinstance(c, StrEq):
        return values[c.symbol] == c.literal
    if isinstance(c, StrMatches):
        return match_fullmatch(c.regex, values[c.symbol]) is c.positive
    if isinstance(c, UnsupportedConstraint):
        raise ConstraintEvalError(f"unsupported constraint: {c.reason}")
    raise TypeError(f"not a constraint: {c!r}")


def satisfies_all(constraints, values: dict) -> bool:
    return all(evaluate_constraint(c, values) for c in constraints)
