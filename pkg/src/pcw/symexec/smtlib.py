"""SMT-LIB 2 bridge for an optional external solver.

The internal decision procedure stays authoritative; this module lets a
configured solver executable (`solver.cmd`) take a crack at the same
constraint sets over the QF_SLIA logic.  Sat models coming back from the
backend are re-checked by the constraint evaluator before anyone trusts
them; a model that fails the check downgrades the answer to unknown.
"""

from __future__ import annotations

import shlex
import subprocess

from ..regexlib.syntax import (
    MAX_SCALAR,
    Alt,
    AnyChar,
    CharClass,
    Concat,
    Literal,
    Opt,
    Plus,
    Repeat,
    Star,
)
from .constraints import (
    BoolAtom,
    IntCmp,
    StrEq,
    StrLen,
    StrMatches,
    UnsupportedConstraint,
    infer_sorts,
    len_operand,
    satisfies_all,
)
from .solver import SAT, UNKNOWN, UNSAT, CheckResult, SolverConfig
from .constraints import SolverModel


class BackendUnavailable(Exception):
    pass


class MalformedSolverOutput(Exception):
    pass


_SMT_SORT = {"int": "Int", "bool": "Bool", "string": "String"}


def emit_smtlib(constraints) -> str:
    """Render a conjunction as a QF_SLIA script ending in (get-model)."""
    sorts = infer_sorts(constraints)
    lines = ["(set-logic QF_SLIA)"]
    for symbol in sorted(sorts):
        lines.append(f"(declare-const {_ident(symbol)} {_SMT_SORT[sorts[symbol]]})")
    for c in constraints:
        lines.append(f"(assert {_assert_of(c)})")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return "\n".join(lines) + "\n"


def _ident(symbol: str) -> str:
    """SMT identifier for a symbol; len(x) pseudo-symbols become str.len."""
    inner = len_operand(symbol)
    if inner is not None:
        return f"(str.len {inner})"
    return symbol


def _int_lit(value: int) -> str:
    return str(value) if value >= 0 else f"(- {-value})"


def _assert_of(c) -> str:
    if isinstance(c, IntCmp):
        lhs = _sum_of(c.expr.terms)
        rhs = _int_lit(-c.expr.const)
        op = c.op
        if op == "==":
            return f"(= {lhs} {rhs})"
        if op == "!=":
            return f"(not (= {lhs} {rhs}))"
        return f"({op} {lhs} {rhs})"
    if isinstance(c, BoolAtom):
        return c.symbol if c.expected else f"(not {c.symbol})"
    if isinstance(c, StrLen):
        lhs = f"(str.len {c.symbol})"
        rhs = _int_lit(c.bound)
        if c.op == "==":
            return f"(= {lhs} {rhs})"
        if c.op == "!=":
            return f"(not (= {lhs} {rhs}))"
        return f"({c.op} {lhs} {rhs})"
    if isinstance(c, StrEq):
        return f"(= {c.symbol} {_str_lit(c.literal)})"
    if isinstance(c, StrMatches):
        inner = f"(str.in_re {c.symbol} {_re_of(c.regex)})"
        return inner if c.positive else f"(not {inner})"
    if isinstance(c, UnsupportedConstraint):
        raise ValueError(f"cannot emit unsupported constraint: {c.reason}")
    raise TypeError(f"not a constraint: {c!r}")


def _sum_of(terms) -> str:
    if not terms:
        return "0"
    parts = []
    for symbol, coeff in terms:
        ident = _ident(symbol)
        parts.append(ident if coeff == 1 else f"(* {_int_lit(coeff)} {ident})")
    if len(parts) == 1:
        return parts[0]
    return f"(+ {' '.join(parts)})"


def _str_lit(text: str) -> str:
    out = []
    for ch in text:
        code = ord(ch)
        if ch == '"':
            out.append('""')
        elif 0x20 <= code < 0x7F:
            out.append(ch)
        else:
            out.append(f"\\u{{{code:x}}}")
    return '"' + "".join(out) + '"'


def _re_of(node) -> str:
    if isinstance(node, Literal):
        return f"(str.to_re {_str_lit(node.char)})"
    if isinstance(node, AnyChar):
        return "re.allchar"
    if isinstance(node, CharClass):
        ranges = [_re_range(lo, hi) for lo, hi in node.intervals]
        union = ranges[0] if len(ranges) == 1 else f"(re.union {' '.join(ranges)})"
        if node.negated:
            return f"(re.diff re.allchar {union})"
        return union
    if isinstance(node, Concat):
        if not node.parts:
            return '(str.to_re "")'
        if len(node.parts) == 1:
            return _re_of(node.parts[0])
        return f"(re.++ {' '.join(_re_of(p) for p in node.parts)})"
    if isinstance(node, Alt):
        if len(node.options) == 1:
            return _re_of(node.options[0])
        return f"(re.union {' '.join(_re_of(o) for o in node.options)})"
    if isinstance(node, Star):
        return f"(re.* {_re_of(node.inner)})"
    if isinstance(node, Plus):
        return f"(re.+ {_re_of(node.inner)})"
    if isinstance(node, Opt):
        return f"(re.opt {_re_of(node.inner)})"
    if isinstance(node, Repeat):
        inner = _re_of(node.inner)
        if node.max is None:
            bounded = f"((_ re.loop {node.min} {node.min}) {inner})"
            return f"(re.++ {bounded} (re.* {inner}))"
        return f"((_ re.loop {node.min} {node.max}) {inner})"
    raise TypeError(f"not a regex node: {node!r}")


def _re_range(lo: int, hi: int) -> str:
    if lo == hi:
        return f"(str.to_re {_str_lit(chr(lo))})"
    if lo == 0 and hi == MAX_SCALAR:
        return "re.allchar"
    return f"(re.range {_str_lit(chr(lo))} {_str_lit(chr(hi))})"


def parse_smtlib_result(text: str):
    """(status, model dict) out of a solver's stdout.

    The model is parsed from `define-fun` entries; values may be integer
    literals, negations, booleans, or string literals.
    """
    status = None
    for line in text.splitlines():
        word = line.strip()
        if word in (SAT, UNSAT, UNKNOWN):
            status = word
            break
    if status is None:
        raise MalformedSolverOutput("no sat/unsat/unknown verdict in output")
    if status != SAT:
        return status, {}

    rest = text[text.index(status) + len(status):]
    try:
        forms = _parse_sexprs(rest)
    except ValueError as err:
        raise MalformedSolverOutput(str(err)) from None
    model: dict = {}
    for form in forms:
        _collect_defines(form, model)
    return status, model


def _collect_defines(form, model: dict) -> None:
    if not isinstance(form, list):
        return
    if form and form[0] == "define-fun" and len(form) >= 5:
        name, params, _sort, value = form[1], form[2], form[3], form[4]
        if params == [] and isinstance(name, str):
            converted = _value_of(value)
            if converted is not None:
                model[name] = converted
        return
    for item in form:
        _collect_defines(item, model)


def _value_of(value):
    if isinstance(value, str):
        if value == "true":
            return True
        if value == "false":
            return False
        if value.startswith('"'):
            return _unquote(value)
        try:
            return int(value)
        except ValueError:
            return None
    if isinstance(value, list) and len(value) == 2 and value[0] == "-":
        inner = _value_of(value[1])
        return -inner if isinstance(inner, int) else None
    return None


def _unquote(token: str) -> str:
    body = token[1:-1].replace('""', '"')
    out = []
    i = 0
    while i < len(body):
        if body.startswith("\\u{", i):
            end = body.index("}", i)
            out.append(chr(int(body[i + 3:end], 16)))
            i = end + 1
        else:
            out.append(body[i])
            i += 1
    return "".join(out)


def _parse_sexprs(text: str) -> list:
    """All top-level s-expressions in `text`; atoms are plain strings."""
    forms = []
    pos = 0
    length = len(text)
    while True:
        while pos < length and text[pos].isspace():
            pos += 1
        if pos >= length:
            return forms
        form, pos = _parse_one(text, pos)
        forms.append(form)


def _parse_one(text: str, pos: int):
    length = len(text)
    while pos < length and text[pos].isspace():
        pos += 1
    if pos >= length:
        raise ValueError("unexpected end of solver output")
    ch = text[pos]
    if ch == "(":
        pos += 1
        items = []
        while True:
            while pos < length and text[pos].isspace():
                pos += 1
            if pos >= length:
                raise ValueError("unbalanced parenthesis in solver output")
            if text[pos] == ")":
                return items, pos + 1
            item, pos = _parse_one(text, pos)
            items.append(item)
    if ch == ")":
        raise ValueError("unbalanced parenthesis in solver output")
    if ch == '"':
        end = pos + 1
        while end < length:
            if text[end] == '"':
                if end + 1 < length and text[end + 1] == '"':
                    end += 2
                    continue
                return text[pos:end + 1], end + 1
            end += 1
        raise ValueError("unterminated string in solver output")
    end = pos
    while end < length and not text[end].isspace() and text[end] not in "()":
        end += 1
    return text[pos:end], end


def check_sat_external(constraints, config: SolverConfig) -> CheckResult:
    """Ask the configured backend; Sat answers are verified locally."""
    if not config.solver_cmd:
        raise BackendUnavailable("no solver.cmd configured")
    constraints = tuple(constraints)
    for c in constraints:
        if isinstance(c, UnsupportedConstraint):
            return CheckResult(UNKNOWN, reason=c.reason)
    script = emit_smtlib(constraints)
    try:
        proc = subprocess.run(
            shlex.split(config.solver_cmd),
            input=script,
            capture_output=True,
            text=True,
            timeout=config.solver_timeout,
        )
    except FileNotFoundError as err:
        raise BackendUnavailable(str(err)) from None
    except subprocess.TimeoutExpired:
        return CheckResult(UNKNOWN, reason="backend timeout")

    status, raw_model = parse_smtlib_result(proc.stdout)
    if status == UNSAT:
        return CheckResult(UNSAT)
    if status == UNKNOWN:
        return CheckResult(UNKNOWN, reason="backend answered unknown")

    sorts = infer_sorts(constraints)
    values = {s: raw_model[s] for s in sorts if s in raw_model}
    if set(values) != set(sorts) or not satisfies_all(constraints, values):
        return CheckResult(UNKNOWN, reason="backend model failed verification")
    return CheckResult(SAT, model=SolverModel.of(values))
