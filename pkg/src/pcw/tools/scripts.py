"""Declarative tool scripts and the constraint expression mini-syntax.

A script is a JSON object naming a tool plus its parameters; it can
instantiate every controller in this package. Constraint expressions
are single comparisons (`name !~ "..."`, `len(name) <= 64`, `x > 5`,
`ret == true`) rather than a general language.
"""

from __future__ import annotations

import json
import re

from ..analysis import UnknownMethod, build_call_graph
from ..regexlib import Concat, Literal, RegexSyntaxError, parse_regex
from ..slices import UnknownElement, build_slice
from ..symexec import (
    BoolAtom,
    Bounds,
    IntCmp,
    LinearExpr,
    SolverConfig,
    StrEq,
    StrLen,
    StrMatches,
    Target,
)
from .controllers import (
    ReachQuery,
    browse_structure,
    catalog_entry_points,
    explore_call_graph,
    inspect_reachability,
)

RETURN_ATOM = "ret"
_RETURN_SYMBOL = "return"


class ScriptSyntaxError(Exception):
    pass


class UnknownTool(Exception):
    pass


class ParamValidation(Exception):
    pass


class ToolContext:
    """Project-level inputs a script is instantiated against."""

    def __init__(self, provider, bounds: Bounds = Bounds(),
                 config: SolverConfig = SolverConfig(), max_models: int = 5):
        self.provider = provider
        self.bounds = bounds
        self.config = config
        self.max_models = max_models
        self._slice = None

    def project_slice(self):
        if self._slice is None:
            self._slice = build_slice(self.provider)
        return self._slice


# --- constraint expressions ----------------------------------------------------

_EXPR = re.compile(
    r"^\s*(?:len\(\s*([A-Za-z_]\w*)\s*\)|([A-Za-z_]\w*))"
    r"\s*(!~|~|==|!=|<=|>=|<|>)\s*(.+?)\s*$",
    re.DOTALL,
)


def _parse_rhs(text: str):
    if text.startswith('"'):
        try:
            value = json.loads(text)
        except json.JSONDecodeError as err:
            raise ParamValidation(f"bad string literal {text!r}: {err}") from err
        if not isinstance(value, str):
            raise ParamValidation(f"bad string literal {text!r}")
        return value
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return int(text, 10)
    except ValueError:
        raise ParamValidation(
            f"constraint value must be an int, bool, or quoted string: {text!r}"
        ) from None


def _literal_pattern(text: str):
    return Concat(tuple(Literal(ch) for ch in text))


def parse_constraint(text: str, return_context: bool = False):
    """One constraint from the mini-syntax.

    In a return context the left-hand atom must be `ret` (or `len(ret)`)
    and is mapped onto the return-value symbol.
    """
    m = _EXPR.match(text)
    if m is None:
        raise ParamValidation(f"cannot parse constraint {text!r}")
    len_name, plain_name, op, rhs_text = m.groups()
    name = len_name or plain_name
    if return_context:
        if name != RETURN_ATOM:
            raise ParamValidation(
                f"return constraints refer to {RETURN_ATOM!r}, got {name!r}")
        name = _RETURN_SYMBOL
    value = _parse_rhs(rhs_text)

    if op in ("~", "!~"):
        if len_name is not None:
            raise ParamValidation("len(...) cannot be matched against a regex")
        if not isinstance(value, str):
            raise ParamValidation(f"{op} needs a quoted regex, got {rhs_text!r}")
        try:
            regex = parse_regex(value)
        except RegexSyntaxError as err:
            raise ParamValidation(f"bad regex {value!r}: {err}") from err
        return StrMatches(name, regex, positive=(op == "~"), pattern=value)

    if len_name is not None:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ParamValidation(f"len(...) compares against an int: {text!r}")
        if value < 0:
            raise ParamValidation("length bound must be non-negative")
        return StrLen(op, name, value)

    if isinstance(value, bool):
        if op not in ("==", "!="):
            raise ParamValidation(f"booleans support == and != only: {text!r}")
        return BoolAtom(name, value if op == "==" else not value)

    if isinstance(value, str):
        if op == "==":
            return StrEq(name, value)
        if op == "!=":
            return StrMatches(name, _literal_pattern(value), positive=False,
                              pattern=None)
        raise ParamValidation(f"strings support ==, !=, ~, !~ only: {text!r}")

    return IntCmp(op, LinearExpr.build({name: 1}, -value))


def parse_target(text: str, default_method: str) -> Target:
    """`call:QName`, `stmt:SID` (within the entry), or `stmt:QName:SID`."""
    if text.startswith("call:"):
        callee = text[len("call:"):]
        if not callee:
            raise ParamValidation("call target needs a method name")
        return Target.call(callee)
    if text.startswith("stmt:"):
        rest = text[len("stmt:"):]
        if ":" in rest:
            method, sid = rest.rsplit(":", 1)
        else:
            method, sid = default_method, rest
        if not method or not sid:
            raise ParamValidation(f"bad statement target {text!r}")
        return Target.statement(method, sid)
    raise ParamValidation(f"target must be call:QName or stmt:[QName:]SID, got {text!r}")


# --- script runner ---------------------------------------------------------------

_BOUND_KEYS = {"loopUnroll": "loop_unroll", "maxPaths": "max_paths",
               "inlineDepth": "inline_depth"}


def _check_keys(doc: dict, allowed: set) -> None:
    extra = set(doc) - allowed - {"tool"}
    if extra:
        raise ParamValidation(f"unknown script parameters: {sorted(extra)}")


def _string_list(doc: dict, key: str, required: bool):
    value = doc.get(key)
    if value is None:
        if required:
            raise ParamValidation(f"{key!r} is required")
        return None
    if not isinstance(value, list) or not all(
            isinstance(v, str) and v for v in value):
        raise ParamValidation(f"{key!r} must be a list of method names")
    if required and not value:
        raise ParamValidation(f"{key!r} must not be empty")
    return value


def _parse_bounds(doc, defaults: Bounds) -> Bounds:
    if doc is None:
        return defaults
    if not isinstance(doc, dict):
        raise ParamValidation("'bounds' must be an object")
    values = {
        "loop_unroll": defaults.loop_unroll,
        "max_paths": defaults.max_paths,
        "inline_depth": defaults.inline_depth,
    }
    for key, value in doc.items():
        field_name = _BOUND_KEYS.get(key)
        if field_name is None:
            raise ParamValidation(f"unknown bound {key!r}")
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise ParamValidation(f"bound {key!r} must be a positive int")
        values[field_name] = value
    return Bounds(**values)


def _run_structure_browser(doc: dict, context: ToolContext):
    _check_keys(doc, set())
    return browse_structure(context.project_slice())


def _run_endpoint_catalog(doc: dict, context: ToolContext):
    _check_keys(doc, set())
    return catalog_entry_points(context.project_slice())


def _run_call_graph_explorer(doc: dict, context: ToolContext):
    _check_keys(doc, {"roots", "emphasize", "preExpand"})
    roots = _string_list(doc, "roots", required=True)
    try:
        cg = build_call_graph(context.provider, roots)
    except (UnknownMethod, UnknownElement) as err:
        raise ParamValidation(str(err)) from err

    entry = param = None
    emphasize = doc.get("emphasize")
    if emphasize is not None:
        if not isinstance(emphasize, dict) or set(emphasize) - {"entry", "param"}:
            raise ParamValidation("'emphasize' must be {entry?, param}")
        param = emphasize.get("param")
        if isinstance(param, bool) or not isinstance(param, int) or param < 0:
            raise ParamValidation("'emphasize.param' must be a non-negative int")
        entry = emphasize.get("entry")
        if entry is None:
            if len(roots) != 1:
                raise ParamValidation(
                    "emphasis needs an explicit entry when several roots are given")
            entry = roots[0]
        elif not isinstance(entry, str):
            raise ParamValidation("'emphasize.entry' must be a method name")

    pre_expand = _string_list(doc, "preExpand", required=False)
    return explore_call_graph(cg, entry, param,
                              None if pre_expand is None else set(pre_expand))


def _run_reachability_inspector(doc: dict, context: ToolContext):
    _check_keys(doc, {"method", "target", "constraints", "returnConstraint",
                      "bounds", "maxModels"})
    method = doc.get("method")
    if not isinstance(method, str) or not method:
        raise ParamValidation("'method' is required")
    target_text = doc.get("target")
    if not isinstance(target_text, str):
        raise ParamValidation("'target' is required")
    target = parse_target(target_text, method)

    texts = doc.get("constraints", [])
    if not isinstance(texts, list) or not all(isinstance(t, str) for t in texts):
        raise ParamValidation("'constraints' must be a list of expressions")
    constraints = tuple(parse_constraint(t) for t in texts)

    return_constraint = None
    if "returnConstraint" in doc:
        rc = doc["returnConstraint"]
        if not isinstance(rc, str):
            raise ParamValidation("'returnConstraint' must be an expression")
        return_constraint = parse_constraint(rc, return_context=True)

    max_models = doc.get("maxModels", context.max_models)
    if isinstance(max_models, bool) or not isinstance(max_models, int) \
            or max_models < 1:
        raise ParamValidation("'maxModels' must be a positive int")

    query = ReachQuery(
        method=method,
        target=target,
        param_constraints=constraints,
        return_constraint=return_constraint,
        bounds=_parse_bounds(doc.get("bounds"), context.bounds),
        config=context.config,
        max_models=max_models,
    )
    return inspect_reachability(context.provider, query)


_TOOLS = {
    "structureBrowser": _run_structure_browser,
    "apiEndpointCatalog": _run_endpoint_catalog,
    "callGraphExplorer": _run_call_graph_explorer,
    "reachabilityInspector": _run_reachability_inspector,
}


def run_tool_script(text: str, context: ToolContext):
    """Instantiate the controller a script names, with its parameters."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ScriptSyntaxError(f"invalid JSON: {err}") from err
    if not isinstance(doc, dict) or not isinstance(doc.get("tool"), str):
        raise ScriptSyntaxError("a script is an object with a 'tool' name")
    runner = _TOOLS.get(doc["tool"])
    if runner is None:
        raise UnknownTool(doc["tool"])
    return runner(doc, context)
