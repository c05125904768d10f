"""Reachability queries: symbolic exploration, solving, and verified models.

analyze_reachability ties the pieces together: explore paths from a
method, solve each reaching path's condition together with the caller's
parameter constraints, and replay every satisfying model concretely to
confirm the target is actually hit.  A model that fails the replay is an
internal soundness bug and raises rather than being reported.

Status semantics: Reachable needs at least one verified model;
ProvenUnreachable is claimed only when every reaching path was refuted
and nothing was truncated; anything else is InconclusiveBudget.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .concrete import try_execute
from .constraints import (
    BoolAtom,
    IntCmp,
    LinearExpr,
    SolverModel,
    StrEq,
    StrLen,
    StrMatches,
    UnsupportedConstraint,
    evaluate_constraint,
    infer_sorts,
    len_operand,
    len_symbol,
    lin_add,
    lin_scale,
)
from .explore import (
    Bounds,
    Target,
    _NonLinear,
    _linear_of,
    div_guards,
    encode_condition,
    explore_paths,
)
from .solver import SAT, UNKNOWN, SolverConfig, SolverError, check_sat
from ..minilang.cfg import Return, StrConst, Var

REACHABLE = "Reachable"
PROVEN_UNREACHABLE = "ProvenUnreachable"
INCONCLUSIVE = "InconclusiveBudget"

RETURN_SYMBOL = "return"

_DEFAULTS = {"int": 0, "bool": False, "string": ""}


class UnknownTarget(Exception):
    pass


class ConstraintScopeError(Exception):
    """A query constraint strayed outside the method's parameter symbols."""


@dataclass(frozen=True)
class ReachReport:
    status: str
    models: tuple  # SolverModel over the full parameter list
    truncated: bool
    paths_explored: int


def report_to_json(report: ReachReport) -> dict:
    return {
        "status": report.status,
        "models": [m.as_dict() for m in report.models],
        "truncated": report.truncated,
        "pathsExplored": report.paths_explored,
    }


def analyze_reachability(provider, method: str, target: Target,
                         param_constraints=(), return_constraint=None,
                         bounds: Bounds = Bounds(),
                         config: SolverConfig = SolverConfig(),
                         max_models: int = 5) -> ReachReport:
    cfg = provider.lower_to_cfg(method)
    declared = dict(cfg.params)
    _validate_target(provider, target, return_constraint)
    _validate_scope(param_constraints, declared)
    if return_constraint is not None:
        _validate_return_scope(return_constraint, declared, cfg.return_type)

    result = explore_paths(cfg, bounds, target, resolve=provider.lower_to_cfg)

    models: list = []
    seen: set = set()
    any_unknown = False
    for path in result.paths:
        if not path.reached:
            continue
        constraints = list(path.condition.constraints) + list(param_constraints)
        if return_constraint is not None:
            applied = _apply_return(return_constraint, path.return_expr, declared)
            if applied is None:
                continue  # the return value refutes the constraint outright
            constraints.extend(applied)
        verdict = check_sat(constraints, config)
        if verdict.status == UNKNOWN:
            any_unknown = True
            continue
        if verdict.status != SAT:
            continue
        model = _complete_model(verdict.model, declared)
        _verify_model(provider, method, cfg, model, target)
        if model.assignment not in seen:
            seen.add(model.assignment)
            models.append(model)
            if len(models) >= max_models:
                break

    if models:
        status = REACHABLE
    elif result.truncated or any_unknown:
        status = INCONCLUSIVE
    else:
        status = PROVEN_UNREACHABLE
    return ReachReport(status, tuple(models), result.truncated, result.explored)


def _validate_target(provider, target: Target, return_constraint) -> None:
    if target.kind == "call":
        provider.find_method(target.callee)
        if return_constraint is not None:
            raise ConstraintScopeError(
                "a return constraint needs a return-statement target")
        return
    cfg = provider.lower_to_cfg(target.method)
    try:
        stmt = cfg.statement(target.sid)
    except KeyError:
        raise UnknownTarget(f"{target.method} has no statement {target.sid}") from None
    if return_constraint is not None and not isinstance(stmt, Return):
        raise ConstraintScopeError(
            "a return constraint needs a return-statement target")


def _validate_scope(param_constraints, declared: dict) -> None:
    sorts = infer_sorts(param_constraints)
    for symbol, sort in sorts.items():
        if symbol not in declared:
            raise ConstraintScopeError(f"unknown parameter {symbol}")
        if declared[symbol] != sort:
            raise ConstraintScopeError(
                f"parameter {symbol} is {declared[symbol]}, constrained as {sort}")


def _validate_return_scope(constraint, declared: dict, return_type) -> None:
    sorts = infer_sorts([constraint])
    for symbol, sort in sorts.items():
        if symbol == RETURN_SYMBOL:
            if return_type != sort:
                raise ConstraintScopeError(
                    f"return value is {return_type}, constrained as {sort}")
        elif symbol not in declared:
            raise ConstraintScopeError(f"unknown parameter {symbol}")
        elif declared[symbol] != sort:
            raise ConstraintScopeError(
                f"parameter {symbol} is {declared[symbol]}, constrained as {sort}")


def _apply_return(constraint, return_expr, declared: dict):
    """Instantiate the `return` symbol with a path's folded return value.

    Returns None when the path's value provably violates the constraint,
    else the list of constraints to add (possibly empty when vacuous).
    """
    if return_expr is None:
        return None  # void method; nothing satisfies a value constraint

    guards, faults, unsupported = div_guards(return_expr)
    if faults:
        return None  # evaluating the return value itself faults
    out: list = list(guards)
    if unsupported is not None:
        out.append(UnsupportedConstraint(unsupported))
        return out

    if isinstance(constraint, IntCmp):
        out.append(_apply_return_int(constraint, return_expr))
    elif isinstance(constraint, BoolAtom) and constraint.symbol == RETURN_SYMBOL:
        out.append(encode_condition(return_expr, constraint.expected, declared))
    elif isinstance(constraint, (StrEq, StrLen, StrMatches)) \
            and constraint.symbol == RETURN_SYMBOL:
        if isinstance(return_expr, Var):
            out.append(replace(constraint, symbol=return_expr.name))
        elif isinstance(return_expr, StrConst):
            if not evaluate_constraint(constraint,
                                       {RETURN_SYMBOL: return_expr.value}):
                return None
        else:
            out.append(UnsupportedConstraint("return value has no string form"))
    else:
        out.append(constraint)
    return out


def _apply_return_int(constraint: IntCmp, return_expr):
    """Substitute `return`/`len(return)` terms with the path's value."""
    coeffs: dict = {}
    const = constraint.expr.const
    pending: list = []
    for symbol, coeff in constraint.expr.terms:
        if symbol == RETURN_SYMBOL:
            pending.append((coeff, return_expr))
        elif len_operand(symbol) == RETURN_SYMBOL:
            if isinstance(return_expr, Var):
                key = len_symbol(return_expr.name)
                coeffs[key] = coeffs.get(key, 0) + coeff
            elif isinstance(return_expr, StrConst):
                const += coeff * len(return_expr.value)
            else:
                return UnsupportedConstraint("return value has no string form")
        else:
            coeffs[symbol] = coeffs.get(symbol, 0) + coeff
    expr = LinearExpr.build(coeffs, const)
    for coeff, sub in pending:
        try:
            expr = lin_add(expr, lin_scale(_linear_of(sub), coeff))
        except _NonLinear as err:
            return UnsupportedConstraint(err.reason)
    return IntCmp(constraint.op, expr)


def _complete_model(model: SolverModel, declared: dict) -> SolverModel:
    """Fill parameters the solver left unconstrained with neutral values."""
    values = {name: _DEFAULTS[type_] for name, type_ in declared.items()}
    for symbol, value in model.assignment:
        if symbol in declared:
            values[symbol] = value
    return SolverModel.of(values)


def _verify_model(provider, method: str, cfg, model: SolverModel, target) -> None:
    values = model.as_dict()
    args = [values[name] for name, _ in cfg.params]
    trace, _error = try_execute(provider.lower_to_cfg, method, args)
    if target.kind == "call":
        hit = trace.visited_call(target.callee)
    else:
        hit = (target.method, target.sid) in trace.visited
    if not hit:
        raise SolverError(
            f"model {values!r} does not reach {target} in {method}")
