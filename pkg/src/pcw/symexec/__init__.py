"""Bounded symbolic execution with verified witness models."""

from .concrete import (
    ConcreteError,
    DEFAULT_FUEL,
    FuelExhausted,
    Trace,
    concrete_execute,
    try_execute,
)
from .constraints import (
    BoolAtom,
    ConstraintEvalError,
    IntCmp,
    LinearExpr,
    PathCondition,
    SolverModel,
    SortError,
    StrEq,
    StrLen,
    StrMatches,
    UnsupportedConstraint,
    constraint_symbols,
    evaluate_constraint,
    infer_sorts,
    len_symbol,
    lin_add,
    lin_const,
    lin_scale,
    lin_sub,
    lin_var,
    satisfies_all,
)
from .explore import (
    Bounds,
    BudgetExceeded,
    ExplorationResult,
    PathEnd,
    Target,
    encode_condition,
    explore_paths,
    fold,
)
from .reach import (
    INCONCLUSIVE,
    PROVEN_UNREACHABLE,
    REACHABLE,
    ConstraintScopeError,
    ReachReport,
    UnknownTarget,
    analyze_reachability,
    report_to_json,
)
from .smtlib import (
    BackendUnavailable,
    MalformedSolverOutput,
    check_sat_external,
    emit_smtlib,
    parse_smtlib_result,
)
from .solver import (
    SAT,
    UNKNOWN,
    UNSAT,
    CheckResult,
    SolverConfig,
    SolverError,
    check_sat,
)

__all__ = [
    "BackendUnavailable",
    "BoolAtom",
    "Bounds",
    "BudgetExceeded",
    "CheckResult",
    "ConcreteError",
    "ConstraintEvalError",
    "ConstraintScopeError",
    "DEFAULT_FUEL",
    "ExplorationResult",
    "FuelExhausted",
    "INCONCLUSIVE",
    "IntCmp",
    "LinearExpr",
    "MalformedSolverOutput",
    "PROVEN_UNREACHABLE",
    "PathCondition",
    "PathEnd",
    "REACHABLE",
    "ReachReport",
    "SAT",
    "SolverConfig",
    "SolverError",
    "SolverModel",
    "SortError",
    "StrEq",
    "StrLen",
    "StrMatches",
    "Target",
    "Trace",
    "UNKNOWN",
    "UNSAT",
    "UnknownTarget",
    "UnsupportedConstraint",
    "analyze_reachability",
    "check_sat",
    "check_sat_external",
    "concrete_execute",
    "constraint_symbols",
    "emit_smtlib",
    "encode_condition",
    "evaluate_constraint",
    "explore_paths",
    "fold",
    "infer_sorts",
    "len_symbol",
    "lin_add",
    "lin_const",
    "lin_scale",
    "lin_sub",
    "lin_var",
    "parse_smtlib_result",
    "report_to_json",
    "satisfies_all",
    "try_execute",
]
