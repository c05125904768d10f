"""Dataflow solving, reaching definitions, dependency closures, call graphs."""

from .callgraph import (
    BadParamIndex,
    CallEdge,
    CallGraph,
    UnknownMethod,
    build_call_graph,
    callgraph_to_dot,
    callgraph_to_json,
    interprocedural_dependency,
)
from .dataflow import (
    DEFAULT_BUDGET,
    AnalysisBudgetExceeded,
    DataflowProblem,
    DataflowResult,
    solve_dataflow,
)
from .reaching import (
    MethodSummary,
    ReachingResult,
    UnknownSeed,
    dependency_closure,
    liveness,
    method_summary,
    reaching_definitions,
    statement_def,
    statement_uses,
)

__all__ = [
    "AnalysisBudgetExceeded",
    "BadParamIndex",
    "CallEdge",
    "CallGraph",
    "DEFAULT_BUDGET",
    "DataflowProblem",
    "DataflowResult",
    "MethodSummary",
    "ReachingResult",
    "UnknownMethod",
    "UnknownSeed",
    "build_call_graph",
    "callgraph_to_dot",
    "callgraph_to_json",
    "dependency_closure",
    "interprocedural_dependency",
    "liveness",
    "method_summary",
    "reaching_definitions",
    "solve_dataflow",
    "statement_def",
    "statement_uses",
]
