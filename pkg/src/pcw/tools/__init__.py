"""Workbench tools: MVC controllers, their models, and the script runner."""

from .controllers import (
    CALL_GRAPH_EXPLORER,
    ENDPOINT_CATALOG,
    REACHABILITY_INSPECTOR,
    STRUCTURE_BROWSER,
    ApplyResult,
    BadOption,
    EmptySlice,
    ReachQuery,
    StaleAction,
    ToolInstance,
    apply_action,
    browse_structure,
    catalog_entry_points,
    explore_call_graph,
    inspect_reachability,
)
from .models import (
    Action,
    GraphEdge,
    GraphModel,
    GraphNode,
    ModelInvariantError,
    NavigationRequest,
    TreeItem,
    TreeModel,
    action_to_json,
    expand_action,
    graph_to_dot,
    graph_to_json,
    model_to_json,
    navigate_action,
    run_query_action,
    tree_to_json,
)
from .scripts import (
    ParamValidation,
    ScriptSyntaxError,
    ToolContext,
    UnknownTool,
    parse_constraint,
    parse_target,
    run_tool_script,
)

__all__ = [
    "Action",
    "ApplyResult",
    "BadOption",
    "CALL_GRAPH_EXPLORER",
    "ENDPOINT_CATALOG",
    "EmptySlice",
    "GraphEdge",
    "GraphModel",
    "GraphNode",
    "ModelInvariantError",
    "NavigationRequest",
    "ParamValidation",
    "REACHABILITY_INSPECTOR",
    "ReachQuery",
    "STRUCTURE_BROWSER",
    "ScriptSyntaxError",
    "StaleAction",
    "ToolContext",
    "ToolInstance",
    "TreeItem",
    "TreeModel",
    "UnknownTool",
    "action_to_json",
    "apply_action",
    "browse_structure",
    "catalog_entry_points",
    "expand_action",
    "explore_call_graph",
    "graph_to_dot",
    "graph_to_json",
    "inspect_reachability",
    "model_to_json",
    "navigate_action",
    "parse_constraint",
    "parse_target",
    "run_query_action",
    "run_tool_script",
    "tree_to_json",
]
