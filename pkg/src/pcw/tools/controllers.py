"""Controllers behind the workbench tools.

Every controller is a pure state machine. A ToolInstance bundles the
captured inputs, a private state value, and the current model; applying
an action never mutates the instance, it returns a fresh one (plus a
navigation request when the action was a navigation). Re-applying the
same action to the same state therefore yields an equal model.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace

from ..analysis import BadParamIndex, interprocedural_dependency
from ..slices import CONTAINS, UnknownElement
from ..symexec import (
    Bounds,
    ConstraintScopeError,
    SolverConfig,
    SortError,
    Target,
    UnknownTarget,
    analyze_reachability,
)
from .models import (
    Action,
    GraphEdge,
    GraphModel,
    GraphNode,
    NavigationRequest,
    TreeItem,
    TreeModel,
    expand_action,
    navigate_action,
    run_query_action,
)

STRUCTURE_BROWSER = "structureBrowser"
CALL_GRAPH_EXPLORER = "callGraphExplorer"
ENDPOINT_CATALOG = "apiEndpointCatalog"
REACHABILITY_INSPECTOR = "reachabilityInspector"


class EmptySlice(Exception):
    pass


class BadOption(Exception):
    pass


class StaleAction(Exception):
    """The action does not belong to the instance's current model."""


_ids = itertools.count(1)


def _new_id(kind: str) -> str:
    return f"{kind}-{next(_ids)}"


@dataclass(frozen=True)
class ToolInstance:
    id: str
    kind: str
    inputs: tuple  # frozen (key, value) description of captured inputs
    model: object  # TreeModel | GraphModel
    state: object = field(compare=False, repr=False, default=None)


@dataclass(frozen=True)
class ApplyResult:
    instance: ToolInstance
    navigation: NavigationRequest | None = None


@dataclass(frozen=True)
class ReachQuery:
    method: str
    target: Target
    param_constraints: tuple = ()
    return_constraint: object = None
    bounds: Bounds = Bounds()
    config: SolverConfig = SolverConfig()
    max_models: int = 5


# --- structure browser ---------------------------------------------------------


@dataclass(frozen=True)
class _BrowserState:
    slice: object
    expanded: frozenset


def _containment(slice_):
    """(sorted root ids, parent -> sorted child ids) within the slice."""
    kids: dict = {}
    has_parent = set()
    for l in slice_.links:
        if l.kind != CONTAINS:
            continue
        kids.setdefault(l.source, []).append(l.target)
        has_parent.add(l.target)
    for v in kids.values():
        v.sort()
    roots = sorted(e.id for e in slice_.elements if e.id not in has_parent)
    return roots, kids


def _browser_model(state: _BrowserState) -> TreeModel:
    by_id = {e.id: e for e in state.slice.elements}
    roots, kids = _containment(state.slice)

    def render(eid: str) -> TreeItem:
        el = by_id[eid]
        label = el.attr("name", eid)
        child_ids = kids.get(eid, ())
        if not child_ids:
            file, line = el.attr("file"), el.attr("line")
            action = None
            if file is not None and line is not None:
                action = navigate_action(eid, file, line)
            return TreeItem(label, eid, action)
        if eid in state.expanded:
            return TreeItem(label, eid, None,
                            tuple(render(c) for c in child_ids))
        return TreeItem(label, eid, expand_action(eid))

    return TreeModel(tuple(render(r) for r in roots))


def browse_structure(slice_) -> ToolInstance:
    """A lazily expanded tree over the slice's containment hierarchy."""
    if not slice_.elements:
        raise EmptySlice("cannot browse an empty slice")
    roots, _ = _containment(slice_)
    state = _BrowserState(slice_, frozenset(roots))
    return ToolInstance(
        _new_id(STRUCTURE_BROWSER),
        STRUCTURE_BROWSER,
        (("elements", len(slice_.elements)),),
        _browser_model(state),
        state,
    )


# --- call-graph explorer -------------------------------------------------------


@dataclass(frozen=True)
class _ExplorerState:
    cg: object
    visible: frozenset
    expanded: frozenset
    emphasized: frozenset  # full dependency set; shown as nodes become visible


def _explorer_model(state: _ExplorerState) -> GraphModel:
    cg = state.cg
    nodes = tuple(
        GraphNode(
            n,
            n.rsplit(".", 1)[-1],
            emphasized=n in state.emphasized,
            expandable=bool(cg.callees(n)) and n not in state.expanded,
        )
        for n in sorted(state.visible)
    )
    pairs = sorted({(e.caller, e.callee) for e in cg.edges
                    if e.caller in state.expanded and e.callee in state.visible})
    edges = tuple(GraphEdge(s, t) for s, t in pairs)
    pending = tuple((n.id, expand_action(n.id)) for n in nodes if n.expandable)
    return GraphModel(nodes, edges, pending)


def explore_call_graph(cg, emphasize_entry: str | None = None,
                       emphasize_param: int | None = None,
                       pre_expand=None) -> ToolInstance:
    """Interactive view of a call graph.

    With pre_expand=None the whole graph is shown; passing a set (even
    an empty one) starts from the roots and expands exactly that set,
    closed under what each expansion reveals. Emphasis marks the methods
    data-dependent on the chosen entry parameter.
    """
    node_set = set(cg.nodes)
    if (emphasize_entry is None) != (emphasize_param is None):
        raise BadOption("emphasis needs both an entry method and a parameter index")
    if emphasize_entry is not None and emphasize_entry not in cg.roots:
        raise BadOption(f"emphasis entry {emphasize_entry!r} is not a root of the graph")

    emphasized = frozenset()
    if emphasize_entry is not None:
        try:
            emphasized = frozenset(
                interprocedural_dependency(cg, emphasize_entry, emphasize_param))
        except BadParamIndex as err:
            raise BadOption(str(err)) from err

    if pre_expand is None:
        visible = frozenset(cg.nodes)
        expanded = frozenset(n for n in cg.nodes if cg.callees(n))
    else:
        unknown = set(pre_expand) - node_set
        if unknown:
            raise BadOption(f"preExpand names unknown methods: {sorted(unknown)}")
        seen = set(cg.roots)
        done: set = set()
        # expanding one listed node can reveal another listed node
        changed = True
        while changed:
            changed = False
            for n in sorted(set(pre_expand) & seen - done):
                done.add(n)
                seen.update(cg.callees(n))
                changed = True
        visible, expanded = frozenset(seen), frozenset(done)

    state = _ExplorerState(cg, visible, expanded, emphasized)
    inputs = (
        ("roots", tuple(cg.roots)),
        ("emphasizeEntry", emphasize_entry),
        ("emphasizeParam", emphasize_param),
    )
    return ToolInstance(_new_id(CALL_GRAPH_EXPLORER), CALL_GRAPH_EXPLORER,
                        inputs, _explorer_model(state), state)


# --- endpoint catalog ----------------------------------------------------------


@dataclass(frozen=True)
class _CatalogState:
    slice: object


def _catalog_model(state: _CatalogState) -> TreeModel:
    handlers = [
        e for e in state.slice.elements
        if e.kind == "Method" and e.attr("endpointVerb") is not None
    ]
    handlers.sort(key=lambda e: (e.attr("endpointRoute"), e.attr("endpointVerb")))
    items = tuple(
        TreeItem(
            f'{e.attr("endpointVerb")} {e.attr("endpointRoute")}',
            e.id,
            navigate_action(e.id, e.attr("file"), e.attr("line")),
        )
        for e in handlers
    )
    return TreeModel(items)


def catalog_entry_points(slice_) -> ToolInstance:
    """One item per @endpoint handler, ordered by (route, verb)."""
    state = _CatalogState(slice_)
    return ToolInstance(
        _new_id(ENDPOINT_CATALOG),
        ENDPOINT_CATALOG,
        (("elements", len(slice_.elements)),),
        _catalog_model(state),
        state,
    )


# --- reachability inspector ----------------------------------------------------


@dataclass(frozen=True)
class _ReachState:
    provider: object = field(compare=False)
    query: ReachQuery = None


def _render_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return json.dumps(value)
    return str(value)


def _reach_model(state: _ReachState) -> TreeModel:
    q = state.query
    try:
        report = analyze_reachability(
            state.provider,
            q.method,
            q.target,
            param_constraints=q.param_constraints,
            return_constraint=q.return_constraint,
            bounds=q.bounds,
            config=q.config,
            max_models=q.max_models,
        )
    except (UnknownElement, UnknownTarget, ConstraintScopeError, SortError) as err:
        return TreeModel((TreeItem(f"error: {err}"),))

    status = TreeItem(
        f"status: {report.status}",
        children=(
            TreeItem(f"pathsExplored: {report.paths_explored}"),
            TreeItem(f"truncated: {'true' if report.truncated else 'false'}"),
        ),
    )
    witnesses = tuple(
        TreeItem(
            f"witness {i}",
            children=tuple(
                TreeItem(f"{name} = {_render_value(value)}")
                for name, value in model.assignment
            ),
        )
        for i, model in enumerate(report.models, 1)
    )
    rerun = TreeItem("re-run query", action=run_query_action("reachability"))
    return TreeModel((status, *witnesses, rerun))


def inspect_reachability(provider, query: ReachQuery) -> ToolInstance:
    """Witness models (or a proof of absence) for a reachability query."""
    state = _ReachState(provider, query)
    target = query.target
    target_desc = (f"call:{target.callee}" if target.kind == "call"
                   else f"stmt:{target.method}:{target.sid}")
    inputs = (("method", query.method), ("target", target_desc))
    return ToolInstance(_new_id(REACHABILITY_INSPECTOR), REACHABILITY_INSPECTOR,
                        inputs, _reach_model(state), state)


# --- action dispatch -----------------------------------------------------------


def apply_action(instance: ToolInstance, action) -> ApplyResult:
    """Apply an action from the instance's current model.

    `action` may be an Action value or a bare action id. Anything the
    current model does not carry (including a stale action from an
    earlier model) raises StaleAction.
    """
    known = instance.model.actions()
    action_id = action.id if isinstance(action, Action) else action
    current = known.get(action_id)
    if current is None or (isinstance(action, Action) and action != current):
        raise StaleAction(f"action {action_id!r} is not part of the current model")

    if current.kind == "navigate":
        nav = NavigationRequest(current.arg("file"), current.arg("line"))
        return ApplyResult(instance, nav)
    if current.kind == "expand":
        return ApplyResult(_expand(instance, current.arg("node")))
    return ApplyResult(_rerun(instance))


def _expand(instance: ToolInstance, node_id: str) -> ToolInstance:
    state = instance.state
    if instance.kind == STRUCTURE_BROWSER:
        new_state = _BrowserState(state.slice, state.expanded | {node_id})
        return replace(instance, model=_browser_model(new_state), state=new_state)
    if instance.kind == CALL_GRAPH_EXPLORER:
        new_state = _ExplorerState(
            state.cg,
            state.visible | set(state.cg.callees(node_id)),
            state.expanded | {node_id},
            state.emphasized,
        )
        return replace(instance, model=_explorer_model(new_state), state=new_state)
    raise StaleAction(f"{instance.kind} emits no expand actions")


def _rerun(instance: ToolInstance) -> ToolInstance:
    if instance.kind != REACHABILITY_INSPECTOR:
        raise StaleAction(f"{instance.kind} emits no runQuery actions")
    return replace(instance, model=_reach_model(instance.state))
