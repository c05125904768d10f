"""UI-agnostic tool models: trees, graphs, and the actions they carry.

Models are immutable values. Views render them; controllers replace
them. An action is identified by a content-derived id, so an id stays
valid exactly as long as the current model still contains it.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class ModelInvariantError(ValueError):
    """A model value violated one of its structural invariants."""


@dataclass(frozen=True)
class Action:
    id: str
    kind: str  # navigate | expand | runQuery
    payload: tuple = ()  # frozen (key, value) pairs

    def arg(self, name: str, default=None):
        for key, value in self.payload:
            if key == name:
                return value
        return default


def navigate_action(element_id: str, file: str, line: int) -> Action:
    return Action(f"nav:{element_id}", "navigate",
                  (("file", file), ("line", line)))


def expand_action(node_id: str) -> Action:
    return Action(f"expand:{node_id}", "expand", (("node", node_id),))


def run_query_action(query_ref: str) -> Action:
    return Action(f"run:{query_ref}", "runQuery", (("query", query_ref),))


@dataclass(frozen=True)
class NavigationRequest:
    """What a navigate action resolves to; the host decides how to open it."""

    file: str
    line: int


@dataclass(frozen=True)
class TreeItem:
    label: str
    element_id: str | None = None
    action: Action | None = None
    children: tuple = ()

    def __post_init__(self):
        if not self.label:
            raise ModelInvariantError("tree item label must be non-empty")


@dataclass(frozen=True)
class TreeModel:
    items: tuple = ()

    def actions(self) -> dict:
        """Every action reachable in the tree, keyed by id."""
        out: dict = {}

        def walk(items):
            for item in items:
                if item.action is not None:
                    out[item.action.id] = item.action
                walk(item.children)

        walk(self.items)
        return out


@dataclass(frozen=True)
class GraphNode:
    id: str
    label: str
    emphasized: bool = False
    expandable: bool = False

    def __post_init__(self):
        if not self.label:
            raise ModelInvariantError("graph node label must be non-empty")


@dataclass(frozen=True)
class GraphEdge:
    source: str
    target: str
    kind: str = "calls"


@dataclass(frozen=True)
class GraphModel:
    nodes: tuple = ()
    edges: tuple = ()
    pending_actions: tuple = ()  # sorted (node-id, Action) pairs

    def __post_init__(self):
        ids = {n.id for n in self.nodes}
        for e in self.edges:
            if e.source not in ids or e.target not in ids:
                raise ModelInvariantError(
                    f"edge {e.source}->{e.target} has an endpoint outside the model")
        for node_id, _ in self.pending_actions:
            if node_id not in ids:
                raise ModelInvariantError(
                    f"pending action on unknown node {node_id}")

    def actions(self) -> dict:
        return {a.id: a for _, a in self.pending_actions}


def action_to_json(action: Action) -> dict:
    out = {"id": action.id, "kind": action.kind}
    out.update(dict(action.payload))
    return out


def _item_to_json(item: TreeItem) -> dict:
    out: dict = {"label": item.label}
    if item.element_id is not None:
        out["elementId"] = item.element_id
    if item.action is not None:
        out["action"] = action_to_json(item.action)
    out["children"] = [_item_to_json(c) for c in item.children]
    return out


def tree_to_json(model: TreeModel) -> dict:
    return {"kind": "tree", "items": [_item_to_json(i) for i in model.items]}


def graph_to_json(model: GraphModel) -> dict:
    return {
        "kind": "graph",
        "nodes": [
            {"id": n.id, "label": n.label, "emphasized": n.emphasized,
             "expandable": n.expandable}
            for n in model.nodes
        ],
        "edges": [
            {"source": e.source, "target": e.target, "kind": e.kind}
            for e in model.edges
        ],
        "pendingActions": {
            node_id: action_to_json(a) for node_id, a in model.pending_actions
        },
    }


def model_to_json(model) -> dict:
    if isinstance(model, TreeModel):
        return tree_to_json(model)
    if isinstance(model, GraphModel):
        return graph_to_json(model)
    raise TypeError(f"not a tool model: {model!r}")


def graph_to_dot(model: GraphModel) -> str:
    """DOT text for a graph model; stable ordering, so identical state
    serializes to identical bytes."""
    lines = ["digraph tool {"]
    for n in sorted(model.nodes, key=lambda n: n.id):
        style = " [penwidth=3]" if n.emphasized else ""
        lines.append(f'  "{n.id}"{style};')
    for e in sorted(model.edges, key=lambda e: (e.source, e.target, e.kind)):
        lines.append(f'  "{e.source}" -> "{e.target}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
