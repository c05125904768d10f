"""Call graphs from entry methods, and interprocedural dependency marking.

Construction lowers CFGs lazily: only methods actually reached from the
entries are lowered.  The graph keeps a handle to its provider so the
interprocedural pass can fetch CFGs and summaries on demand.

Interprocedural taint: a worklist over call edges propagates tainted
parameter index sets.  Within a method, tainted data flows through the
def-use closure; at a call site, tainted arguments taint the callee's
parameters, and the call's result is tainted exactly when the callee's
paramToReturn intersects the tainted argument indices (the refinement
the lone-CFG summaries approximate opaquely).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from ..minilang.cfg import Assign, CallAssign, expr_vars
from ..minilang.facts import UnresolvedCall
from .reaching import MethodSummary, method_summary, reaching_definitions


class UnknownMethod(Exception):
    pass


class BadParamIndex(Exception):
    pass


@dataclass(frozen=True)
class CallEdge:
    caller: str
    site: str  # call-site statement sid in the caller's CFG
    callee: str


@dataclass(frozen=True)
class CallGraph:
    nodes: tuple
    edges: tuple
    roots: tuple
    provider: object = field(compare=False, repr=False, default=None)

    def callees(self, method: str) -> list:
        return [e.callee for e in self.edges if e.caller == method]


def build_call_graph(provider, entries) -> CallGraph:
    """Closure over resolved call targets, lowering only reached methods."""
    roots = tuple(dict.fromkeys(entries))
    for m in roots:
        provider.find_method(m)
    nodes: list = []
    edges: list = []
    seen = set()
    queue = deque(roots)
    while queue:
        method = queue.popleft()
        if method in seen:
            continue
        seen.add(method)
        nodes.append(method)
        cfg = provider.lower_to_cfg(method)
        for site in cfg.call_sites():
            try:
                callee = provider.resolve_call_target(site)
            except UnresolvedCall as err:
                where = site.span
                at = f" at {where.file}:{where.start_line}:{where.start_col}" if where else ""
                raise UnresolvedCall(f"{site.callee}{at}") from err
            edges.append(CallEdge(method, site.sid, callee))
            if callee not in seen:
                queue.append(callee)
    return CallGraph(tuple(nodes), tuple(edges), roots, provider)


def _propagate(cfg, tainted_params: set, summary_of) -> dict:
    """Intra-method flow from tainted params; returns {site sid: tainted arg
    indices}.  Call results are tainted via the callee's paramToReturn."""
    reaching = reaching_definitions(cfg)
    tainted = {
        (name, f"param:{i}")
        for i, (name, _) in enumerate(cfg.params)
        if i in tainted_params
    }
    tainted_args: dict[str, set] = {}
    changed = True
    while changed:
        changed = False
        for _, stmt in cfg.all_statements():
            if isinstance(stmt, Assign):
                uses = expr_vars(stmt.expr)
                live = reaching.at_statement(stmt.sid)
                if any(pair in tainted and pair[0] in uses for pair in live):
                    pair = (stmt.target, stmt.sid)
                    if pair not in tainted:
                        tainted.add(pair)
                        changed = True
            elif isinstance(stmt, CallAssign):
                live = reaching.at_statement(stmt.sid)
                hot_vars = {v for v, d in live if (v, d) in tainted}
                hot = {j for j, arg in enumerate(stmt.args) if expr_vars(arg) & hot_vars}
                known = tainted_args.setdefault(stmt.sid, set())
                if not hot <= known:
                    known |= hot
                    changed = True
                summary = summary_of(stmt.callee)
                if (
                    stmt.target is not None
                    and summary is not None
                    and known & set(summary.param_to_return)
                ):
                    pair = (stmt.target, stmt.sid)
                    if pair not in tainted:
                        tainted.add(pair)
                        changed = True
    return tainted_args


def interprocedural_dependency(cg: CallGraph, entry: str, param_index: int) -> set:
    """Methods that acquire at least one tainted parameter when `entry`'s
    chosen parameter is the taint source; an over-approximation of
    concrete value sensitivity."""
    if entry not in cg.roots:
        raise UnknownMethod(entry)
    provider = cg.provider
    entry_cfg = provider.lower_to_cfg(entry)
    if not 0 <= param_index < len(entry_cfg.params):
        raise BadParamIndex(f"{entry} has arity {len(entry_cfg.params)}")

    target_of = {(e.caller, e.site): e.callee for e in cg.edges}
    members = set(cg.nodes)
    summaries: dict[str, MethodSummary] = {}

    def summary_of(qname: str) -> MethodSummary | None:
        if qname not in members:
            return None
        if qname not in summaries:
            summaries[qname] = method_summary(provider.lower_to_cfg(qname))
        return summaries[qname]

    tainted: dict[str, set] = {entry: {param_index}}
    queue = deque([entry])
    queued = {entry}
    while queue:
        method = queue.popleft()
        queued.discard(method)
        flows = _propagate(provider.lower_to_cfg(method), tainted[method], summary_of)
        for site, arg_indices in flows.items():
            callee = target_of.get((method, site))
            if callee is None or not arg_indices:
                continue
            acquired = tainted.setdefault(callee, set())
            if not arg_indices <= acquired:
                acquired |= arg_indices
                if callee not in queued:
                    queued.add(callee)
                    queue.append(callee)
    return {m for m, params in tainted.items() if params}


# --- exports ---------------------------------------------------------------------


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def callgraph_to_dot(cg: CallGraph, emphasized=()) -> str:
    emphasized = set(emphasized)
    lines = ["digraph callgraph {"]
    for node in cg.nodes:
        mark = " [penwidth=3]" if node in emphasized else ""
        lines.append(f"  {_quote(node)}{mark};")
    for edge in cg.edges:
        lines.append(f"  {_quote(edge.caller)} -> {_quote(edge.callee)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def callgraph_to_json(cg: CallGraph, emphasized=None) -> dict:
    doc = {
        "nodes": list(cg.nodes),
        "edges": [
            {"caller": e.caller, "site": e.site, "callee": e.callee} for e in cg.edges
        ],
        "roots": list(cg.roots),
    }
    if emphasized is not None:
        doc["emphasized"] = sorted(emphasized)
    return doc
