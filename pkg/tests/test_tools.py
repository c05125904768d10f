"""Tool controllers, models, actions, and the script runner.

The controllers are pure state machines: same instance + same action
must give equal models, and an action is honored exactly while the
model that emitted it is current. Emphasis is checked against the
analysis pass directly (delegation, not a reimplementation).
"""

from __future__ import annotations

import json

import pytest

from pcw.analysis import build_call_graph, interprocedural_dependency
from pcw.minilang import MiniProvider, SyntaxForest, corpus_path, parse_project, parse_source
from pcw.slices import build_slice
from pcw.symexec import BoolAtom, IntCmp, StrEq, StrLen, StrMatches, Target
from pcw.tools import (
    Action,
    BadOption,
    EmptySlice,
    GraphEdge,
    GraphModel,
    GraphNode,
    ModelInvariantError,
    ParamValidation,
    ReachQuery,
    ScriptSyntaxError,
    StaleAction,
    ToolContext,
    TreeItem,
    TreeModel,
    UnknownTool,
    apply_action,
    browse_structure,
    catalog_entry_points,
    expand_action,
    explore_call_graph,
    graph_to_dot,
    inspect_reachability,
    model_to_json,
    navigate_action,
    parse_constraint,
    parse_target,
    run_tool_script,
)

CREATE = "Configurations.ConfigurationController.CreateConfiguration"
VALID = "Validation.Validator.IsConfigurationNameValid"
TWIN = "Storage.Twin.CreateDeviceTwinConfiguration"
SPEC_RE = "[0-9a-z]([0-9a-z-]{0,62}[0-9a-z])?"


@pytest.fixture(scope="module")
def provider():
    return MiniProvider(parse_project(str(corpus_path("buggy"))))


@pytest.fixture(scope="module")
def project_slice(provider):
    return build_slice(provider)


def provider_of(text: str) -> MiniProvider:
    tree, diags = parse_source(text)
    assert not diags, diags
    return MiniProvider(SyntaxForest("t", [tree]))


# --- model invariants ----------------------------------------------------------


def test_tree_item_rejects_empty_label():
    with pytest.raises(ModelInvariantError):
        TreeItem("")


def test_graph_edge_endpoints_must_be_nodes():
    a = GraphNode("a", "a")
    with pytest.raises(ModelInvariantError):
        GraphModel((a,), (GraphEdge("a", "ghost"),), ())


def test_pending_actions_must_reference_nodes():
    a = GraphNode("a", "a")
    with pytest.raises(ModelInvariantError):
        GraphModel((a,), (), (("ghost", expand_action("ghost")),))


def test_graph_node_rejects_empty_label():
    with pytest.raises(ModelInvariantError):
        GraphNode("a", "")


def test_action_ids_are_content_addressed():
    assert navigate_action("E", "f.mini", 3).id == "nav:E"
    assert expand_action("N").id == "expand:N"
    assert navigate_action("E", "f.mini", 3) == navigate_action("E", "f.mini", 3)


# --- structure browser ---------------------------------------------------------


def test_browser_root_has_three_namespaces(project_slice):
    instance = browse_structure(project_slice)
    items = instance.model.items
    assert len(items) == 1
    root = items[0]
    assert root.label == "buggy"
    assert [c.label for c in root.children] == ["Configurations", "Storage", "Validation"]


def test_browser_expands_lazily(project_slice):
    instance = browse_structure(project_slice)
    ns = instance.model.items[0].children[0]
    assert ns.children == ()
    assert ns.action.kind == "expand"
    after = apply_action(instance, ns.action).instance
    ns2 = after.model.items[0].children[0]
    assert [c.label for c in ns2.children] == ["ConfigurationController"]


def test_browser_leaf_navigates_to_method(project_slice):
    instance = browse_structure(project_slice)
    # expand down to the method level
    for _ in range(2):
        item = instance.model.items[0]
        while item.children:
            item = item.children[0]
        instance = apply_action(instance, item.action).instance
    item = instance.model.items[0]
    while item.children:
        item = item.children[0]
    assert item.label == "CreateConfiguration"
    result = apply_action(instance, item.action)
    assert result.navigation.file == "configurations.mini"
    assert result.navigation.line == 4
    assert result.instance is instance  # navigation does not change the model


def test_browser_single_method_slice_is_a_chain(provider):
    slice_ = build_slice(provider, keep=lambda e: e.id == VALID)
    instance = browse_structure(slice_)

    def item_at(instance, depth):
        item = instance.model.items[0]
        for _ in range(depth):
            assert len(item.children) == 1
            item = item.children[0]
        return item

    labels = []
    depth = 0
    while True:
        item = item_at(instance, depth)
        if item.action is not None and item.action.kind == "expand":
            instance = apply_action(instance, item.action).instance
            item = item_at(instance, depth)
        labels.append(item.label)
        if not item.children:
            break
        depth += 1
    assert labels == ["buggy", "Validation", "Validator", "IsConfigurationNameValid"]


def test_browser_rejects_empty_slice(provider):
    empty = build_slice(provider, keep=lambda e: False)
    with pytest.raises(EmptySlice):
        browse_structure(empty)


# --- call-graph explorer -------------------------------------------------------


def test_explorer_full_view_has_three_nodes(provider):
    cg = build_call_graph(provider, [CREATE])
    instance = explore_call_graph(cg)
    model = instance.model
    assert sorted(n.id for n in model.nodes) == sorted([CREATE, VALID, TWIN])
    assert all(not n.emphasized for n in model.nodes)
    assert len(model.edges) == 2


def test_explorer_emphasis_marks_all_three(provider):
    cg = build_call_graph(provider, [CREATE])
    instance = explore_call_graph(cg, emphasize_entry=CREATE, emphasize_param=0)
    model = instance.model
    emphasized = {n.id for n in model.nodes if n.emphasized}
    assert emphasized == {CREATE, VALID, TWIN}


def test_emphasis_delegates_to_analysis(provider):
    text = """\
namespace A {
  class B {
    fn f(x: int, y: int) -> int {
      let a = A.B.g(x);
      let b = A.B.h(y);
      return a + b;
    }
    fn g(v: int) -> int { return v + 1; }
    fn h(v: int) -> int { return v * 2; }
  }
}
"""
    prov = provider_of(text)
    cg = build_call_graph(prov, ["A.B.f"])
    for param in (0, 1):
        expected = set(interprocedural_dependency(cg, "A.B.f", param))
        model = explore_call_graph(cg, "A.B.f", param).model
        assert {n.id for n in model.nodes if n.emphasized} == expected


def test_explorer_collapsed_start_expands_incrementally(provider):
    cg = build_call_graph(provider, [CREATE])
    instance = explore_call_graph(cg, pre_expand=set())
    model = instance.model
    assert [n.id for n in model.nodes] == [CREATE]
    assert model.edges == ()
    action = dict(model.pending_actions)[CREATE]
    after = apply_action(instance, action).instance
    assert len(after.model.nodes) == len(model.nodes) + 2
    assert len(after.model.edges) == len(model.edges) + 2


def test_explorer_pre_expand_closure(provider):
    cg = build_call_graph(provider, [CREATE])
    model = explore_call_graph(cg, pre_expand={CREATE}).model
    assert sorted(n.id for n in model.nodes) == sorted([CREATE, VALID, TWIN])
    assert len(model.edges) == 2
    # leaves have no callees, so nothing is left to expand
    assert model.pending_actions == ()


def test_explorer_option_validation(provider):
    cg = build_call_graph(provider, [CREATE])
    with pytest.raises(BadOption):
        explore_call_graph(cg, emphasize_param=0)  # param without entry
    with pytest.raises(BadOption):
        explore_call_graph(cg, emphasize_entry=VALID, emphasize_param=0)  # not a root
    with pytest.raises(BadOption):
        explore_call_graph(cg, emphasize_entry=CREATE, emphasize_param=7)
    with pytest.raises(BadOption):
        explore_call_graph(cg, pre_expand={"No.Such.Method"})


def test_explorer_emphasis_revealed_as_nodes_appear(provider):
    cg = build_call_graph(provider, [CREATE])
    instance = explore_call_graph(cg, CREATE, 0, pre_expand=set())
    assert {n.id for n in instance.model.nodes if n.emphasized} == {CREATE}
    action = dict(instance.model.pending_actions)[CREATE]
    after = apply_action(instance, action).instance
    assert {n.id for n in after.model.nodes if n.emphasized} == {CREATE, VALID, TWIN}


# --- endpoint catalog ----------------------------------------------------------


def test_catalog_lists_corpus_endpoint(project_slice):
    instance = catalog_entry_points(project_slice)
    items = instance.model.items
    assert [i.label for i in items] == ["POST /configurations"]
    assert items[0].element_id == CREATE
    result = apply_action(instance, items[0].action)
    assert (result.navigation.file, result.navigation.line) == ("configurations.mini", 4)


def test_catalog_without_endpoints_is_empty(provider):
    slice_ = build_slice(provider, keep=lambda e: e.id == VALID)
    instance = catalog_entry_points(slice_)
    assert instance.model.items == ()


def test_catalog_orders_by_route_then_verb():
    text = """\
namespace N {
  class C {
    @endpoint("POST", "/b")
    fn PB() -> bool { return true; }
    @endpoint("GET", "/b")
    fn GB() -> bool { return true; }
    @endpoint("GET", "/a")
    fn GA() -> bool { return true; }
  }
}
"""
    slice_ = build_slice(provider_of(text))
    labels = [i.label for i in catalog_entry_points(slice_).model.items]
    assert labels == ["GET /a", "GET /b", "POST /b"]


def test_catalog_completeness_counts_attributes(project_slice):
    instance = catalog_entry_points(project_slice)
    endpoint_methods = [
        e for e in project_slice.elements
        if e.kind == "Method" and e.attr("endpointVerb") is not None
    ]
    assert len(instance.model.items) == len(endpoint_methods)


# --- reachability inspector ----------------------------------------------------


def reach_query(provider, **overrides):
    base = dict(
        method=CREATE,
        target=Target.call(TWIN),
        param_constraints=(parse_constraint(f'name !~ "{SPEC_RE}"'),),
    )
    base.update(overrides)
    return ReachQuery(**base)


def test_inspector_shows_single_dash_witness(provider):
    instance = inspect_reachability(provider, reach_query(provider))
    items = instance.model.items
    assert items[0].label == "status: Reachable"
    witness = items[1]
    assert witness.label == "witness 1"
    assert [c.label for c in witness.children] == ['name = "-"', 'payload = ""']


def test_inspector_proves_fixed_corpus_clean():
    prov = MiniProvider(parse_project(str(corpus_path("fixed"))))
    instance = inspect_reachability(prov, reach_query(prov))
    items = instance.model.items
    assert items[0].label == "status: ProvenUnreachable"
    assert not any(i.label.startswith("witness") for i in items)


def test_inspector_unknown_method_becomes_error_item(provider):
    query = reach_query(provider, method="No.Such.Method")
    instance = inspect_reachability(provider, query)
    assert instance.model.items[0].label.startswith("error: ")


def test_inspector_rerun_reproduces_model(provider):
    instance = inspect_reachability(provider, reach_query(provider))
    rerun = instance.model.items[-1]
    assert rerun.label == "re-run query"
    again = apply_action(instance, rerun.action).instance
    assert again.model == instance.model


def test_inspector_renders_bools_and_ints():
    text = """\
namespace N {
  class C {
    fn f(a: int, b: bool) -> int {
      if (b) { return a; }
      return 0;
    }
  }
}
"""
    prov = provider_of(text)
    query = ReachQuery(
        method="N.C.f",
        target=Target.statement("N.C.f", "s1"),
        param_constraints=(parse_constraint("a == 7"), parse_constraint("b == true")),
    )
    instance = inspect_reachability(prov, query)
    witness = instance.model.items[1]
    assert sorted(c.label for c in witness.children) == ["a = 7", "b = true"]


# --- actions: purity, closure, staleness ---------------------------------------


def test_model_purity_same_action_same_model(project_slice):
    instance = browse_structure(project_slice)
    action = instance.model.items[0].children[0].action
    once = apply_action(instance, action).instance.model
    twice = apply_action(instance, action).instance.model
    assert once == twice


def test_action_closure_expand_expires_after_use(provider):
    cg = build_call_graph(provider, [CREATE])
    instance = explore_call_graph(cg, pre_expand=set())
    action = dict(instance.model.pending_actions)[CREATE]
    after = apply_action(instance, action).instance
    assert action.id not in after.model.actions()
    with pytest.raises(StaleAction):
        apply_action(after, action)


def test_every_emitted_action_is_accepted(project_slice, provider):
    instances = [
        browse_structure(project_slice),
        catalog_entry_points(project_slice),
        explore_call_graph(build_call_graph(provider, [CREATE]), pre_expand=set()),
    ]
    for instance in instances:
        for action_id in instance.model.actions():
            apply_action(instance, action_id)  # must not raise


def test_unknown_action_id_is_stale(project_slice):
    instance = catalog_entry_points(project_slice)
    with pytest.raises(StaleAction):
        apply_action(instance, "expand:bogus")


def test_forged_action_with_known_id_is_stale(project_slice):
    instance = catalog_entry_points(project_slice)
    genuine = instance.model.items[0].action
    forged = Action(genuine.id, "navigate", (("file", "elsewhere.mini"), ("line", 1)))
    with pytest.raises(StaleAction):
        apply_action(instance, forged)


def test_apply_action_returns_fresh_instance(provider):
    cg = build_call_graph(provider, [CREATE])
    instance = explore_call_graph(cg, pre_expand=set())
    before = instance.model
    action = dict(instance.model.pending_actions)[CREATE]
    result = apply_action(instance, action)
    assert result.instance is not instance
    assert instance.model == before  # original untouched
    assert result.instance.id == instance.id


# --- constraint mini-syntax ----------------------------------------------------


def test_parse_negative_regex_constraint():
    c = parse_constraint(f'name !~ "{SPEC_RE}"')
    assert isinstance(c, StrMatches)
    assert c.symbol == "name"
    assert not c.positive
    assert c.pattern == SPEC_RE


def test_parse_positive_regex_constraint():
    c = parse_constraint('name ~ "[a-c]*"')
    assert isinstance(c, StrMatches) and c.positive


def test_parse_len_constraint():
    c = parse_constraint("len(name) <= 64")
    assert isinstance(c, StrLen)
    assert (c.op, c.symbol, c.bound) == ("<=", "name", 64)


def test_parse_int_comparison():
    c = parse_constraint("x > 5")
    assert isinstance(c, IntCmp)
    assert c.op == ">"
    assert dict(c.expr.terms) == {"x": 1}
    assert c.expr.const == -5


def test_parse_bool_equality():
    c = parse_constraint("flag == true")
    assert isinstance(c, BoolAtom)
    assert (c.symbol, c.expected) == ("flag", True)
    c = parse_constraint("flag != true")
    assert c.expected is False


def test_parse_string_equality_and_inequality():
    c = parse_constraint('name == "abc"')
    assert isinstance(c, StrEq) and c.literal == "abc"
    c = parse_constraint('name != "abc"')
    assert isinstance(c, StrMatches) and not c.positive


def test_return_context_maps_ret_atom():
    c = parse_constraint("ret == true", return_context=True)
    assert isinstance(c, BoolAtom) and c.symbol == "return"
    c = parse_constraint("ret > 3", return_context=True)
    assert dict(c.expr.terms) == {"return": 1}


def test_return_context_requires_ret_atom():
    with pytest.raises(ParamValidation):
        parse_constraint("x > 3", return_context=True)
    # outside a return context, `ret` is just a parameter name
    c = parse_constraint("ret > 3")
    assert dict(c.expr.terms) == {"ret": 1}


@pytest.mark.parametrize(
    "text",
    [
        "",
        "name",
        "name ==",
        'len(name) ~ "x"',  # regex on a length
        "len(name) == true",
        "len(name) <= -1",
        'name < "abc"',  # strings are not ordered
        "flag < true",
        'name ~ "["',  # malformed regex
        "x == 1.5",
    ],
)
def test_parse_constraint_rejects(text):
    with pytest.raises(ParamValidation):
        parse_constraint(text)


def test_parse_target_forms():
    t = parse_target(f"call:{TWIN}", CREATE)
    assert (t.kind, t.callee) == ("call", TWIN)
    t = parse_target("stmt:s3", CREATE)
    assert (t.kind, t.method, t.sid) == ("statement", CREATE, "s3")
    t = parse_target(f"stmt:{VALID}:s1", CREATE)
    assert (t.kind, t.method, t.sid) == ("statement", VALID, "s1")
    with pytest.raises(ParamValidation):
        parse_target("jump:s1", CREATE)


# --- script runner -------------------------------------------------------------


@pytest.fixture(scope="module")
def context(provider):
    return ToolContext(provider)


def run(context, **doc):
    return run_tool_script(json.dumps(doc), context)


def test_script_runs_each_tool(context):
    assert run(context, tool="structureBrowser").kind == "structureBrowser"
    assert run(context, tool="apiEndpointCatalog").kind == "apiEndpointCatalog"
    cg = run(context, tool="callGraphExplorer", roots=[CREATE])
    assert cg.kind == "callGraphExplorer"
    reach = run(
        context,
        tool="reachabilityInspector",
        method=CREATE,
        target=f"call:{TWIN}",
        constraints=[f'name !~ "{SPEC_RE}"'],
    )
    assert reach.model.items[0].label == "status: Reachable"


def test_script_explorer_matches_direct_call(context, provider):
    instance = run(
        context,
        tool="callGraphExplorer",
        roots=[CREATE],
        emphasize={"param": 0},
    )
    cg = build_call_graph(provider, [CREATE])
    direct = explore_call_graph(cg, CREATE, 0)
    assert instance.model == direct.model


def test_script_unknown_tool(context):
    with pytest.raises(UnknownTool):
        run(context, tool="nope")


@pytest.mark.parametrize("text", ["not json", "[1,2]", '"just a string"', "{}"])
def test_script_syntax_errors(context, text):
    with pytest.raises(ScriptSyntaxError):
        run_tool_script(text, context)


def test_script_param_validation(context):
    with pytest.raises(ParamValidation):
        run(context, tool="structureBrowser", extra=1)  # unknown key
    with pytest.raises(ParamValidation):
        run(context, tool="callGraphExplorer")  # roots required
    with pytest.raises(ParamValidation):
        run(context, tool="callGraphExplorer", roots=[])
    with pytest.raises(ParamValidation):
        run(context, tool="callGraphExplorer", roots=["No.Such.Method"])
    with pytest.raises(ParamValidation):
        run(context, tool="callGraphExplorer", roots=[CREATE], emphasize={"entry": CREATE})
    with pytest.raises(ParamValidation):
        run(context, tool="reachabilityInspector", method=CREATE)  # target required
    with pytest.raises(ParamValidation):
        run(
            context,
            tool="reachabilityInspector",
            method=CREATE,
            target=f"call:{TWIN}",
            bounds={"loopUnroll": 0},
        )
    with pytest.raises(ParamValidation):
        run(
            context,
            tool="reachabilityInspector",
            method=CREATE,
            target=f"call:{TWIN}",
            maxModels=0,
        )


def test_script_bounds_are_applied(context):
    instance = run(
        context,
        tool="reachabilityInspector",
        method=CREATE,
        target=f"call:{TWIN}",
        constraints=[f'name !~ "{SPEC_RE}"'],
        bounds={"maxPaths": 1},
    )
    labels = [i.label for i in instance.model.items]
    assert "truncated: true" in [
        c.label for i in instance.model.items for c in i.children
    ] or any("Inconclusive" in l for l in labels)


# --- wire format and exports ---------------------------------------------------


def test_tree_json_shape(project_slice):
    doc = model_to_json(catalog_entry_points(project_slice).model)
    assert doc["kind"] == "tree"
    item = doc["items"][0]
    assert item["label"] == "POST /configurations"
    assert item["action"]["kind"] == "navigate"
    assert item["action"]["id"].startswith("nav:")
    assert item["action"]["file"] == "configurations.mini"


def test_graph_json_shape(provider):
    cg = build_call_graph(provider, [CREATE])
    doc = model_to_json(explore_call_graph(cg, CREATE, 0).model)
    assert doc["kind"] == "graph"
    assert {n["id"] for n in doc["nodes"]} == {CREATE, VALID, TWIN}
    assert all(n["emphasized"] for n in doc["nodes"])
    assert {(e["source"], e["target"]) for e in doc["edges"]} == {
        (CREATE, VALID),
        (CREATE, TWIN),
    }


def test_model_json_round_trips_through_json(provider):
    cg = build_call_graph(provider, [CREATE])
    doc = model_to_json(explore_call_graph(cg).model)
    assert json.loads(json.dumps(doc)) == doc


def test_dot_export_is_stable_and_marks_emphasis(provider):
    cg = build_call_graph(provider, [CREATE])
    instance = explore_call_graph(cg, CREATE, 0)
    a = graph_to_dot(instance.model)
    b = graph_to_dot(explore_call_graph(cg, CREATE, 0).model)
    assert a == b
    assert a.splitlines()[0] == "digraph tool {"
    assert "penwidth=3" in a
    assert a.count("->") == 2
