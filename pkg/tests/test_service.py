"""Config parsing, session store, the HTTP API, and the CLI.

HTTP behavior is pinned down to status codes: 404 for unknown ids,
400 for validation failures, 409 for stale actions, 422 for analysis
errors carrying a structured reason. Reads must be byte-stable and
sessions fully isolated from one another.
"""

from __future__ import annotations

import json

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from pcw.minilang import corpus_path
from pcw.service import (
    ConfigError,
    ParseFailed,
    ServerConfig,
    SessionStore,
    UnknownSession,
    UnknownToolId,
    create_app,
    load_config,
    open_project,
    parse_config,
)
from pcw.service.cli import main

CREATE = "Configurations.ConfigurationController.CreateConfiguration"
VALID = "Validation.Validator.IsConfigurationNameValid"
TWIN = "Storage.Twin.CreateDeviceTwinConfiguration"
SPEC_RE = "[0-9a-z]([0-9a-z-]{0,62}[0-9a-z])?"

BUGGY = str(corpus_path("buggy"))
FIXED = str(corpus_path("fixed"))


@pytest.fixture()
def client():
    return TestClient(create_app())


@pytest.fixture()
def project(client):
    return client.post("/api/projects", json={"path": BUGGY}).json()["projectId"]


def make_tool(client, project, **script):
    r = client.post("/api/tools", json={"projectId": project, "script": script})
    assert r.status_code == 200, r.text
    return r.json()


# --- configuration -------------------------------------------------------------


def test_config_defaults():
    cfg = parse_config("")
    assert cfg == ServerConfig()
    assert cfg.port == 8245
    assert cfg.solver_cmd is None


def test_config_full_file():
    cfg = parse_config(
        """
        # workbench settings
        port=9000
        solver.cmd=z3 -in
        bounds.loopUnroll=4
        bounds.maxPaths=500
        bounds.intBound=64
        bounds.stringLenBound=32
        cors.allow=http://localhost:5173, http://127.0.0.1:5173
        """
    )
    assert cfg.port == 9000
    assert cfg.solver_cmd == "z3 -in"
    assert cfg.bounds().loop_unroll == 4
    assert cfg.bounds().max_paths == 500
    sc = cfg.solver_config()
    assert (sc.int_low, sc.int_high) == (-64, 64)
    assert sc.max_string_length == 32
    assert cfg.cors_allow == ("http://localhost:5173", "http://127.0.0.1:5173")


def test_config_empty_solver_cmd_means_none():
    assert parse_config("solver.cmd=").solver_cmd is None


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("port=0", "positive"),
        ("port=70000", "out of range"),
        ("bounds.loopUnroll=-3", "positive"),
        ("bounds.maxPaths=many", "integer"),
        ("colour=blue", "unknown key"),
        ("just words", "key=value"),
    ],
)
def test_config_rejects(text, fragment):
    with pytest.raises(ConfigError, match=fragment):
        parse_config(text)


def test_config_error_reports_line_number():
    with pytest.raises(ConfigError, match="line 3"):
        parse_config("port=9000\n\nwhat=ever\n")


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "absent.cfg"))


def test_load_config_round_trip(tmp_path):
    path = tmp_path / "server.cfg"
    path.write_text("port=9001\n")
    assert load_config(str(path)).port == 9001


# --- sessions ------------------------------------------------------------------


def test_open_project_on_corpus():
    session = open_project(BUGGY)
    assert session.id == "p1"
    assert sorted(e.id for e in session.provider.load_roots()) == ["buggy"]


def test_open_project_same_path_twice_is_independent():
    store = SessionStore()
    a = store.open(BUGGY)
    b = store.open(BUGGY)
    assert a.id != b.id
    assert a.provider is not b.provider
    assert a.tools is not b.tools


def test_open_project_parse_failure(tmp_path):
    bad = tmp_path / "proj"
    bad.mkdir()
    (bad / "broken.mini").write_text("namespace { oops")
    with pytest.raises(ParseFailed) as info:
        open_project(str(bad))
    diags = info.value.diagnostics
    assert diags and diags[0]["file"].endswith("broken.mini")
    assert diags[0]["line"] >= 1


def test_open_project_missing_dir(tmp_path):
    with pytest.raises(ParseFailed):
        open_project(str(tmp_path / "nope"))


def test_store_unknown_lookups():
    store = SessionStore()
    with pytest.raises(UnknownSession):
        store.session("p99")
    with pytest.raises(UnknownToolId):
        store.tool("tool-1")
    with pytest.raises(UnknownToolId):
        store.tool_lock("tool-1")


# --- HTTP: projects and facts --------------------------------------------------


def test_http_open_project(client):
    r = client.post("/api/projects", json={"path": BUGGY})
    assert r.status_code == 200
    body = r.json()
    assert body["projectId"] == "p1"
    assert body["diagnostics"] == []


def test_http_open_project_parse_failure(client, tmp_path):
    bad = tmp_path / "proj"
    bad.mkdir()
    (bad / "broken.mini").write_text("class Outside {}")
    r = client.post("/api/projects", json={"path": str(bad)})
    assert r.status_code == 422
    body = r.json()
    assert body["error"] == "ParseFailed"
    assert isinstance(body["diagnostics"], list) and body["diagnostics"]


def test_http_roots_and_children(client, project):
    r = client.get(f"/api/projects/{project}/slice/roots")
    assert r.status_code == 200
    assert [e["id"] for e in r.json()["elements"]] == ["buggy"]

    r = client.get(f"/api/projects/{project}/elements/buggy/children")
    assert r.status_code == 200
    body = r.json()
    assert [e["id"] for e in body["elements"]] == [
        "Configurations", "Storage", "Validation"]
    assert all(l["kind"] == "contains" for l in body["links"])
    assert all(l["source"] == "buggy" for l in body["links"])


def test_http_unknown_ids_are_404(client, project):
    assert client.get("/api/projects/p99/slice/roots").status_code == 404
    r = client.get(f"/api/projects/{project}/elements/Ghost/children")
    assert r.status_code == 404
    assert client.post("/api/tools/nope/actions",
                       json={"actionId": "x"}).status_code == 404
    assert client.get("/api/tools/nope/export",
                      params={"format": "json"}).status_code == 404


def test_http_source_range(client, project):
    r = client.get(f"/api/projects/{project}/source",
                   params={"file": "configurations.mini", "from": 4, "to": 5})
    assert r.status_code == 200
    body = r.json()
    assert body["from"] == 4 and body["to"] == 5
    assert len(body["lines"]) == 2
    assert "@endpoint" in body["lines"][0]
    assert "CreateConfiguration" in body["lines"][1]


def test_http_source_guards(client, project):
    r = client.get(f"/api/projects/{project}/source",
                   params={"file": "../../../etc/passwd", "from": 1, "to": 1})
    assert r.status_code == 400
    r = client.get(f"/api/projects/{project}/source",
                   params={"file": "ghost.mini", "from": 1, "to": 1})
    assert r.status_code == 404
    r = client.get(f"/api/projects/{project}/source",
                   params={"file": "configurations.mini", "from": 5, "to": 4})
    assert r.status_code == 400


def test_http_reads_are_byte_stable(client, project):
    url = f"/api/projects/{project}/elements/buggy/children"
    assert client.get(url).content == client.get(url).content


# --- HTTP: tools and actions ---------------------------------------------------


def test_http_catalog_script(client, project):
    body = make_tool(client, project, tool="apiEndpointCatalog")
    assert body["kind"] == "apiEndpointCatalog"
    model = body["model"]
    assert model["kind"] == "tree"
    assert [i["label"] for i in model["items"]] == ["POST /configurations"]


def test_http_navigate_action(client, project):
    body = make_tool(client, project, tool="apiEndpointCatalog")
    action_id = body["model"]["items"][0]["action"]["id"]
    r = client.post(f"/api/tools/{body['toolId']}/actions",
                    json={"actionId": action_id})
    assert r.status_code == 200
    assert r.json()["navigate"] == {"file": "configurations.mini", "line": 4}


def test_http_expand_action_and_staleness(client, project):
    body = make_tool(client, project, tool="callGraphExplorer",
                     roots=[CREATE], preExpand=[])
    tid = body["toolId"]
    model = body["model"]
    assert len(model["nodes"]) == 1
    action_id = model["pendingActions"][CREATE]["id"]

    r = client.post(f"/api/tools/{tid}/actions", json={"actionId": action_id})
    assert r.status_code == 200
    after = r.json()["model"]
    assert len(after["nodes"]) == 3
    assert len(after["edges"]) == 2

    # the consumed action no longer belongs to the current model
    r = client.post(f"/api/tools/{tid}/actions", json={"actionId": action_id})
    assert r.status_code == 409
    assert r.json()["error"] == "StaleAction"


def test_http_script_errors(client, project):
    r = client.post("/api/tools",
                    json={"projectId": project, "script": "not json"})
    assert r.status_code == 400 and r.json()["error"] == "ScriptSyntaxError"

    r = client.post("/api/tools",
                    json={"projectId": project, "script": {"tool": "teapot"}})
    assert r.status_code == 400 and r.json()["error"] == "UnknownTool"

    r = client.post("/api/tools", json={
        "projectId": project,
        "script": {"tool": "callGraphExplorer", "roots": ["No.Such.Method"]}})
    assert r.status_code == 400 and r.json()["error"] == "ParamValidation"

    r = client.post("/api/tools", json={
        "projectId": "p42", "script": {"tool": "apiEndpointCatalog"}})
    assert r.status_code == 404


def test_http_reachability_script(client, project):
    body = make_tool(
        client, project,
        tool="reachabilityInspector",
        method=CREATE,
        target=f"call:{TWIN}",
        constraints=[f'name !~ "{SPEC_RE}"'],
    )
    labels = [i["label"] for i in body["model"]["items"]]
    assert labels[0] == "status: Reachable"
    witness = body["model"]["items"][1]
    assert [c["label"] for c in witness["children"]] == ['name = "-"', 'payload = ""']


def test_http_export_json_and_dot(client, project):
    body = make_tool(client, project, tool="callGraphExplorer", roots=[CREATE])
    tid = body["toolId"]

    a = client.get(f"/api/tools/{tid}/export", params={"format": "json"})
    b = client.get(f"/api/tools/{tid}/export", params={"format": "json"})
    assert a.status_code == 200
    assert a.json() == body["model"]
    assert a.content == b.content

    dot = client.get(f"/api/tools/{tid}/export", params={"format": "dot"})
    assert dot.status_code == 200
    assert dot.headers["content-type"].startswith("text/plain")
    assert dot.text.splitlines()[0] == "digraph tool {"
    assert dot.text.count("->") == 2

    bad = client.get(f"/api/tools/{tid}/export", params={"format": "svg"})
    assert bad.status_code == 400
    assert bad.json()["error"] == "UnsupportedFormat"


def test_http_tree_export_has_no_dot_form(client, project):
    body = make_tool(client, project, tool="structureBrowser")
    r = client.get(f"/api/tools/{body['toolId']}/export",
                   params={"format": "dot"})
    assert r.status_code == 400
    assert r.json()["error"] == "UnsupportedFormat"


def test_http_session_isolation(client):
    pa = client.post("/api/projects", json={"path": BUGGY}).json()["projectId"]
    pb = client.post("/api/projects", json={"path": BUGGY}).json()["projectId"]
    ta = make_tool(client, pa, tool="callGraphExplorer",
                   roots=[CREATE], preExpand=[])
    tb = make_tool(client, pb, tool="callGraphExplorer",
                   roots=[CREATE], preExpand=[])
    before = client.get(f"/api/tools/{tb['toolId']}/export",
                        params={"format": "json"}).content

    action_id = ta["model"]["pendingActions"][CREATE]["id"]
    r = client.post(f"/api/tools/{ta['toolId']}/actions",
                    json={"actionId": action_id})
    assert r.status_code == 200

    after = client.get(f"/api/tools/{tb['toolId']}/export",
                       params={"format": "json"}).content
    assert before == after


def test_http_cors_header_when_configured():
    app = TestClient(create_app(ServerConfig(cors_allow=("http://ui.local",))))
    r = app.post("/api/projects", json={"path": BUGGY},
                 headers={"Origin": "http://ui.local"})
    assert r.headers.get("access-control-allow-origin") == "http://ui.local"


# --- CLI -----------------------------------------------------------------------


def run_cli(*args):
    return CliRunner().invoke(main, list(args))


def test_cli_parse_prints_tree():
    r = run_cli("parse", BUGGY)
    assert r.exit_code == 0, r.output
    doc = json.loads(r.output)
    assert doc["project"] == "buggy"
    assert doc["diagnostics"] == []
    names = [c["name"] for c in doc["tree"][0]["children"]]
    assert names == ["Configurations", "Storage", "Validation"]
    methods = doc["tree"][0]["children"][0]["children"][0]["children"]
    assert methods[0]["file"] == "configurations.mini"
    assert methods[0]["line"] == 4


def test_cli_parse_failure(tmp_path):
    bad = tmp_path / "proj"
    bad.mkdir()
    (bad / "x.mini").write_text("fn orphan() {}")
    r = run_cli("parse", str(bad))
    assert r.exit_code == 1
    doc = json.loads(r.output)
    assert doc["error"] == "ParseFailed"
    assert doc["diagnostics"]


def test_cli_endpoints():
    r = run_cli("endpoints", BUGGY)
    assert r.exit_code == 0, r.output
    doc = json.loads(r.output)
    assert doc["kind"] == "tree"
    assert doc["items"][0]["label"] == "POST /configurations"
    assert doc["items"][0]["elementId"] == CREATE


def test_cli_callgraph_json():
    r = run_cli("callgraph", BUGGY, "--entry", CREATE)
    assert r.exit_code == 0, r.output
    doc = json.loads(r.output)
    assert sorted(doc["nodes"]) == sorted([CREATE, VALID, TWIN])
    assert len(doc["edges"]) == 2
    assert doc["roots"] == [CREATE]


def test_cli_callgraph_emphasis():
    r = run_cli("callgraph", BUGGY, "--entry", CREATE, "--emphasize-param", "0")
    doc = json.loads(r.output)
    assert sorted(doc["emphasized"]) == sorted([CREATE, VALID, TWIN])


def test_cli_callgraph_dot():
    r = run_cli("callgraph", BUGGY, "--entry", CREATE, "--format", "dot")
    assert r.exit_code == 0
    assert r.output.splitlines()[0] == "digraph callgraph {"
    assert r.output.count("->") == 2


def test_cli_callgraph_errors():
    assert run_cli("callgraph", BUGGY, "--entry", "No.Such.Method").exit_code == 1
    r = run_cli("callgraph", BUGGY, "--entry", CREATE, "--emphasize-param", "7")
    assert r.exit_code == 1
    assert "arity" in r.output


def test_cli_reach_buggy_corpus():
    r = run_cli("reach", BUGGY, "--method", CREATE,
                "--target", f"call:{TWIN}",
                "--constraint", f'name !~ "{SPEC_RE}"')
    assert r.exit_code == 0, r.output
    doc = json.loads(r.output)
    assert doc["status"] == "Reachable"
    assert doc["models"][0] == {"name": "-", "payload": ""}


def test_cli_reach_fixed_corpus():
    r = run_cli("reach", FIXED, "--method", CREATE,
                "--target", f"call:{TWIN}",
                "--constraint", f'name !~ "{SPEC_RE}"')
    doc = json.loads(r.output)
    assert doc["status"] == "ProvenUnreachable"
    assert doc["models"] == []


def test_cli_reach_return_constraint():
    r = run_cli("reach", BUGGY, "--method", VALID,
                "--target", "stmt:s1",
                "--return-constraint", "ret == true")
    assert r.exit_code == 0, r.output
    doc = json.loads(r.output)
    assert doc["status"] == "Reachable"
    assert doc["models"]  # some accepted name exists


def test_cli_reach_bounds_flags():
    r = run_cli("reach", BUGGY, "--method", CREATE,
                "--target", f"call:{TWIN}",
                "--constraint", f'name !~ "{SPEC_RE}"',
                "--max-paths", "1")
    doc = json.loads(r.output)
    assert doc["truncated"] is True


def test_cli_reach_errors():
    r = run_cli("reach", BUGGY, "--method", "No.Such.Method",
                "--target", f"call:{TWIN}")
    assert r.exit_code == 1
    r = run_cli("reach", BUGGY, "--method", CREATE,
                "--target", f"call:{TWIN}", "--constraint", "name <>")
    assert r.exit_code == 1
    r = run_cli("reach", BUGGY, "--method", CREATE, "--target", "warp:s1")
    assert r.exit_code == 1


def test_cli_serve_rejects_bad_config(tmp_path):
    cfg = tmp_path / "server.cfg"
    cfg.write_text("port=not-a-number\n")
    r = run_cli("serve", "--config", str(cfg))
    assert r.exit_code == 1
    assert "integer" in r.output
