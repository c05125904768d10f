"""Dataflow solver, reaching/liveness, dependency closure, call graphs,
interprocedural taint.

Oracles used here:
  - naive round-robin fixpoint iteration (vs the worklist solver)
  - an inline-and-taint walker over the syntax tree (vs the summary-based
    interprocedural pass); context-sensitive where the analysis is not,
    so the analysis result must be a superset
  - a two-run concrete differential: execute twice with one argument
    varied and diff every statement's observed values per method
"""

from __future__ import annotations

import random
from collections import Counter

import pytest

from generators import random_args, random_cfg, random_program
from oracles import (
    InlineTaint,
    liveness_problem,
    perturb,
    reaching_problem,
    round_robin,
    sensitive_methods,
)
from pcw.analysis import (
    AnalysisBudgetExceeded,
    BadParamIndex,
    DataflowProblem,
    UnknownMethod,
    UnknownSeed,
    build_call_graph,
    callgraph_to_dot,
    callgraph_to_json,
    dependency_closure,
    interprocedural_dependency,
    liveness,
    method_summary,
    reaching_definitions,
    solve_dataflow,
)
from pcw.minilang import (
    Assign,
    BasicBlock,
    Branch,
    CallAssign,
    Cfg,
    IntConst,
    Jump,
    Matches,
    MiniProvider,
    Return,
    UnresolvedCall,
    SyntaxForest,
    Var,
    build_method_table,
    corpus_path,
    parse_project,
    parse_source,
)
from pcw.minilang import Binary as BinaryIr  # the IR node; BinaryExpr is the AST one
from pcw.minilang.syntax import (
    AssignStmt,
    BinaryExpr,
    CallExpr,
    CallStmt,
    IfStmt,
    LenExpr,
    LetStmt,
    MatchesExpr,
    NameExpr,
    ReturnStmt,
    Span,
    UnaryExpr,
    WhileStmt,
)

BUGGY = parse_project(corpus_path("buggy"))

CREATE = "Configurations.ConfigurationController.CreateConfiguration"
VALID = "Validation.Validator.IsConfigurationNameValid"
TWIN = "Storage.Twin.CreateDeviceTwinConfiguration"
NORMALIZE = "Validation.Validator.NormalizeRetryCount"


def provider() -> MiniProvider:
    return MiniProvider(BUGGY)


def lower(qname: str):
    return provider().lower_to_cfg(qname)


def forest_of(text: str):
    tree, diags = parse_source(text)
    assert not diags, diags
    return SyntaxForest("t", [tree])


def lower_source(text: str, qname: str):
    return MiniProvider(forest_of(text)).lower_to_cfg(qname)


class TestSolver:
    def test_one_block_reaching(self):
        block = BasicBlock(
            "b0",
            (Assign("s0", "a", IntConst(1)), Assign("s1", "a", IntConst(2))),
            Return("s2", Var("a")),
        )
        cfg = Cfg("T.T.m", (), "int", "b0", {"b0": block})
        reach = reaching_definitions(cfg)
        assert reach.result.out_values["b0"] == frozenset({("a", "s1")})
        assert reach.at_statement("s2") == frozenset({("a", "s1")})
        with pytest.raises(KeyError):
            reach.at_statement("s99")

    def test_if_else_join(self):
        text = (
            "namespace N { class C { fn M(p: int) -> int {\n"
            "  let a = 0;\n"
            "  if (p < 0) { a = 1; } else { a = 2; }\n"
            "  return a;\n"
            "} } }"
        )
        cfg = lower_source(text, "N.C.M")
        reach = reaching_definitions(cfg)
        ret = next(
            s for _, s in cfg.all_statements() if isinstance(s, Return) and s.value
        )
        defs_of_a = {d for v, d in reach.at_statement(ret.sid) if v == "a"}
        arms = {
            s.sid
            for _, s in cfg.all_statements()
            if isinstance(s, Assign) and s.target == "a" and s.expr != IntConst(0)
        }
        assert len(arms) == 2
        assert defs_of_a == arms  # both branch defs reach; the let is killed

    def test_corpus_vs_round_robin(self):
        for qname in (CREATE, VALID, TWIN, NORMALIZE):
            cfg = lower(qname)
            for problem in (reaching_problem(cfg), liveness_problem(cfg)):
                got = solve_dataflow(cfg, problem)
                want_in, want_out = round_robin(cfg, problem)
                assert got.in_values == want_in
                assert got.out_values == want_out

    def test_random_cfgs_vs_round_robin(self):
        rng = random.Random(1405)
        for _ in range(60):
            cfg = random_cfg(rng)
            for problem in (reaching_problem(cfg), liveness_problem(cfg)):
                got = solve_dataflow(cfg, problem)
                want_in, want_out = round_robin(cfg, problem)
                assert got.in_values == want_in
                assert got.out_values == want_out

    def test_reaching_matches_local_rebuild(self):
        rng = random.Random(77)
        for _ in range(25):
            cfg = random_cfg(rng)
            theirs = reaching_definitions(cfg).result
            mine = solve_dataflow(cfg, reaching_problem(cfg))
            assert theirs.in_values == mine.in_values
            assert theirs.out_values == mine.out_values

    def test_diamond_liveness(self):
        blocks = {
            "b0": BasicBlock(
                "b0", (), Branch("s0", BinaryIr("<", Var("p"), IntConst(0)), "b1", "b2")
            ),
            "b1": BasicBlock(
                "b1",
                (Assign("s1", "a", BinaryIr("+", Var("x"), IntConst(1))),),
                Jump("s2", "b3"),
            ),
            "b2": BasicBlock("b2", (Assign("s3", "a", Var("y")),), Jump("s4", "b3")),
            "b3": BasicBlock("b3", (), Return("s5", Var("a"))),
        }
        cfg = Cfg("T.T.m", (("p", "int"),), "int", "b0", blocks)
        live = liveness(cfg)
        assert live.in_values["b0"] == frozenset({"p", "x", "y"})
        assert live.in_values["b3"] == frozenset({"a"})

    def test_fixpoint_invariant_holds(self):
        rng = random.Random(9)
        for _ in range(20):
            cfg = random_cfg(rng)
            problem = reaching_problem(cfg)
            res = solve_dataflow(cfg, problem)
            succs = {b: cfg.successors(b) for b in cfg.blocks}
            for b in cfg.blocks:
                assert res.out_values[b] == problem.transfer(cfg.blocks[b], res.in_values[b])
                acc = problem.bottom
                for src in (s for s in cfg.blocks if b in succs[s]):
                    acc = problem.join(acc, res.out_values[src])
                assert res.in_values[b] == acc

    def test_shuffled_worklists_agree(self):
        rng = random.Random(31)
        cfgs = [lower(CREATE)] + [random_cfg(rng) for _ in range(8)]
        for cfg in cfgs:
            for problem in (reaching_problem(cfg), liveness_problem(cfg)):
                base = solve_dataflow(cfg, problem)
                for _ in range(10):
                    order = list(cfg.blocks)
                    rng.shuffle(order)
                    again = solve_dataflow(cfg, problem, order=order)
                    assert again.in_values == base.in_values
                    assert again.out_values == base.out_values

    def test_budget_guard(self):
        blocks = {
            "b0": BasicBlock("b0", (), Jump("s0", "b1")),
            "b1": BasicBlock("b1", (), Jump("s1", "b0")),
        }
        cfg = Cfg("T.T.loop", (), None, "b0", blocks)
        runaway = DataflowProblem(
            "forward", 0, max, lambda block, v: v + 1, lambda a, b: a == b
        )
        with pytest.raises(AnalysisBudgetExceeded):
            solve_dataflow(cfg, runaway, budget=50)

    def test_bad_direction(self):
        cfg = lower(VALID)
        bad = DataflowProblem("sideways", 0, max, lambda b, v: v, lambda a, b: a == b)
        with pytest.raises(ValueError):
            solve_dataflow(cfg, bad)

    def test_join_laws_and_transfer_monotonicity(self):
        rng = random.Random(5150)
        pairs = [(v, f"s{i}") for i, v in enumerate("abcxyz")]

        def subset():
            return frozenset(p for p in pairs if rng.random() < 0.5)

        join = lambda a, b: a | b
        for _ in range(50):
            a, b, c = subset(), subset(), subset()
            assert join(a, b) == join(b, a)
            assert join(a, join(b, c)) == join(join(a, b), c)
            assert join(a, a) == a
            assert join(a, frozenset()) == a
        for _ in range(15):
            cfg = random_cfg(rng)
            problem = reaching_problem(cfg)
            block = cfg.blocks[rng.choice(list(cfg.blocks))]
            small = subset()
            big = small | subset()
            assert problem.transfer(block, small) <= problem.transfer(block, big)


class TestReaching:
    def test_param_pseudo_def_reaches_matches(self):
        cfg = lower(VALID)
        stmt = next(
            s
            for _, s in cfg.all_statements()
            if isinstance(s, Assign) and isinstance(s.expr, Matches)
        )
        assert ("name", "param:0") in reaching_definitions(cfg).at_statement(stmt.sid)

    def test_uninit_pseudo_def(self):
        text = (
            "namespace N { class C { fn M(p: int) -> int {\n"
            "  let a = 0;\n"
            "  if (p < 0) { a = 1; }\n"
            "  return a;\n"
            "} } }"
        )
        cfg = lower_source(text, "N.C.M")
        reach = reaching_definitions(cfg)
        ret = next(s for _, s in cfg.all_statements() if isinstance(s, Return))
        live = reach.at_statement(ret.sid)
        # the let runs on every path, so no uninitialized def survives to the return
        assert not {d for v, d in live if d.startswith("uninit:") and v == "a"}
        assert ("a", "uninit:a") in reach.at_statement(cfg.blocks[cfg.entry].statements[0].sid)


class TestDependencyClosure:
    def test_simple_chain(self):
        text = (
            "namespace N { class C { fn M(p: int) -> int {\n"
            "  let a = p;\n"
            "  let b = a + 1;\n"
            "  let c = 7;\n"
            "  return b;\n"
            "} } }"
        )
        cfg = lower_source(text, "N.C.M")
        sid_of = {
            s.target: s.sid for _, s in cfg.all_statements() if isinstance(s, Assign)
        }
        ret = next(s for _, s in cfg.all_statements() if isinstance(s, Return))
        for seed in (0, "p"):
            got = dependency_closure(cfg, seed)
            assert sid_of["a"] in got
            assert sid_of["b"] in got
            assert ret.sid in got
            assert sid_of["c"] not in got

    def test_corpus_create_configuration(self):
        cfg = lower(CREATE)
        sites = {s.callee: s.sid for s in cfg.call_sites()}
        got = dependency_closure(cfg, "name")
        assert sites[VALID] in got
        assert sites[TWIN] in got

    def test_seed_errors(self):
        cfg = lower(VALID)
        with pytest.raises(UnknownSeed):
            dependency_closure(cfg, "nope")
        with pytest.raises(UnknownSeed):
            dependency_closure(cfg, 3)

    def test_local_variable_seed(self):
        cfg = lower(NORMALIZE)
        got = dependency_closure(cfg, "result")
        ret = next(s for _, s in cfg.all_statements() if isinstance(s, Return))
        assert ret.sid in got


class TestMethodSummary:
    def test_validator(self):
        summary = method_summary(lower(VALID))
        assert summary.param_to_return == frozenset({0})
        assert summary.param_to_call_arg == frozenset()

    def test_create_configuration(self):
        cfg = lower(CREATE)
        sites = {s.callee: s.sid for s in cfg.call_sites()}
        summary = method_summary(cfg)
        assert (0, sites[VALID], 0) in summary.param_to_call_arg
        assert (0, sites[TWIN], 0) in summary.param_to_call_arg
        assert summary.param_to_call_arg == frozenset(
            {(0, sites[VALID], 0), (0, sites[TWIN], 0), (1, sites[TWIN], 1)}
        )
        # call results are opaque at this level, so both params may flow out
        assert summary.param_to_return == frozenset({0, 1})

    def test_ignored_param(self):
        text = "namespace N { class C { fn M(p: int) -> int { return 7; } } }"
        summary = method_summary(lower_source(text, "N.C.M"))
        assert summary.param_to_return == frozenset()
        assert summary.param_to_call_arg == frozenset()

    def test_indices_within_bounds_random(self):
        rng = random.Random(616)
        for _ in range(20):
            prov = MiniProvider(forest_of(random_program(rng)))
            for qname in prov.methods():
                cfg = prov.lower_to_cfg(qname)
                arity = len(cfg.params)
                summary = method_summary(cfg)
                assert all(0 <= i < arity for i in summary.param_to_return)
                for i, site, j in summary.param_to_call_arg:
                    assert 0 <= i < arity
                    call = cfg.statement(site)
                    assert 0 <= j < len(call.args)


class TestCallGraph:
    def test_corpus_from_create(self):
        cg = build_call_graph(provider(), [CREATE])
        assert set(cg.nodes) == {CREATE, VALID, TWIN}
        assert len(cg.edges) == 2
        assert {(e.caller, e.callee) for e in cg.edges} == {
            (CREATE, VALID),
            (CREATE, TWIN),
        }
        assert cg.roots == (CREATE,)
        create_sites = [s.sid for s in lower(CREATE).call_sites()]
        assert sorted(e.site for e in cg.edges) == sorted(create_sites)

    def test_leaf_entry(self):
        cg = build_call_graph(provider(), [VALID])
        assert cg.nodes == (VALID,)
        assert cg.edges == ()

    def test_empty_entries(self):
        cg = build_call_graph(provider(), [])
        assert cg.nodes == () and cg.edges == () and cg.roots == ()

    def test_unknown_entry(self):
        from pcw.slices import UnknownElement

        with pytest.raises(UnknownElement):
            build_call_graph(provider(), ["No.Such.Method"])

    def test_lazy_lowering(self):
        prov = provider()
        build_call_graph(prov, [VALID])
        assert dict(prov.lowering.lower_counts) == {VALID: 1}
        build_call_graph(prov, [CREATE])
        assert NORMALIZE not in prov.lowering.lower_counts
        assert prov.lowering.lower_counts[CREATE] == 1

    def test_unresolved_call_reports_span(self):
        site = CallAssign(
            "s0", "x", "No.Such.Thing", (), span=Span("f.mini", 3, 5, 3, 20)
        )
        cfg = Cfg(
            "T.T.m",
            (),
            None,
            "b0",
            {"b0": BasicBlock("b0", (site,), Return("s1", None))},
        )

        class Shim:
            def find_method(self, qname):
                return object()

            def lower_to_cfg(self, qname):
                return cfg

            def resolve_call_target(self, call_site):
                raise UnresolvedCall(call_site.callee)

        with pytest.raises(UnresolvedCall) as err:
            build_call_graph(Shim(), ["T.T.m"])
        assert "f.mini:3:5" in str(err.value)

    def test_completeness_vs_ast_scan(self):
        rng = random.Random(4242)
        programs = [(BUGGY, CREATE)]
        for _ in range(25):
            programs.append((forest_of(random_program(rng)), "Gen.G.M0"))
        for forest, entry in programs:
            prov = MiniProvider(forest)
            cg = build_call_graph(prov, [entry])
            table = build_method_table(forest)
            want_nodes, want_edges = _ast_reachable(table, entry)
            assert set(cg.nodes) == want_nodes
            got_edges = Counter((e.caller, e.callee) for e in cg.edges)
            assert got_edges == want_edges

    def test_dot_and_json(self):
        cg = build_call_graph(provider(), [CREATE])
        dot = callgraph_to_dot(cg, emphasized={VALID})
        assert f'"{VALID}" [penwidth=3];' in dot
        assert f'"{CREATE}";' in dot
        assert f'"{CREATE}" -> "{VALID}";' in dot
        doc = callgraph_to_json(cg, emphasized={VALID})
        assert doc["nodes"] == list(cg.nodes)
        assert doc["roots"] == [CREATE]
        assert doc["emphasized"] == [VALID]
        assert {e["callee"] for e in doc["edges"]} == {VALID, TWIN}
        assert all({"caller", "site", "callee"} == set(e) for e in doc["edges"])
        plain = callgraph_to_json(cg)
        assert "emphasized" not in plain


def _ast_calls(method_decl) -> list:
    out: list = []

    def walk_expr(e):
        if isinstance(e, CallExpr):
            for a in e.args:
                walk_expr(a)
            out.append(e.callee)
        elif isinstance(e, (UnaryExpr, LenExpr, MatchesExpr)):
            walk_expr(e.operand)
        elif isinstance(e, BinaryExpr):
            walk_expr(e.left)
            walk_expr(e.right)

    def walk_stmt(s):
        if isinstance(s, (LetStmt, AssignStmt)):
            walk_expr(s.expr)
        elif isinstance(s, IfStmt):
            walk_expr(s.cond)
            walk_block(s.then)
            if s.els is not None:
                walk_block(s.els)
        elif isinstance(s, WhileStmt):
            walk_expr(s.cond)
            walk_block(s.body)
        elif isinstance(s, ReturnStmt):
            if s.expr is not None:
                walk_expr(s.expr)
        elif isinstance(s, CallStmt):
            walk_expr(s.call)

    def walk_block(b):
        for s in b.stmts:
            walk_stmt(s)

    walk_block(method_decl.body)
    return out


def _ast_reachable(table: dict, entry: str):
    """Brute-force closure: nodes reachable from entry, edge multiset."""
    nodes = set()
    edges: Counter = Counter()
    frontier = [entry]
    while frontier:
        qname = frontier.pop()
        if qname in nodes:
            continue
        nodes.add(qname)
        for callee in _ast_calls(table[qname]):
            edges[(qname, callee)] += 1
            frontier.append(callee)
    return nodes, edges


class TestInterprocedural:
    def test_corpus_all_three(self):
        cg = build_call_graph(provider(), [CREATE])
        got = interprocedural_dependency(cg, CREATE, 0)
        assert got == {CREATE, VALID, TWIN}
        oracle = InlineTaint(build_method_table(BUGGY)).run(CREATE, 0)
        assert got == oracle

    def test_payload_param(self):
        cg = build_call_graph(provider(), [CREATE])
        got = interprocedural_dependency(cg, CREATE, 1)
        assert got == {CREATE, TWIN}

    def test_unused_param_yields_entry_only(self):
        text = (
            "namespace Gen { class G {\n"
            "  fn M0(p: int, u: int) -> int { let x = p + 1; return Gen.G.M1(x); }\n"
            "  fn M1(y: int) -> int { return y; }\n"
            "} }"
        )
        forest = forest_of(text)
        prov = MiniProvider(forest)
        cg = build_call_graph(prov, ["Gen.G.M0"])
        assert interprocedural_dependency(cg, "Gen.G.M0", 1) == {"Gen.G.M0"}
        assert interprocedural_dependency(cg, "Gen.G.M0", 0) == {
            "Gen.G.M0",
            "Gen.G.M1",
        }

    def test_summary_refinement_blocks_untainted_result(self):
        text = (
            "namespace Gen { class G {\n"
            "  fn M0(p: int) -> int {\n"
            "    let r = Gen.G.M1(p);\n"
            "    let z = r + 1;\n"
            "    let w = Gen.G.M2(z);\n"
            "    return w;\n"
            "  }\n"
            "  fn M1(x: int) -> int { return 0; }\n"
            "  fn M2(y: int) -> int { return y; }\n"
            "} }"
        )
        forest = forest_of(text)
        prov = MiniProvider(forest)
        cg = build_call_graph(prov, ["Gen.G.M0"])
        got = interprocedural_dependency(cg, "Gen.G.M0", 0)
        assert got == {"Gen.G.M0", "Gen.G.M1"}
        oracle = InlineTaint(build_method_table(forest)).run("Gen.G.M0", 0)
        assert got == oracle

    def test_errors(self):
        cg = build_call_graph(provider(), [CREATE])
        with pytest.raises(UnknownMethod):
            interprocedural_dependency(cg, VALID, 0)
        with pytest.raises(BadParamIndex):
            interprocedural_dependency(cg, CREATE, 5)
        with pytest.raises(BadParamIndex):
            interprocedural_dependency(cg, CREATE, -1)

    def test_taint_soundness_random_programs(self):
        """Analysis result must cover the inline-taint oracle, and any
        concretely value-sensitive method it misses must be sensitive
        through control flow only (no data route), which is out of scope
        by design."""
        rng = random.Random(2718)
        for _ in range(60):
            source = random_program(rng)
            forest = forest_of(source)
            table = build_method_table(forest)
            prov = MiniProvider(forest)
            entry = "Gen.G.M0"
            arity = len(table[entry].params)
            index = rng.randrange(arity)
            cg = build_call_graph(prov, [entry])
            got = interprocedural_dependency(cg, entry, index)
            oracle = InlineTaint(table).run(entry, index)
            assert got >= oracle, source
            assert entry in got
            for _ in range(3):
                base = random_args(rng, table[entry])
                variant = list(base)
                variant[index] = perturb(rng, base[index])
                for name in sensitive_methods(table, entry, base, variant) - got:
                    assert name not in oracle, source
