"""Command-line front end.

Every result a tool window can show is reachable here too: `parse`
prints the containment tree, `endpoints` the catalog, `callgraph` the
explorer's graph, `reach` the full reachability report. All output is
JSON on stdout (DOT for `callgraph --format dot`), errors go to stderr
with exit code 1.
"""

from __future__ import annotations

import json
import sys

import click

from ..analysis import (
    BadParamIndex,
    UnknownMethod,
    build_call_graph,
    callgraph_to_dot,
    callgraph_to_json,
    interprocedural_dependency,
)
from ..symexec import (
    Bounds,
    ConstraintScopeError,
    SortError,
    UnknownTarget,
    analyze_reachability,
    report_to_json,
)
from ..slices import UnknownElement
from ..tools import ParamValidation, catalog_entry_points, model_to_json, parse_constraint, parse_target
from .config import ConfigError, ServerConfig, load_config
from .sessions import ParseFailed, open_project


def _session(project_dir: str, config: ServerConfig = ServerConfig()):
    try:
        return open_project(project_dir, config)
    except ParseFailed as err:
        click.echo(json.dumps({"error": "ParseFailed",
                               "diagnostics": err.diagnostics}))
        sys.exit(1)


def _tree_json(provider, element) -> dict:
    doc = {"id": element.id, "kind": element.kind,
           "name": element.attr("name")}
    if element.attr("file") is not None:
        doc["file"] = element.attr("file")
        doc["line"] = element.attr("line")
    children, _links = provider.load_children(element.id)
    if children:
        doc["children"] = [_tree_json(provider, c) for c in children]
    return doc


@click.group()
def main():
    """Program comprehension workbench for MiniLang projects."""


@main.command()
@click.argument("project_dir")
def parse(project_dir):
    """Parse a project and print its containment tree."""
    session = _session(project_dir)
    roots = session.provider.load_roots()
    doc = {
        "project": roots[0].attr("name"),
        "diagnostics": [],
        "tree": [_tree_json(session.provider, r) for r in roots],
    }
    click.echo(json.dumps(doc, indent=2))


@main.command()
@click.argument("project_dir")
def endpoints(project_dir):
    """List HTTP endpoint handlers, ordered by (route, verb)."""
    session = _session(project_dir)
    instance = catalog_entry_points(session.context.project_slice())
    click.echo(json.dumps(model_to_json(instance.model), indent=2))


@main.command()
@click.argument("project_dir")
@click.option("--entry", required=True, help="Qualified name of the root method.")
@click.option("--emphasize-param", type=int, default=None,
              help="Emphasize methods depending on this parameter of the entry.")
@click.option("--format", "fmt", type=click.Choice(["json", "dot"]), default="json")
def callgraph(project_dir, entry, emphasize_param, fmt):
    """Print the call graph reachable from an entry method."""
    session = _session(project_dir)
    try:
        cg = build_call_graph(session.provider, [entry])
        emphasized = ()
        if emphasize_param is not None:
            emphasized = interprocedural_dependency(cg, entry, emphasize_param)
    except (UnknownMethod, UnknownElement, BadParamIndex) as err:
        raise click.ClickException(str(err))
    if fmt == "dot":
        click.echo(callgraph_to_dot(cg, emphasized))
    else:
        click.echo(json.dumps(
            callgraph_to_json(cg, emphasized or None), indent=2))


@main.command()
@click.argument("project_dir")
@click.option("--method", required=True, help="Qualified name of the analyzed method.")
@click.option("--target", "target_text", required=True,
              help="call:<QName> or stmt:<ID> (stmt:<QName>:<ID> for callees).")
@click.option("--constraint", "constraints", multiple=True,
              help='Parameter constraint, e.g. \'name !~ "[0-9a-z]*"\'.')
@click.option("--return-constraint", default=None,
              help="Constraint on `ret` for return-statement targets.")
@click.option("--loop-unroll", type=int, default=None)
@click.option("--max-paths", type=int, default=None)
@click.option("--inline-depth", type=int, default=None)
@click.option("--max-models", type=int, default=5)
def reach(project_dir, method, target_text, constraints, return_constraint,
          loop_unroll, max_paths, inline_depth, max_models):
    """Decide reachability of a target under parameter constraints."""
    session = _session(project_dir)
    defaults = Bounds()
    bounds = Bounds(
        loop_unroll if loop_unroll is not None else defaults.loop_unroll,
        max_paths if max_paths is not None else defaults.max_paths,
        inline_depth if inline_depth is not None else defaults.inline_depth,
    )
    try:
        parsed = tuple(parse_constraint(c) for c in constraints)
        ret = (parse_constraint(return_constraint, return_context=True)
               if return_constraint is not None else None)
        target = parse_target(target_text, method)
        report = analyze_reachability(
            session.provider, method, target,
            param_constraints=parsed, return_constraint=ret,
            bounds=bounds, max_models=max_models)
    except (ParamValidation, UnknownElement, UnknownTarget,
            ConstraintScopeError, SortError) as err:
        raise click.ClickException(str(err))
    click.echo(json.dumps(report_to_json(report), indent=2))


@main.command()
@click.option("--config", "config_path", default=None,
              help="Path to a key=value config file.")
@click.option("--host", default="127.0.0.1")
def serve(config_path, host):
    """Run the HTTP service."""
    import uvicorn

    from .api import create_app

    try:
        config = load_config(config_path) if config_path else ServerConfig()
    except ConfigError as err:
        raise click.ClickException(str(err))
    uvicorn.run(create_app(config), host=host, port=config.port)
