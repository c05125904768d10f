"""Slice serialization: JSON documents and DOT graphs."""

from __future__ import annotations

from .model import Slice, query_elements, query_links
from .schema import CONTAINS


def slice_to_json(slice_: Slice) -> dict:
    return {
        "elements": [
            {"id": e.id, "kind": e.kind, "attrs": e.attributes} for e in query_elements(slice_)
        ],
        "links": [
            {"id": l.id, "kind": l.kind, "source": l.source, "target": l.target, "attrs": l.attributes}
            for l in query_links(slice_)
        ],
    }


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def slice_to_dot(slice_: Slice, link_kind: str | None = None) -> str:
    """Render containment (dashed) and one chosen link kind (solid)."""
    lines = ["digraph slice {", "  rankdir=LR;"]
    for e in query_elements(slice_):
        label = str(e.attr("name", e.id))
        lines.append(f"  {_quote(e.id)} [label={_quote(label)}];")
    for l in query_links(slice_, kind=CONTAINS):
        lines.append(f"  {_quote(l.source)} -> {_quote(l.target)} [style=dashed];")
    if link_kind is not None and link_kind != CONTAINS:
        for l in query_links(slice_, kind=link_kind):
            lines.append(
                f"  {_quote(l.source)} -> {_quote(l.target)} [label={_quote(l.kind)}];"
            )
    lines.append("}")
    return "\n".join(lines) + "\n"
