"""Immutable elements, links, and slice values."""

from __future__ import annotations

from dataclasses import dataclass, field

from .schema import Schema


def _freeze_attrs(attrs: dict) -> tuple:
    return tuple(sorted(attrs.items()))


@dataclass(frozen=True)
class Element:
    id: str
    kind: str
    attrs: tuple = ()

    @property
    def attributes(self) -> dict:
        return dict(self.attrs)

    def attr(self, name: str, default=None):
        for key, value in self.attrs:
            if key == name:
                return value
        return default


@dataclass(frozen=True)
class Link:
    id: str
    kind: str
    source: str
    target: str
    attrs: tuple = ()

    @property
    def attributes(self) -> dict:
        return dict(self.attrs)

    def attr(self, name: str, default=None):
        for key, value in self.attrs:
            if key == name:
                return value
        return default


def element(id: str, kind: str, **attrs) -> Element:
    return Element(id, kind, _freeze_attrs(attrs))


def link(id: str, kind: str, source: str, target: str, **attrs) -> Link:
    return Link(id, kind, source, target, _freeze_attrs(attrs))


@dataclass(frozen=True)
class Slice:
    """An immutable fact-graph value.

    Invariants: every link's endpoints are member elements, and every
    member's `contains`-ancestors are members.  Operations that grow a
    slice return a new value; the provider handle is carried along so
    later inclusions can fetch facts, but it does not take part in
    equality.
    """

    schema: Schema
    elements: frozenset
    links: frozenset
    link_kinds: tuple
    provider: object = field(default=None, compare=False, repr=False)

    def element_ids(self) -> frozenset:
        return frozenset(e.id for e in self.elements)

    def has_element(self, element_id: str) -> bool:
        return any(e.id == element_id for e in self.elements)


def query_elements(slice_: Slice, kind: str | None = None, predicate=None) -> list:
    """Member elements matching the filters, ordered by id."""
    out = [
        e
        for e in slice_.elements
        if (kind is None or e.kind == kind) and (predicate is None or predicate(e))
    ]
    out.sort(key=lambda e: e.id)
    return out


def query_links(
    slice_: Slice,
    kind: str | None = None,
    source: str | None = None,
    target: str | None = None,
) -> list:
    """Member links matching the filters, in a stable order."""
    out = [
        l
        for l in slice_.links
        if (kind is None or l.kind == kind)
        and (source is None or l.source == source)
        and (target is None or l.target == target)
    ]
    out.sort(key=lambda l: (l.kind, l.source, l.target, l.id))
    return out
