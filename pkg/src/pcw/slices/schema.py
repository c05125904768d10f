"""Kind declarations and attribute schemas for fact graphs.

A schema fixes the vocabulary of a fact graph: which element kinds and
link kinds exist, and which typed attributes each kind may carry.  The
`contains` link kind is built in because slice closure is defined over
it; schemas never need to (and may not) redeclare it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

CONTAINS = "contains"

VALUE_TYPES = ("text", "integer", "flag")

_KIND_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_-]*$")


class SliceError(Exception):
    """Base class for fact-graph errors."""


class DuplicateKind(SliceError):
    pass


class SchemaViolation(SliceError):
    pass


@dataclass(frozen=True)
class ElementKind:
    """A node kind plus its attribute declarations as (name, value-type) pairs."""

    name: str
    attributes: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class LinkKind:
    """An edge kind plus its attribute declarations."""

    name: str
    attributes: tuple[tuple[str, str], ...] = ()


def _check_kind(kind: ElementKind | LinkKind) -> None:
    if not _KIND_NAME.match(kind.name):
        raise SchemaViolation(f"bad kind name {kind.name!r}")
    seen = set()
    for attr_name, value_type in kind.attributes:
        if not attr_name:
            raise SchemaViolation(f"kind {kind.name}: empty attribute name")
        if attr_name in seen:
            raise SchemaViolation(f"kind {kind.name}: duplicate attribute {attr_name!r}")
        seen.add(attr_name)
        if value_type not in VALUE_TYPES:
            raise SchemaViolation(
                f"kind {kind.name}: attribute {attr_name!r} has unknown value type {value_type!r}"
            )


def _value_ok(value_type: str, value: object) -> bool:
    if value_type == "flag":
        return isinstance(value, bool)
    if value_type == "integer":
        # bool is an int subclass; a flag is not an integer
        return isinstance(value, int) and not isinstance(value, bool)
    return isinstance(value, str)


@dataclass(frozen=True)
class Schema:
    element_kinds: tuple[ElementKind, ...]
    link_kinds: tuple[LinkKind, ...]

    def element_kind(self, name: str) -> ElementKind | None:
        for kind in self.element_kinds:
            if kind.name == name:
                return kind
        return None

    def link_kind(self, name: str) -> LinkKind | None:
        for kind in self.link_kinds:
            if kind.name == name:
                return kind
        return None

    def link_kind_names(self) -> tuple[str, ...]:
        return tuple(kind.name for kind in self.link_kinds)

    def _check_attrs(self, owner: str, declared: tuple[tuple[str, str], ...], attrs) -> None:
        types = dict(declared)
        for name, value in attrs:
            if name not in types:
                raise SchemaViolation(f"{owner}: undeclared attribute {name!r}")
            if not _value_ok(types[name], value):
                raise SchemaViolation(
                    f"{owner}: attribute {name!r} is not a valid {types[name]}: {value!r}"
                )

    def validate_element(self, element) -> None:
        kind = self.element_kind(element.kind)
        if kind is None:
            raise SchemaViolation(f"element {element.id}: unknown kind {element.kind!r}")
        self._check_attrs(f"element {element.id}", kind.attributes, element.attrs)

    def validate_link(self, link) -> None:
        kind = self.link_kind(link.kind)
        if kind is None:
            raise SchemaViolation(f"link {link.id}: unknown kind {link.kind!r}")
        self._check_attrs(f"link {link.id}", kind.attributes, link.attrs)


def define_schema(element_kinds=(), link_kinds=()) -> Schema:
    """Build a schema from kind declarations.

    Kinds may be given as ElementKind/LinkKind values or as bare name
    strings (shorthand for a kind with no attributes).  The `contains`
    link kind is added automatically and may not be declared.
    """
    elems = tuple(k if isinstance(k, ElementKind) else ElementKind(k) for k in element_kinds)
    links = tuple(k if isinstance(k, LinkKind) else LinkKind(k) for k in link_kinds)
    for kind in (*elems, *links):
        _check_kind(kind)
    names = set()
    for kind in (*elems, *links):
        if kind.name in names:
            raise DuplicateKind(kind.name)
        names.add(kind.name)
    if CONTAINS in names:
        raise DuplicateKind(f"link kind {CONTAINS!r} is built in")
    return Schema(elems, (*links, LinkKind(CONTAINS)))
