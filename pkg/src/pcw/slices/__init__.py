"""Attributed multigraph fact model: schemas, providers, and slices."""

from .export import slice_to_dot, slice_to_json
from .model import Element, Link, Slice, element, link, query_elements, query_links
from .provider import (
    FactIndex,
    FactProvider,
    InMemoryProvider,
    ProviderFailure,
    UnknownElement,
    build_slice,
    children,
    include_element,
)
from .schema import (
    CONTAINS,
    DuplicateKind,
    ElementKind,
    LinkKind,
    Schema,
    SchemaViolation,
    SliceError,
    define_schema,
)

__all__ = [
    "CONTAINS",
    "DuplicateKind",
    "Element",
    "ElementKind",
    "FactIndex",
    "FactProvider",
    "InMemoryProvider",
    "Link",
    "LinkKind",
    "ProviderFailure",
    "Schema",
    "SchemaViolation",
    "Slice",
    "SliceError",
    "UnknownElement",
    "build_slice",
    "children",
    "define_schema",
    "element",
    "include_element",
    "link",
    "query_elements",
    "query_links",
    "slice_to_dot",
    "slice_to_json",
]
