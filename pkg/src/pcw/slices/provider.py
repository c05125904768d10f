"""Lazy fact providers, memoization, and closure-preserving slice construction.

Extraction is demand driven: no fact is computed until an operation asks
for it, and a provider asked twice for the same facts answers the same
thing both times.  FactIndex supplies both halves generically.  It
memoizes every request to the wrapped provider and, as a side effect of
discovery, keeps a parent map so the `contains`-ancestors of any element
can be recovered without re-walking the tree.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections import Counter, deque

from .model import Element, Link, Slice
from .schema import CONTAINS, Schema, SliceError


class UnknownElement(SliceError):
    pass


class ProviderFailure(SliceError):
    """A provider raised while answering a request; carries the request."""

    def __init__(self, request: str, cause: BaseException):
        super().__init__(f"provider failed on {request}: {cause}")
        self.request = request
        self.cause = cause


class FactProvider(ABC):
    """Capability handles for demand-driven fact extraction.

    Containment links are delivered by load_children alongside the child
    elements; load_links serves the remaining link kinds, keyed by the
    source element.
    """

    @property
    @abstractmethod
    def schema(self) -> Schema: ...

    @abstractmethod
    def load_roots(self) -> tuple[Element, ...]: ...

    @abstractmethod
    def load_children(self, element_id: str) -> tuple[tuple[Element, ...], tuple[Link, ...]]:
        """Direct children of the element plus the containment links to them."""

    @abstractmethod
    def load_links(self, link_kind: str, element_id: str) -> tuple[Link, ...]:
        """Outgoing links of the given kind whose source is the element."""


class FactIndex(FactProvider):
    """Memoizing wrapper around a provider, with ancestor derivation.

    `extractions` counts how many times each request actually reached the
    wrapped provider, so tests can observe that repetition is free.
    """

    def __init__(self, inner: FactProvider):
        self._inner = inner
        self._roots: tuple[Element, ...] | None = None
        self._children: dict = {}
        self._links: dict = {}
        self._by_id: dict[str, Element] = {}
        self._parent: dict[str, str | None] = {}
        self._edge_up: dict[str, Link] = {}
        self.extractions: Counter = Counter()

    @classmethod
    def wrap(cls, provider: FactProvider) -> "FactIndex":
        return provider if isinstance(provider, FactIndex) else cls(provider)

    @property
    def schema(self) -> Schema:
        return self._inner.schema

    def _call(self, request: str, fn, *args):
        self.extractions[request] += 1
        try:
            return fn(*args)
        except SliceError:
            raise
        except Exception as exc:
            raise ProviderFailure(request, exc) from exc

    def load_roots(self) -> tuple[Element, ...]:
        if self._roots is None:
            roots = tuple(self._call("loadRoots()", self._inner.load_roots))
            for el in roots:
                self._by_id[el.id] = el
                self._parent.setdefault(el.id, None)
            self._roots = roots
        return self._roots

    def load_children(self, element_id: str):
        if element_id not in self._children:
            request = f"loadChildren({element_id})"
            kids, edges = self._call(request, self._inner.load_children, element_id)
            kids, edges = tuple(kids), tuple(edges)
            for kid in kids:
                self._by_id[kid.id] = kid
                self._parent.setdefault(kid.id, element_id)
            for edge in edges:
                if edge.kind == CONTAINS and edge.source == element_id:
                    self._edge_up.setdefault(edge.target, edge)
            self._children[element_id] = (kids, edges)
        return self._children[element_id]

    def load_links(self, link_kind: str, element_id: str) -> tuple[Link, ...]:
        key = (link_kind, element_id)
        if key not in self._links:
            request = f"loadLinks({link_kind}, {element_id})"
            links = self._call(request, self._inner.load_links, link_kind, element_id)
            self._links[key] = tuple(links)
        return self._links[key]

    def find(self, element_id: str) -> Element:
        """Locate an element by id, exploring from the roots as needed."""
        if element_id in self._by_id:
            return self._by_id[element_id]
        queue = deque(el.id for el in self.load_roots())
        seen = set(queue)
        while queue:
            kids, _ = self.load_children(queue.popleft())
            if element_id in self._by_id:
                return self._by_id[element_id]
            for kid in kids:
                if kid.id not in seen:
                    seen.add(kid.id)
                    queue.append(kid.id)
        raise UnknownElement(element_id)

    def ancestors(self, element_id: str) -> list[Element]:
        """The `contains`-ancestor chain, nearest first."""
        self.find(element_id)
        chain = []
        cursor = self._parent.get(element_id)
        while cursor is not None:
            chain.append(self._by_id[cursor])
            cursor = self._parent.get(cursor)
        return chain

    def containment_link(self, element_id: str) -> Link | None:
        return self._edge_up.get(element_id)

    def all_elements(self) -> list[Element]:
        """Every root-reachable element, discovered breadth first."""
        out = []
        queue = deque(self.load_roots())
        seen = {el.id for el in queue}
        while queue:
            el = queue.popleft()
            out.append(el)
            kids, _ = self.load_children(el.id)
            for kid in kids:
                if kid.id not in seen:
                    seen.add(kid.id)
                    queue.append(kid)
        return out


class InMemoryProvider(FactProvider):
    """Provider over pre-built tables, mainly for tests and examples.

    child_map maps parent id to a list of child ids; containment links are
    minted on demand.  Non-containment links are served from the given
    link list by (kind, source).
    """

    def __init__(self, schema: Schema, elements, child_map, links=(), roots=()):
        self._schema = schema
        self._elements = {el.id: el for el in elements}
        self._child_map = {k: tuple(v) for k, v in child_map.items()}
        self._link_list = tuple(links)
        self._roots = tuple(roots)

    @property
    def schema(self) -> Schema:
        return self._schema

    def _require(self, element_id: str) -> None:
        if element_id not in self._elements:
            raise UnknownElement(element_id)

    def load_roots(self):
        return tuple(self._elements[r] for r in self._roots)

    def load_children(self, element_id: str):
        self._require(element_id)
        kid_ids = self._child_map.get(element_id, ())
        kids = tuple(self._elements[k] for k in kid_ids)
        edges = tuple(
            Link(f"contains:{element_id}:{k}", CONTAINS, element_id, k) for k in kid_ids
        )
        return kids, edges

    def load_links(self, link_kind: str, element_id: str):
        self._require(element_id)
        return tuple(
            l for l in self._link_list if l.kind == link_kind and l.source == element_id
        )


def _collect_links(index: FactIndex, member_ids: frozenset, link_kinds) -> set:
    links = set()
    for element_id in member_ids:
        if CONTAINS in link_kinds:
            up = index.containment_link(element_id)
            if up is not None and up.source in member_ids:
                links.add(up)
        for kind in link_kinds:
            if kind == CONTAINS:
                continue
            for l in index.load_links(kind, element_id):
                if l.target in member_ids:
                    links.add(l)
    return links


def build_slice(provider: FactProvider, keep=None, link_kinds=None) -> Slice:
    """Extract a slice: root-reachable elements passing `keep`, closed
    under `contains`-ancestors, plus every link (of the chosen kinds)
    whose endpoints are both members."""
    index = FactIndex.wrap(provider)
    kinds = tuple(link_kinds) if link_kinds is not None else index.schema.link_kind_names()
    members: dict[str, Element] = {}
    for el in index.all_elements():
        if keep is None or keep(el):
            if el.id not in members:
                members[el.id] = el
                for anc in index.ancestors(el.id):
                    members.setdefault(anc.id, anc)
    for el in members.values():
        index.schema.validate_element(el)
    member_ids = frozenset(members)
    links = _collect_links(index, member_ids, kinds)
    for l in links:
        index.schema.validate_link(l)
    return Slice(index.schema, frozenset(members.values()), frozenset(links), kinds, index)


def include_element(slice_: Slice, element_id: str) -> Slice:
    """Grow a slice by one element and its `contains`-ancestors."""
    if slice_.has_element(element_id):
        return slice_
    index = slice_.provider
    if not isinstance(index, FactIndex):
        raise SliceError("slice carries no provider; cannot include new elements")
    el = index.find(element_id)
    added = {el.id: el}
    for anc in index.ancestors(element_id):
        added.setdefault(anc.id, anc)
    for extra in added.values():
        index.schema.validate_element(extra)
    elements = slice_.elements | frozenset(added.values())
    member_ids = frozenset(e.id for e in elements)
    links = _collect_links(index, member_ids, slice_.link_kinds)
    return Slice(slice_.schema, elements, frozenset(links), slice_.link_kinds, index)


def children(provider: FactProvider, element_id: str) -> list[Element]:
    """Direct `contains`-children; memoized by the index."""
    index = FactIndex.wrap(provider)
    index.find(element_id)
    kids, _ = index.load_children(element_id)
    return list(kids)
