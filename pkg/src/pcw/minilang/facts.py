"""Fact extraction: a FactProvider over parsed MiniLang projects.

Structure facts (Project > Namespace > Class > Method) are built
eagerly from the forest, which is already in memory; `calls` links are
computed lazily because they require lowering the source method, and
lowering is the expensive step worth deferring.

Element ids are dotted qualified names: the project element is the
project root's name, a namespace is `Ns`, a class `Ns.Cls`, a method
`Ns.Cls.Method`, identical to the qualified names used in call syntax.
"""

from __future__ import annotations

from ..slices import ElementKind, FactProvider, Link, LinkKind, UnknownElement, define_schema, element
from .cfg import CallAssign, Cfg
from .lower import LoweringContext
from .syntax import Span, SyntaxForest
from .typecheck import build_method_table

ENDPOINT_VERBS = ("GET", "POST", "PUT", "DELETE")

MINILANG_SCHEMA = define_schema(
    [
        ElementKind("Project", (("name", "text"),)),
        ElementKind("Namespace", (("name", "text"), ("file", "text"), ("line", "integer"))),
        ElementKind("Class", (("name", "text"), ("file", "text"), ("line", "integer"))),
        ElementKind(
            "Method",
            (
                ("name", "text"),
                ("file", "text"),
                ("line", "integer"),
                ("returns", "text"),
                ("endpointVerb", "text"),
                ("endpointRoute", "text"),
            ),
        ),
    ],
    [LinkKind("calls", (("line", "integer"),))],
)


class InvalidForest(Exception):
    pass


class UnresolvedCall(Exception):
    pass


class AmbiguousCall(Exception):
    """Reserved: qualified names are unique, so this never fires today."""


class NoSpan(Exception):
    pass


def _endpoint_of(method_decl) -> tuple[str, str] | None:
    for attr in method_decl.attrs:
        if attr.name != "endpoint":
            continue  # unknown attributes are ignored, room to grow
        if len(attr.args) != 2:
            raise InvalidForest(f"@endpoint takes (verb, route), got {len(attr.args)} args")
        verb, route = attr.args
        if verb not in ENDPOINT_VERBS:
            raise InvalidForest(f"@endpoint verb must be one of {ENDPOINT_VERBS}, got {verb!r}")
        if not route.startswith("/"):
            raise InvalidForest(f"@endpoint route must begin with '/', got {route!r}")
        return verb, route
    return None


class MiniProvider(FactProvider):
    """Facts over one parsed project.

    All structure maps are immutable after construction, and CFG lowering
    is cached, so repeated requests answer identically.
    """

    def __init__(self, forest: SyntaxForest):
        if not forest.ok():
            first = next(d for d in forest.diagnostics if d.severity == "error")
            raise InvalidForest(f"{first.file}:{first.line}:{first.column}: {first.message}")
        self._forest = forest
        self._table = build_method_table(forest)
        self.lowering = LoweringContext(self._table)
        self._elements: dict[str, object] = {}
        self._children: dict[str, list[str]] = {}
        self._spans: dict[str, Span] = {}
        self._root_id = forest.root
        self._build(forest)

    def _build(self, forest: SyntaxForest) -> None:
        root = element(self._root_id, "Project", name=forest.root)
        self._elements[root.id] = root
        self._children[root.id] = []
        seen_ns = set()
        for tree in forest.files:
            for ns in tree.namespaces:
                if ns.name in seen_ns:
                    raise InvalidForest(f"duplicate namespace {ns.name}")
                seen_ns.add(ns.name)
                ns_el = element(
                    ns.name, "Namespace", name=ns.name, file=tree.path, line=ns.span.start_line
                )
                self._attach(root.id, ns_el, ns.span)
                for cls in ns.classes:
                    cls_id = f"{ns.name}.{cls.name}"
                    cls_el = element(
                        cls_id, "Class", name=cls.name, file=tree.path, line=cls.span.start_line
                    )
                    self._attach(ns_el.id, cls_el, cls.span)
                    for method in cls.methods:
                        qname = f"{cls_id}.{method.name}"
                        attrs = {
                            "name": method.name,
                            "file": tree.path,
                            "line": method.span.start_line,
                            "returns": method.return_type or "",
                        }
                        endpoint = _endpoint_of(method)
                        if endpoint is not None:
                            attrs["endpointVerb"], attrs["endpointRoute"] = endpoint
                        self._attach(cls_id, element(qname, "Method", **attrs), method.span)

    def _attach(self, parent_id: str, el, span: Span) -> None:
        self._elements[el.id] = el
        self._children.setdefault(el.id, [])
        self._children[parent_id].append(el.id)
        self._spans[el.id] = span

    # --- FactProvider ----------------------------------------------------------

    @property
    def schema(self):
        return MINILANG_SCHEMA

    def load_roots(self):
        return (self._elements[self._root_id],)

    def load_children(self, element_id: str):
        if element_id not in self._elements:
            raise UnknownElement(element_id)
        kids = tuple(self._elements[k] for k in self._children.get(element_id, ()))
        edges = tuple(
            Link(f"contains:{element_id}:{k.id}", "contains", element_id, k.id) for k in kids
        )
        return kids, edges

    def load_links(self, link_kind: str, element_id: str):
        if element_id not in self._elements:
            raise UnknownElement(element_id)
        if link_kind != "calls" or element_id not in self._table:
            return ()
        cfg = self.lowering.cfg(element_id)
        links = []
        for site in cfg.call_sites():
            line = site.span.start_line if site.span else 0
            links.append(
                Link(
                    f"calls:{element_id}:{site.sid}",
                    "calls",
                    element_id,
                    site.callee,
                    (("line", line),),
                )
            )
        return tuple(links)

    # --- language-level operations ----------------------------------------------

    def lower_to_cfg(self, method_id: str) -> Cfg:
        """The method's normalized CFG; cached, so repeat calls return
        the identical object."""
        el = self._elements.get(method_id)
        if el is None or el.kind != "Method":
            raise UnknownElement(method_id)
        return self.lowering.cfg(method_id)

    def find_method(self, qname: str):
        el = self._elements.get(qname)
        if el is None or el.kind != "Method":
            raise UnknownElement(qname)
        return el

    def methods(self) -> list:
        return sorted(q for q in self._table)

    def resolve_call_target(self, call_site: CallAssign) -> str:
        if call_site.callee not in self._table:
            raise UnresolvedCall(call_site.callee)
        return call_site.callee

    def source_span(self, entity) -> Span:
        """Span of an element id or of a lowered statement."""
        if isinstance(entity, str):
            span = self._spans.get(entity)
            if span is None:
                if entity not in self._elements:
                    raise UnknownElement(entity)
                raise NoSpan(entity)  # the project element is synthetic
            return span
        span = getattr(entity, "span", None)
        if span is None:
            raise NoSpan(repr(entity))
        return span


def extract_facts(forest: SyntaxForest) -> MiniProvider:
    """Build the fact provider; rejects forests with parse errors."""
    return MiniProvider(forest)
