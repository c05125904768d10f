"""MiniLang syntax trees, source spans, and parse diagnostics.

Every declaration and statement node carries the span of its source
text.  Spans never participate in equality, so two parses of the same
text compare structurally equal even when file names differ; the
round-trip property leans on this.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Span:
    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int


@dataclass(frozen=True)
class Diagnostic:
    file: str
    line: int
    column: int
    message: str
    severity: str = "error"


# --- expressions -------------------------------------------------------------


@dataclass
class IntLit:
    value: int
    span: Span = field(compare=False, default=None)


@dataclass
class BoolLit:
    value: bool
    span: Span = field(compare=False, default=None)


@dataclass
class StrLit:
    value: str
    span: Span = field(compare=False, default=None)


@dataclass
class NameExpr:
    name: str
    span: Span = field(compare=False, default=None)


@dataclass
class UnaryExpr:
    op: str
    operand: object
    span: Span = field(compare=False, default=None)


@dataclass
class BinaryExpr:
    op: str
    left: object
    right: object
    span: Span = field(compare=False, default=None)


@dataclass
class LenExpr:
    operand: object
    span: Span = field(compare=False, default=None)


@dataclass
class MatchesExpr:
    operand: object
    pattern: str
    span: Span = field(compare=False, default=None)


@dataclass
class CallExpr:
    callee: str  # fully qualified: Namespace.Class.Method
    args: list
    span: Span = field(compare=False, default=None)


# --- statements --------------------------------------------------------------


@dataclass
class LetStmt:
    name: str
    expr: object
    span: Span = field(compare=False, default=None)


@dataclass
class AssignStmt:
    name: str
    expr: object
    span: Span = field(compare=False, default=None)


@dataclass
class IfStmt:
    cond: object
    then: "Block"
    els: "Block | None"
    span: Span = field(compare=False, default=None)


@dataclass
class WhileStmt:
    cond: object
    body: "Block"
    span: Span = field(compare=False, default=None)


@dataclass
class ReturnStmt:
    expr: object | None
    span: Span = field(compare=False, default=None)


@dataclass
class CallStmt:
    call: CallExpr
    span: Span = field(compare=False, default=None)


@dataclass
class Block:
    stmts: list
    span: Span = field(compare=False, default=None)


# --- declarations ------------------------------------------------------------


@dataclass
class Param:
    name: str
    type: str
    span: Span = field(compare=False, default=None)


@dataclass
class AttrDecl:
    name: str
    args: list
    span: Span = field(compare=False, default=None)


@dataclass
class MethodDecl:
    name: str
    params: list
    return_type: str | None
    attrs: list
    body: Block
    span: Span = field(compare=False, default=None)


@dataclass
class ClassDecl:
    name: str
    methods: list
    span: Span = field(compare=False, default=None)


@dataclass
class NamespaceDecl:
    name: str
    classes: list
    span: Span = field(compare=False, default=None)


@dataclass
class FileTree:
    path: str = field(compare=False)
    namespaces: list = field(default_factory=list)
    span: Span = field(compare=False, default=None)


@dataclass
class SyntaxForest:
    """All parsed files of one project plus any parse diagnostics."""

    root: str
    files: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)

    def ok(self) -> bool:
        return not any(d.severity == "error" for d in self.diagnostics)
