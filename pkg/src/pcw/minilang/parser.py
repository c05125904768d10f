"""Recursive-descent MiniLang parser and project loader.

Error recovery is per file: the first syntax error in a file becomes a
diagnostic and the remainder of that file is skipped, keeping any
namespaces that were already parsed completely.
"""

from __future__ import annotations

from pathlib import Path

from .lexer import MiniSyntaxError, Token, lex
from .syntax import (
    AssignStmt,
    AttrDecl,
    BinaryExpr,
    Block,
    BoolLit,
    CallExpr,
    CallStmt,
    ClassDecl,
    Diagnostic,
    FileTree,
    IfStmt,
    IntLit,
    LenExpr,
    LetStmt,
    MatchesExpr,
    MethodDecl,
    NameExpr,
    NamespaceDecl,
    Param,
    ReturnStmt,
    Span,
    StrLit,
    SyntaxForest,
    UnaryExpr,
    WhileStmt,
)


class IoError(Exception):
    pass


class EmptyProject(Exception):
    pass


_PRECEDENCE = {
    "||": 1,
    "&&": 2,
    "==": 3,
    "!=": 3,
    "<": 4,
    "<=": 4,
    ">": 4,
    ">=": 4,
    "+": 5,
    "-": 5,
    "*": 6,
    "/": 6,
    "%": 6,
}

_TYPES = ("int", "bool", "string")


def _tok_end(tok: Token) -> tuple[int, int]:
    # approximate for strings (escapes shorten the decoded text)
    width = len(tok.text) + (2 if tok.kind == "STRING" else 0)
    return tok.line, tok.col + max(width - 1, 0)


class Parser:
    def __init__(self, tokens: list[Token], file: str):
        self.toks = tokens
        self.pos = 0
        self.file = file

    def cur(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def _fail(self, message: str) -> None:
        tok = self.cur()
        raise MiniSyntaxError(message, tok.line, tok.col)

    def eat(self, kind: str) -> Token:
        tok = self.cur()
        if tok.kind != kind:
            shown = tok.text if tok.kind != "EOF" else "end of file"
            self._fail(f"expected {kind!r}, found {shown!r}")
        self.pos += 1
        return tok

    def at(self, kind: str) -> bool:
        return self.cur().kind == kind

    def _span(self, start: Token) -> Span:
        last = self.toks[self.pos - 1] if self.pos else start
        end_line, end_col = _tok_end(last)
        return Span(self.file, start.line, start.col, end_line, end_col)

    # --- declarations --------------------------------------------------------

    def parse_file(self) -> tuple[FileTree, list[Diagnostic]]:
        tree = FileTree(self.file)
        diagnostics: list[Diagnostic] = []
        try:
            while not self.at("EOF"):
                if not self.at("namespace"):
                    self._fail(f"expected namespace, found {self.cur().text!r}")
                tree.namespaces.append(self._namespace())
        except MiniSyntaxError as err:
            diagnostics.append(Diagnostic(self.file, err.line, err.column, err.message))
        last = self.toks[-1]
        tree.span = Span(self.file, 1, 1, last.line, max(last.col - 1, 1))
        return tree, diagnostics

    def _namespace(self) -> NamespaceDecl:
        start = self.eat("namespace")
        name = self.eat("IDENT").text
        self.eat("{")
        classes = []
        while not self.at("}"):
            if not self.at("class"):
                self._fail(f"expected class, found {self.cur().text!r}")
            classes.append(self._class())
        self.eat("}")
        return NamespaceDecl(name, classes, self._span(start))

    def _class(self) -> ClassDecl:
        start = self.eat("class")
        name = self.eat("IDENT").text
        self.eat("{")
        methods = []
        while not self.at("}"):
            if not (self.at("fn") or self.at("@")):
                self._fail(f"expected fn, found {self.cur().text!r}")
            methods.append(self._method())
        self.eat("}")
        return ClassDecl(name, methods, self._span(start))

    def _method(self) -> MethodDecl:
        start = self.cur()
        attrs = []
        while self.at("@"):
            attrs.append(self._attr())
        self.eat("fn")
        name = self.eat("IDENT").text
        self.eat("(")
        params = []
        if not self.at(")"):
            params.append(self._param())
            while self.at(","):
                self.eat(",")
                params.append(self._param())
        self.eat(")")
        return_type = None
        if self.at("->"):
            self.eat("->")
            return_type = self._type()
        body = self._block()
        return MethodDecl(name, params, return_type, attrs, body, self._span(start))

    def _attr(self) -> AttrDecl:
        start = self.eat("@")
        name = self.eat("IDENT").text
        self.eat("(")
        args = [self.eat("STRING").text]
        while self.at(","):
            self.eat(",")
            args.append(self.eat("STRING").text)
        self.eat(")")
        return AttrDecl(name, args, self._span(start))

    def _param(self) -> Param:
        start = self.cur()
        name = self.eat("IDENT").text
        self.eat(":")
        return Param(name, self._type(), self._span(start))

    def _type(self) -> str:
        tok = self.cur()
        if tok.kind not in _TYPES:
            self._fail(f"expected a type, found {tok.text!r}")
        self.pos += 1
        return tok.kind

    # --- statements ----------------------------------------------------------

    def _block(self) -> Block:
        start = self.eat("{")
        stmts = []
        while not self.at("}"):
            stmts.append(self._stmt())
        self.eat("}")
        return Block(stmts, self._span(start))

    def _stmt(self):
        start = self.cur()
        if self.at("let"):
            self.eat("let")
            name = self.eat("IDENT").text
            self.eat("=")
            expr = self._expr()
            self.eat(";")
            return LetStmt(name, expr, self._span(start))
        if self.at("if"):
            self.eat("if")
            self.eat("(")
            cond = self._expr()
            self.eat(")")
            then = self._block()
            els = None
            if self.at("else"):
                self.eat("else")
                els = self._block()
            return IfStmt(cond, then, els, self._span(start))
        if self.at("while"):
            self.eat("while")
            self.eat("(")
            cond = self._expr()
            self.eat(")")
            body = self._block()
            return WhileStmt(cond, body, self._span(start))
        if self.at("return"):
            self.eat("return")
            expr = None if self.at(";") else self._expr()
            self.eat(";")
            return ReturnStmt(expr, self._span(start))
        if self.at("IDENT"):
            if self.peek().kind == "=":
                name = self.eat("IDENT").text
                self.eat("=")
                expr = self._expr()
                self.eat(";")
                return AssignStmt(name, expr, self._span(start))
            if self.peek().kind == ".":
                call = self._qualified_call()
                self.eat(";")
                return CallStmt(call, self._span(start))
            self._fail(f"expected statement, found {self.cur().text!r}")
        self._fail(f"expected statement, found {self.cur().text!r}")

    # --- expressions ----------------------------------------------------------

    def _expr(self, min_prec: int = 1):
        start = self.cur()
        left = self._unary()
        while _PRECEDENCE.get(self.cur().kind, 0) >= min_prec:
            op = self.cur().kind
            self.eat(op)
            right = self._expr(_PRECEDENCE[op] + 1)
            left = BinaryExpr(op, left, right, self._span(start))
        return left

    def _unary(self):
        start = self.cur()
        if self.at("!") or self.at("-"):
            op = self.cur().kind
            self.eat(op)
            return UnaryExpr(op, self._unary(), self._span(start))
        return self._primary()

    def _primary(self):
        start = self.cur()
        if self.at("INT"):
            return IntLit(int(self.eat("INT").text), self._span(start))
        if self.at("STRING"):
            return StrLit(self.eat("STRING").text, self._span(start))
        if self.at("true"):
            self.eat("true")
            return BoolLit(True, self._span(start))
        if self.at("false"):
            self.eat("false")
            return BoolLit(False, self._span(start))
        if self.at("len"):
            self.eat("len")
            self.eat("(")
            operand = self._expr()
            self.eat(")")
            return LenExpr(operand, self._span(start))
        if self.at("matches"):
            self.eat("matches")
            self.eat("(")
            operand = self._expr()
            self.eat(",")
            pattern = self.eat("STRING").text
            self.eat(")")
            return MatchesExpr(operand, pattern, self._span(start))
        if self.at("IDENT"):
            if self.peek().kind == ".":
                return self._qualified_call()
            if self.peek().kind == "(":
                self._fail("call target must be a qualified Namespace.Class.Method name")
            return NameExpr(self.eat("IDENT").text, self._span(start))
        self._fail(f"expected expression, found {self.cur().text!r}")

    def _qualified_call(self) -> CallExpr:
        start = self.cur()
        parts = [self.eat("IDENT").text]
        self.eat(".")
        parts.append(self.eat("IDENT").text)
        self.eat(".")
        parts.append(self.eat("IDENT").text)
        self.eat("(")
        args = []
        if not self.at(")"):
            args.append(self._expr())
            while self.at(","):
                self.eat(",")
                args.append(self._expr())
        self.eat(")")
        return CallExpr(".".join(parts), args, self._span(start))


def parse_source(text: str, file: str = "<input>") -> tuple[FileTree, list[Diagnostic]]:
    """Parse one file's text; lexer errors become diagnostics too."""
    try:
        tokens = lex(text, file)
    except MiniSyntaxError as err:
        tree = FileTree(file, [], Span(file, 1, 1, err.line, err.column))
        return tree, [Diagnostic(file, err.line, err.column, err.message)]
    return Parser(tokens, file).parse_file()


def parse_project(root_path: str) -> SyntaxForest:
    """Parse every `.mini` file under a project directory."""
    root = Path(root_path)
    if not root.is_dir():
        raise IoError(f"not a directory: {root_path}")
    paths = sorted(root.glob("*.mini"))
    if not paths:
        raise EmptyProject(f"no .mini files in {root_path}")
    forest = SyntaxForest(root.name)
    for path in paths:
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise IoError(str(exc)) from exc
        tree, diagnostics = parse_source(text, path.name)
        forest.files.append(tree)
        forest.diagnostics.extend(diagnostics)
    return forest
