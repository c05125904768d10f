"""Seeded random generators shared by the property and acceptance suites."""

from __future__ import annotations

import random

from pcw.regexlib.syntax import (
    Alt,
    AnyChar,
    CharClass,
    Concat,
    Literal,
    Opt,
    Plus,
    RegexAst,
    Repeat,
    Star,
    normalize_intervals,
)
from pcw.slices import ElementKind, InMemoryProvider, define_schema, element, link

REGEX_CHAR_POOL = "ab c01-".replace(" ", "")  # small pool keeps partitions <= 6 classes


def random_regex(rng: random.Random, depth: int = 4) -> RegexAst:
    """Random tree in the supported subset, depth-bounded."""
    if depth <= 0:
        return _random_leaf(rng)
    kind = rng.randrange(10)
    if kind < 3:
        return _random_leaf(rng)
    if kind < 5:
        return Concat(tuple(random_regex(rng, depth - 1) for _ in range(rng.randint(1, 3))))
    if kind < 7:
        return Alt(tuple(random_regex(rng, depth - 1) for _ in range(rng.randint(2, 3))))
    inner = random_regex(rng, depth - 1)
    if kind == 7:
        return Star(inner)
    if kind == 8:
        return rng.choice([Plus, Opt])(inner)
    lo = rng.randint(0, 3)
    hi = rng.choice([None, lo, lo + rng.randint(0, 3)])
    return Repeat(inner, lo, hi)


def _random_leaf(rng: random.Random) -> RegexAst:
    kind = rng.randrange(4)
    if kind == 0:
        return AnyChar()
    if kind < 3:
        return Literal(rng.choice(REGEX_CHAR_POOL))
    chars = rng.sample(REGEX_CHAR_POOL, rng.randint(1, 3))
    intervals = normalize_intervals([(ord(c), ord(c)) for c in chars])
    return CharClass(intervals, negated=rng.random() < 0.25)


def strings_up_to(alphabet: str, max_len: int) -> list[str]:
    """Every string over `alphabet` with length <= max_len."""
    out = [""]
    frontier = [""]
    for _ in range(max_len):
        frontier = [s + c for s in frontier for c in alphabet]
        out.extend(frontier)
    return out


def render_regex(node: RegexAst) -> str:
    """Pattern text for a tree; used to cross-check against `re`."""
    if isinstance(node, Literal):
        return _escape_literal(node.char)
    if isinstance(node, AnyChar):
        return "."
    if isinstance(node, CharClass):
        body = "".join(
            _escape_class_char(chr(lo)) if lo == hi else f"{_escape_class_char(chr(lo))}-{_escape_class_char(chr(hi))}"
            for lo, hi in node.intervals
        )
        return f"[{'^' if node.negated else ''}{body}]"
    if isinstance(node, Concat):
        return "".join(_group(p) for p in node.parts)
    if isinstance(node, Alt):
        return "(" + "|".join(render_regex(o) for o in node.options) + ")"
    if isinstance(node, Star):
        return _group(node.inner) + "*"
    if isinstance(node, Plus):
        return _group(node.inner) + "+"
    if isinstance(node, Opt):
        return _group(node.inner) + "?"
    if isinstance(node, Repeat):
        suffix = f"{{{node.min}}}" if node.max == node.min else f"{{{node.min},{'' if node.max is None else node.max}}}"
        return _group(node.inner) + suffix
    raise TypeError(node)


def _group(node: RegexAst) -> str:
    if isinstance(node, (Literal, AnyChar, CharClass, Alt)):
        return render_regex(node)
    return "(" + render_regex(node) + ")"


def _escape_literal(ch: str) -> str:
    if ch in "\\.":
        return "\\" + ch
    return ch


def _escape_class_char(ch: str) -> str:
    if ch in "\\-]":
        return "\\" + ch
    return ch


# --- random fact providers ---------------------------------------------------

NODE_KIND = ElementKind("Node", (("name", "text"), ("size", "integer"), ("hot", "flag")))


def random_fact_provider(rng: random.Random, max_nodes: int = 24) -> InMemoryProvider:
    """A random containment tree with random cross links of kind `ref`."""
    schema = define_schema([NODE_KIND], ["ref"])
    total = rng.randint(1, max_nodes)
    ids = [f"n{i}" for i in range(total)]
    elements = [
        element(i, "Node", name=i, size=rng.randint(0, 9), hot=rng.random() < 0.3)
        for i in ids
    ]
    child_map: dict[str, list[str]] = {i: [] for i in ids}
    root_count = rng.randint(1, min(2, total))
    attached = ids[:root_count]
    for i in ids[root_count:]:
        child_map[rng.choice(attached)].append(i)
        attached.append(i)
    links = []
    for j in range(rng.randint(0, total)):
        a, b = rng.choice(ids), rng.choice(ids)
        links.append(link(f"ref{j}", "ref", a, b))
    return InMemoryProvider(schema, elements, child_map, links, roots=ids[:root_count])


# --- random CFGs --------------------------------------------------------------

from pcw.minilang.cfg import (  # noqa: E402  (grouped with its section)
    Assign,
    BasicBlock,
    Binary,
    Branch,
    CallAssign,
    Cfg,
    IntConst,
    Jump,
    Return,
    Var,
)

CFG_LOCALS = ("a", "b", "c")


def random_cfg(rng: random.Random, max_blocks: int = 12) -> Cfg:
    """Random int-typed CFG: every block reachable (spanning tree), plus
    stray branch/jump edges that create loops and merges.  At most 6
    variables (3 params + 3 locals)."""
    count = rng.randint(1, max_blocks)
    params = tuple((f"p{i}", "int") for i in range(rng.randint(1, 3)))
    pool = [name for name, _ in params] + list(CFG_LOCALS)
    counter = iter(range(10_000))

    def sid() -> str:
        return f"s{next(counter)}"

    def atom():
        if rng.random() < 0.55:
            return Var(rng.choice(pool))
        return IntConst(rng.randint(-3, 3))

    def int_expr():
        if rng.random() < 0.4:
            return atom()
        return Binary(rng.choice("+-*"), atom(), atom())

    def cond():
        return Binary(rng.choice(["<", "<=", "==", "!="]), atom(), atom())

    def any_block() -> str:
        return f"b{rng.randrange(count)}"

    children: dict[int, list[int]] = {i: [] for i in range(count)}
    for i in range(1, count):
        parent = rng.choice([j for j in range(i) if len(children[j]) < 2])
        children[parent].append(i)

    blocks = {}
    for i in range(count):
        stmts = []
        for _ in range(rng.randint(0, 3)):
            if rng.random() < 0.15:
                target = rng.choice(pool) if rng.random() < 0.8 else None
                args = tuple(atom() for _ in range(rng.randint(0, 2)))
                stmts.append(CallAssign(sid(), target, "Ext.Lib.Fn", args))
            else:
                stmts.append(Assign(sid(), rng.choice(pool), int_expr()))
        kids = children[i]
        if len(kids) == 2:
            term = Branch(sid(), cond(), f"b{kids[0]}", f"b{kids[1]}")
        elif len(kids) == 1:
            if rng.random() < 0.5:
                term = Jump(sid(), f"b{kids[0]}")
            else:
                pair = [f"b{kids[0]}", any_block()]
                rng.shuffle(pair)
                term = Branch(sid(), cond(), pair[0], pair[1])
        else:
            roll = rng.random()
            if roll < 0.5:
                term = Return(sid(), atom())
            elif roll < 0.75:
                term = Jump(sid(), any_block())
            else:
                term = Branch(sid(), cond(), any_block(), any_block())
        blocks[f"b{i}"] = BasicBlock(f"b{i}", tuple(stmts), term)
    return Cfg("Gen.Rand.M", params, "int", "b0", blocks)


# --- random MiniLang programs ---------------------------------------------------

MINI_PATTERNS = ("a*", "ab", "a|b-", "[ab-]{1,2}", "(a|b)*")


class _ProgramGen:
    """Emits one method body; all programs typecheck and terminate (while
    loops count a fresh protected variable up to a literal bound)."""

    def __init__(self, rng: random.Random, callees: list):
        self.rng = rng
        self.callees = callees  # (qname, param types) this method may call
        self.uid = iter(range(10_000))
        self.scopes: list[list] = []  # frames of (name, type)
        self.protected: set[str] = set()

    def fresh(self, prefix: str) -> str:
        return f"{prefix}{next(self.uid)}"

    def in_scope(self, type_: str) -> list:
        return [n for frame in self.scopes for n, t in frame if t == type_]

    def int_atom(self) -> str:
        names = self.in_scope("int")
        if names and self.rng.random() < 0.7:
            return self.rng.choice(names)
        return str(self.rng.randint(-3, 9))

    def int_expr(self) -> str:
        parts = [self.int_atom()]
        for _ in range(self.rng.randint(0, 2)):
            op = self.rng.choice(["+", "-", "*", "/", "%"])
            # literal nonzero denominators only; zero would abort runs
            right = str(self.rng.randint(1, 5)) if op in "/%" else self.int_atom()
            parts.extend([op, right])
        return " ".join(parts)

    def cond(self) -> str:
        strings = self.in_scope("string")
        roll = self.rng.random()
        if strings and roll < 0.2:
            return f"matches({self.rng.choice(strings)}, \"{self.rng.choice(MINI_PATTERNS)}\")"
        if strings and roll < 0.35:
            return f"len({self.rng.choice(strings)}) {self.rng.choice(['<', '<=', '==', '!='])} {self.rng.randint(0, 3)}"
        op = self.rng.choice(["<", "<=", ">", ">=", "==", "!="])
        return f"{self.int_atom()} {op} {self.int_atom()}"

    def stmts(self, depth: int, budget: int) -> list:
        out: list[str] = []
        self.scopes.append([])
        for _ in range(budget):
            out.extend(self.one_stmt(depth))
        self.scopes.pop()
        return out

    def one_stmt(self, depth: int) -> list:
        rng = self.rng
        roll = rng.random()
        assignable = [n for n in self.in_scope("int") if n not in self.protected]
        if roll < 0.3 or not assignable:
            name = self.fresh("v")
            line = f"let {name} = {self.int_expr()};"
            self.scopes[-1].append((name, "int"))
            return [line]
        if roll < 0.55:
            return [f"{rng.choice(assignable)} = {self.int_expr()};"]
        if roll < 0.7 and self.callees:
            qname, types = rng.choice(self.callees)
            args = ", ".join(self.arg_for(t) for t in types)
            name = self.fresh("r")
            line = f"let {name} = {qname}({args});"
            self.scopes[-1].append((name, "int"))
            return [line]
        if roll < 0.9 and depth > 0:
            body = self.stmts(depth - 1, rng.randint(1, 2))
            out = [f"if ({self.cond()}) {{"] + ["  " + l for l in body]
            if rng.random() < 0.5:
                other = self.stmts(depth - 1, rng.randint(1, 2))
                out += ["} else {"] + ["  " + l for l in other]
            out.append("}")
            return out
        if depth > 0:
            counter_name = self.fresh("i")
            self.scopes[-1].append((counter_name, "int"))
            self.protected.add(counter_name)
            body = self.stmts(depth - 1, rng.randint(1, 2))
            return [
                f"let {counter_name} = 0;",
                f"while ({counter_name} < {rng.randint(1, 3)}) {{",
                f"  {counter_name} = {counter_name} + 1;",
                *["  " + l for l in body],
                "}",
            ]
        return [f"let {self.fresh('v')} = {self.int_expr()};"]

    def arg_for(self, type_: str) -> str:
        if type_ == "int":
            return self.int_expr()
        strings = self.in_scope("string")
        if strings and self.rng.random() < 0.8:
            return self.rng.choice(strings)
        return '"' + "".join(self.rng.choice("ab-") for _ in range(self.rng.randint(0, 3))) + '"'


def random_program(rng: random.Random, max_methods: int = 3) -> str:
    """Source of a namespace with 1..max_methods int-returning methods;
    calls only go to later methods, so the call graph is acyclic."""
    count = rng.randint(1, max_methods)
    signatures = []
    for i in range(count):
        types = ["int"] * rng.randint(1, 2)
        if rng.random() < 0.6:
            types.append("string")
        signatures.append((f"Gen.G.M{i}", types))
    methods = []
    for i in range(count):
        qname, types = signatures[i]
        gen = _ProgramGen(rng, signatures[i + 1 :])
        gen.scopes.append([])
        names = []
        for t in types:
            name = gen.fresh("q" if t == "int" else "t")
            names.append(f"{name}: {t}")
            gen.scopes[-1].append((name, t))
        gen.scopes.append([])  # method body frame; return sees its locals
        body = []
        for _ in range(rng.randint(1, 4)):
            body.extend(gen.one_stmt(2))
        body.append(f"return {gen.int_expr()};")
        lines = [f"fn M{i}({', '.join(names)}) -> int {{"]
        lines += ["  " + l for l in body]
        lines.append("}")
        methods.append("\n".join("    " + l for l in lines))
    return "namespace Gen {\n  class G {\n" + "\n\n".join(methods) + "\n  }\n}\n"


def random_args(rng: random.Random, method) -> list:
    """Concrete argument vector for a parsed MethodDecl."""
    out = []
    for param in method.params:
        if param.type == "int":
            out.append(rng.randint(-4, 6))
        elif param.type == "string":
            out.append("".join(rng.choice("ab-") for _ in range(rng.randint(0, 4))))
        else:
            out.append(rng.random() < 0.5)
    return out


def check_slice_invariants(slice_) -> None:
    """Closure over links and ancestors; raises AssertionError on violation."""
    ids = slice_.element_ids()
    for l in slice_.links:
        assert l.source in ids and l.target in ids, f"dangling link {l.id}"
    index = slice_.provider
    for e in slice_.elements:
        for anc in index.ancestors(e.id):
            assert anc.id in ids, f"missing ancestor {anc.id} of {e.id}"
