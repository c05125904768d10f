"""Regex syntax tree and parser.

The supported subset: literals, the escapes ``\\\\ \\- \\] \\.``, ``.``,
character classes ``[..]`` with ranges and leading ``^`` negation,
grouping ``( )``, alternation ``|``, and the quantifiers ``* + ?``,
``{m}``, ``{m,n}``, ``{m,}``.  Patterns always have full-match semantics;
there are no anchors in the syntax.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

MAX_SCALAR = 0x10FFFF

Interval = tuple[int, int]


class RegexSyntaxError(ValueError):
    """Malformed pattern; `pos` is the 0-based offset where parsing failed."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at {pos})")
        self.pos = pos


class UnsupportedFeature(ValueError):
    """Pattern uses a feature outside the subset (backreferences, lookaround)."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at {pos})")
        self.pos = pos


@dataclass(frozen=True)
class Literal:
    char: str


@dataclass(frozen=True)
class AnyChar:
    pass


@dataclass(frozen=True)
class CharClass:
    """Set of scalar intervals; intervals are sorted and disjoint."""

    intervals: tuple[Interval, ...]
    negated: bool = False


@dataclass(frozen=True)
class Concat:
    parts: tuple["RegexAst", ...]


@dataclass(frozen=True)
class Alt:
    options: tuple["RegexAst", ...]


@dataclass(frozen=True)
class Star:
    inner: "RegexAst"


@dataclass(frozen=True)
class Plus:
    inner: "RegexAst"


@dataclass(frozen=True)
class Opt:
    inner: "RegexAst"


@dataclass(frozen=True)
class Repeat:
    inner: "RegexAst"
    min: int
    max: int | None


RegexAst = Union[Literal, AnyChar, CharClass, Concat, Alt, Star, Plus, Opt, Repeat]

_ESCAPABLE = {"\\", "-", "]", "."}


def normalize_intervals(intervals: list[Interval]) -> tuple[Interval, ...]:
    """Sort and merge overlapping/adjacent scalar intervals."""
    merged: list[Interval] = []
    for lo, hi in sorted(intervals):
        if merged and lo <= merged[-1][1] + 1:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return tuple(merged)


class _Parser:
    def __init__(self, pattern: str):
        self.pattern = pattern
        self.pos = 0

    def error(self, message: str) -> RegexSyntaxError:
        return RegexSyntaxError(message, self.pos)

    def peek(self) -> str | None:
        if self.pos < len(self.pattern):
            return self.pattern[self.pos]
        return None

    def take(self) -> str:
        ch = self.pattern[self.pos]
        self.pos += 1
        return ch

    def parse(self) -> RegexAst:
        node = self.alternation()
        if self.pos != len(self.pattern):
            raise self.error(f"unexpected {self.pattern[self.pos]!r}")
        return node

    def alternation(self) -> RegexAst:
        options = [self.concatenation()]
        while self.peek() == "|":
            self.take()
            options.append(self.concatenation())
        if len(options) == 1:
            return options[0]
        return Alt(tuple(options))

    def concatenation(self) -> RegexAst:
        parts: list[RegexAst] = []
        while True:
            ch = self.peek()
            if ch is None or ch in ")|":
                break
            parts.append(self.repeated())
        if len(parts) == 1:
            return parts[0]
        return Concat(tuple(parts))

    def repeated(self) -> RegexAst:
        node = self.atom()
        while True:
            ch = self.peek()
            if ch == "*":
                self.take()
                node = Star(node)
            elif ch == "+":
                self.take()
                node = Plus(node)
            elif ch == "?":
                self.take()
                node = Opt(node)
            elif ch == "{" and self._looks_like_count():
                node = self.counted(node)
            else:
                return node

    def _looks_like_count(self) -> bool:
        # "{" only opens a quantifier when followed by digits; otherwise it
        # is an ordinary literal, matching common regex engines.
        i = self.pos + 1
        return i < len(self.pattern) and self.pattern[i].isdigit()

    def counted(self, node: RegexAst) -> RegexAst:
        self.take()  # '{'
        lo = self._number()
        hi: int | None = lo
        if self.peek() == ",":
            self.take()
            hi = self._number() if (self.peek() or "").isdigit() else None
        if self.peek() != "}":
            raise self.error("expected '}'")
        self.take()
        if hi is not None and lo > hi:
            raise self.error(f"bad repetition bounds {{{lo},{hi}}}")
        return Repeat(node, lo, hi)

    def _number(self) -> int:
        start = self.pos
        while (self.peek() or "").isdigit():
            self.take()
        if start == self.pos:
            raise self.error("expected number")
        return int(self.pattern[start : self.pos])

    def atom(self) -> RegexAst:
        ch = self.peek()
        if ch is None:
            raise self.error("unexpected end of pattern")
        if ch in "*+?":
            raise self.error("nothing to repeat")
        if ch == "(":
            self.take()
            if self.peek() == "?":
                raise UnsupportedFeature("groups with '(?' are not supported", self.pos)
            node = self.alternation()
            if self.peek() != ")":
                raise self.error("expected ')'")
            self.take()
            return node
        if ch == "[":
            return self.char_class()
        if ch == ".":
            self.take()
            return AnyChar()
        if ch == "\\":
            return Literal(self._escape())
        self.take()
        return Literal(ch)

    def _escape(self) -> str:
        self.take()  # backslash
        ch = self.peek()
        if ch is None:
            raise self.error("dangling escape")
        if ch.isdigit():
            raise UnsupportedFeature("backreferences are not supported", self.pos)
        if ch not in _ESCAPABLE:
            raise self.error(f"unsupported escape \\{ch}")
        return self.take()

    def char_class(self) -> CharClass:
        self.take()  # '['
        negated = False
        if self.peek() == "^":
            self.take()
            negated = True
        intervals: list[Interval] = []
        first = True
        while True:
            ch = self.peek()
            if ch is None:
                raise self.error("unterminated character class")
            if ch == "]" and not first:
                self.take()
                break
            lo = self._class_char()
            # A dash between two characters is a range; leading or trailing
            # dashes are literals.
            if self.peek() == "-" and self.pos + 1 < len(self.pattern) and self.pattern[self.pos + 1] != "]":
                self.take()
                hi = self._class_char()
                if ord(lo) > ord(hi):
                    raise self.error(f"reversed range {lo}-{hi}")
                intervals.append((ord(lo), ord(hi)))
            else:
                intervals.append((ord(lo), ord(lo)))
            first = False
        return CharClass(normalize_intervals(intervals), negated)

    def _class_char(self) -> str:
        ch = self.peek()
        if ch is None:
            raise self.error("unterminated character class")
        if ch == "\\":
            return self._escape()
        return self.take()


def parse_regex(pattern: str) -> RegexAst:
    """Parse `pattern` into a syntax tree with full-match semantics."""
    return _Parser(pattern).parse()
