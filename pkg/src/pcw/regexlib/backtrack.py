"""Direct regex evaluator over the syntax tree.

Works on end-position sets instead of single backtracking attempts, so
pathological patterns stay polynomial.  Deliberately shares nothing with
the DFA pipeline: this module is the oracle the solver's models are
verified against.
"""

from __future__ import annotations

from functools import lru_cache

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
    parse_regex,
)


def _class_contains(node: CharClass, scalar: int) -> bool:
    inside = any(lo <= scalar <= hi for lo, hi in node.intervals)
    return inside != node.negated


def _ends(node: RegexAst, text: str, pos: int, memo: dict) -> frozenset[int]:
    """All positions where `node` can finish matching, starting at `pos`."""
    key = (id(node), pos)
    cached = memo.get(key)
    if cached is not None:
        return cached

    result: frozenset[int]
    if isinstance(node, Literal):
        result = frozenset([pos + 1]) if pos < len(text) and text[pos] == node.char else frozenset()
    elif isinstance(node, AnyChar):
        result = frozenset([pos + 1]) if pos < len(text) else frozenset()
    elif isinstance(node, CharClass):
        ok = pos < len(text) and _class_contains(node, ord(text[pos]))
        result = frozenset([pos + 1]) if ok else frozenset()
    elif isinstance(node, Concat):
        positions = frozenset([pos])
        for part in node.parts:
            positions = frozenset(q for p in positions for q in _ends(part, text, p, memo))
            if not positions:
                break
        result = positions
    elif isinstance(node, Alt):
        result = frozenset(q for option in node.options for q in _ends(option, text, pos, memo))
    elif isinstance(node, Star):
        result = _closure(node.inner, text, frozenset([pos]), memo)
    elif isinstance(node, Plus):
        once = _ends(node.inner, text, pos, memo)
        result = _closure(node.inner, text, once, memo)
    elif isinstance(node, Opt):
        result = frozenset([pos]) | _ends(node.inner, text, pos, memo)
    elif isinstance(node, Repeat):
        positions = frozenset([pos])
        for _ in range(node.min):
            positions = frozenset(q for p in positions for q in _ends(node.inner, text, p, memo))
            if not positions:
                break
        if positions:
            if node.max is None:
                positions = _closure(node.inner, text, positions, memo)
            else:
                reached = set(positions)
                frontier = positions
                for _ in range(node.max - node.min):
                    frontier = frozenset(
                        q for p in frontier for q in _ends(node.inner, text, p, memo) if q not in reached
                    )
                    if not frontier:
                        break
                    reached |= frontier
                positions = frozenset(reached)
        result = positions
    else:
        raise TypeError(f"unknown regex node {node!r}")

    memo[key] = result
    return result


def _closure(inner: RegexAst, text: str, seeds: frozenset[int], memo: dict) -> frozenset[int]:
    """Positions reachable by zero or more repetitions of `inner`."""
    reached = set(seeds)
    frontier = list(seeds)
    while frontier:
        p = frontier.pop()
        for q in _ends(inner, text, p, memo):
            if q not in reached:
                reached.add(q)
                frontier.append(q)
    return frozenset(reached)


def match_fullmatch(node: RegexAst, text: str) -> bool:
    """Whether `node` matches the whole of `text`."""
    return len(text) in _ends(node, text, 0, {})


@lru_cache(maxsize=256)
def _compiled(pattern: str):
    return parse_regex(pattern)


def match_pattern(pattern: str, text: str) -> bool:
    """Full match with a parse cache keyed by the pattern literal."""
    return match_fullmatch(_compiled(pattern), text)
