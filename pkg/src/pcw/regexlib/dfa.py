"""Regex compilation to DFAs plus the automata algebra used by the solver.

Pipeline: syntax tree -> Thompson NFA -> subset construction.  All DFAs
are total (explicit dead state) over an alphabet partitioned into scalar
equivalence classes, which keeps Unicode-sized alphabets tractable.
"""

from __future__ import annotations

from bisect import bisect_right
from collections import deque
from dataclasses import dataclass

from pcw.regexlib.syntax import (
    MAX_SCALAR,
    Alt,
    AnyChar,
    CharClass,
    Concat,
    Interval,
    Literal,
    Opt,
    Plus,
    RegexAst,
    Repeat,
    Star,
)

DEFAULT_STATE_BUDGET = 100_000


class StateBudgetExceeded(RuntimeError):
    """Automaton construction exceeded the configured state budget."""


@dataclass(frozen=True)
class Alphabet:
    """Partition of the scalar range [0, MAX_SCALAR] into equivalence classes.

    Class `i` covers scalars [starts[i], starts[i+1]-1]; the last class runs
    to MAX_SCALAR.  starts[0] is always 0.
    """

    starts: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.starts)

    def class_of(self, scalar: int) -> int:
        return bisect_right(self.starts, scalar) - 1

    def class_low(self, index: int) -> int:
        return self.starts[index]

    def representative(self, index: int) -> str:
        return chr(self.starts[index])

    def classes_for(self, intervals: tuple[Interval, ...]) -> frozenset[int]:
        """Indices of the classes covered by `intervals` (must align with cuts)."""
        covered = set()
        for lo, hi in intervals:
            i = self.class_of(lo)
            while i < self.size and self.starts[i] <= hi:
                covered.add(i)
                i += 1
        return frozenset(covered)


def _collect_intervals(node: RegexAst, out: list[Interval]) -> None:
    if isinstance(node, Literal):
        out.append((ord(node.char), ord(node.char)))
    elif isinstance(node, CharClass):
        out.extend(node.intervals)
    elif isinstance(node, Concat):
        for part in node.parts:
            _collect_intervals(part, out)
    elif isinstance(node, Alt):
        for option in node.options:
            _collect_intervals(option, out)
    elif isinstance(node, (Star, Plus, Opt, Repeat)):
        _collect_intervals(node.inner, out)
    # AnyChar contributes no cut points: it covers every class.


def alphabet_for(intervals: list[Interval]) -> Alphabet:
    """Partition the scalar range at every interval boundary."""
    cuts = {0}
    for lo, hi in intervals:
        cuts.add(lo)
        if hi < MAX_SCALAR:
            cuts.add(hi + 1)
    return Alphabet(tuple(sorted(cuts)))


def merge_alphabets(a: Alphabet, b: Alphabet) -> Alphabet:
    return Alphabet(tuple(sorted(set(a.starts) | set(b.starts))))


class _Nfa:
    def __init__(self, alphabet: Alphabet):
        self.alphabet = alphabet
        self.eps: list[list[int]] = []
        self.steps: list[list[tuple[frozenset[int], int]]] = []

    def new_state(self) -> int:
        self.eps.append([])
        self.steps.append([])
        return len(self.eps) - 1

    def add_eps(self, src: int, dst: int) -> None:
        self.eps[src].append(dst)

    def add_step(self, src: int, classes: frozenset[int], dst: int) -> None:
        self.steps[src].append((classes, dst))


def _build_nfa(nfa: _Nfa, node: RegexAst) -> tuple[int, int]:
    """Thompson construction; returns (entry, exit) states."""
    alphabet = nfa.alphabet
    if isinstance(node, Literal):
        return _leaf(nfa, alphabet.classes_for(((ord(node.char), ord(node.char)),)))
    if isinstance(node, AnyChar):
        return _leaf(nfa, frozenset(range(alphabet.size)))
    if isinstance(node, CharClass):
        classes = alphabet.classes_for(node.intervals)
        if node.negated:
            classes = frozenset(range(alphabet.size)) - classes
        return _leaf(nfa, classes)
    if isinstance(node, Concat):
        entry = exit_ = nfa.new_state()
        for part in node.parts:
            p_entry, p_exit = _build_nfa(nfa, part)
            nfa.add_eps(exit_, p_entry)
            exit_ = p_exit
        return entry, exit_
    if isinstance(node, Alt):
        entry = nfa.new_state()
        exit_ = nfa.new_state()
        for option in node.options:
            o_entry, o_exit = _build_nfa(nfa, option)
            nfa.add_eps(entry, o_entry)
            nfa.add_eps(o_exit, exit_)
        return entry, exit_
    if isinstance(node, Star):
        entry, exit_ = _wrap_loop(nfa, node.inner)
        return entry, exit_
    if isinstance(node, Plus):
        i_entry, i_exit = _build_nfa(nfa, node.inner)
        l_entry, l_exit = _wrap_loop(nfa, node.inner)
        nfa.add_eps(i_exit, l_entry)
        return i_entry, l_exit
    if isinstance(node, Opt):
        i_entry, i_exit = _build_nfa(nfa, node.inner)
        entry = nfa.new_state()
        exit_ = nfa.new_state()
        nfa.add_eps(entry, i_entry)
        nfa.add_eps(entry, exit_)
        nfa.add_eps(i_exit, exit_)
        return entry, exit_
    if isinstance(node, Repeat):
        entry = exit_ = nfa.new_state()
        for _ in range(node.min):
            p_entry, p_exit = _build_nfa(nfa, node.inner)
            nfa.add_eps(exit_, p_entry)
            exit_ = p_exit
        if node.max is None:
            l_entry, l_exit = _wrap_loop(nfa, node.inner)
            nfa.add_eps(exit_, l_entry)
            exit_ = l_exit
        else:
            tail = nfa.new_state()
            nfa.add_eps(exit_, tail)
            for _ in range(node.max - node.min):
                p_entry, p_exit = _build_nfa(nfa, node.inner)
                nfa.add_eps(exit_, p_entry)
                nfa.add_eps(p_exit, tail)
                exit_ = p_exit
            exit_ = tail
        return entry, exit_
    raise TypeError(f"unknown regex node {node!r}")


def _leaf(nfa: _Nfa, classes: frozenset[int]) -> tuple[int, int]:
    entry = nfa.new_state()
    exit_ = nfa.new_state()
    nfa.add_step(entry, classes, exit_)
    return entry, exit_


def _wrap_loop(nfa: _Nfa, inner: RegexAst) -> tuple[int, int]:
    """Zero-or-more wrapper around `inner`."""
    entry = nfa.new_state()
    exit_ = nfa.new_state()
    i_entry, i_exit = _build_nfa(nfa, inner)
    nfa.add_eps(entry, i_entry)
    nfa.add_eps(entry, exit_)
    nfa.add_eps(i_exit, i_entry)
    nfa.add_eps(i_exit, exit_)
    return entry, exit_


@dataclass(frozen=True)
class Dfa:
    """Deterministic, total automaton over an alphabet partition."""

    alphabet: Alphabet
    transitions: tuple[tuple[int, ...], ...]  # [state][class] -> state
    start: int
    accepting: frozenset[int]

    @property
    def state_count(self) -> int:
        return len(self.transitions)

    def accepts(self, text: str) -> bool:
        state = self.start
        row = self.transitions
        class_of = self.alphabet.class_of
        for ch in text:
            state = row[state][class_of(ord(ch))]
        return state in self.accepting


def regex_to_dfa(node: RegexAst, state_budget: int = DEFAULT_STATE_BUDGET) -> Dfa:
    """Compile a regex tree to a total DFA recognizing the same language."""
    intervals: list[Interval] = []
    _collect_intervals(node, intervals)
    alphabet = alphabet_for(intervals)

    nfa = _Nfa(alphabet)
    entry, exit_ = _build_nfa(nfa, node)
    if len(nfa.eps) > state_budget:
        raise StateBudgetExceeded(f"NFA has {len(nfa.eps)} states (budget {state_budget})")

    closures: dict[int, frozenset[int]] = {}

    def eps_closure(states: frozenset[int]) -> frozenset[int]:
        seen: set[int] = set()
        stack = list(states)
        while stack:
            s = stack.pop()
            if s in seen:
                continue
            seen.add(s)
            cached = closures.get(s)
            if cached is not None:
                seen.update(cached)
                continue
            stack.extend(nfa.eps[s])
        return frozenset(seen)

    # Memoize single-state closures to keep subset construction cheap.
    for s in range(len(nfa.eps)):
        closures[s] = eps_closure(frozenset([s]))

    start_set = closures[entry]
    index: dict[frozenset[int], int] = {start_set: 0}
    rows: list[tuple[int, ...]] = []
    order = [start_set]
    queue = deque([start_set])
    while queue:
        current = queue.popleft()
        targets: list[set[int]] = [set() for _ in range(alphabet.size)]
        for s in current:
            for classes, dst in nfa.steps[s]:
                for c in classes:
                    targets[c].add(dst)
        row = []
        for c in range(alphabet.size):
            dest = frozenset().union(*(closures[t] for t in targets[c])) if targets[c] else frozenset()
            slot = index.get(dest)
            if slot is None:
                slot = len(index)
                if slot >= state_budget:
                    raise StateBudgetExceeded(f"DFA exceeds state budget {state_budget}")
                index[dest] = slot
                order.append(dest)
                queue.append(dest)
            row.append(slot)
        rows.append(tuple(row))

    accepting = frozenset(i for i, states in enumerate(order) if exit_ in states)
    return Dfa(alphabet, tuple(rows), 0, accepting)


def _reclass(dfa: Dfa, alphabet: Alphabet) -> Dfa:
    """Rebuild `dfa`'s transition table over a finer alphabet partition."""
    if alphabet.starts == dfa.alphabet.starts:
        return dfa
    mapping = [dfa.alphabet.class_of(alphabet.class_low(i)) for i in range(alphabet.size)]
    rows = tuple(tuple(row[old] for old in mapping) for row in dfa.transitions)
    return Dfa(alphabet, rows, dfa.start, dfa.accepting)


def dfa_product(a: Dfa, b: Dfa, mode: str, state_budget: int = DEFAULT_STATE_BUDGET) -> Dfa:
    """Product automaton: mode 'intersect' for L(a) ∩ L(b), 'difference' for L(a) \\ L(b)."""
    if mode not in ("intersect", "difference"):
        raise ValueError(f"unknown product mode {mode!r}")
    alphabet = merge_alphabets(a.alphabet, b.alphabet)
    a = _reclass(a, alphabet)
    b = _reclass(b, alphabet)

    index: dict[tuple[int, int], int] = {(a.start, b.start): 0}
    pairs = [(a.start, b.start)]
    rows: list[tuple[int, ...]] = []
    queue = deque(pairs)
    while queue:
        sa, sb = queue.popleft()
        row = []
        for c in range(alphabet.size):
            dest = (a.transitions[sa][c], b.transitions[sb][c])
            slot = index.get(dest)
            if slot is None:
                slot = len(index)
                if slot >= state_budget:
                    raise StateBudgetExceeded(f"product exceeds state budget {state_budget}")
                index[dest] = slot
                pairs.append(dest)
                queue.append(dest)
            row.append(slot)
        rows.append(tuple(row))

    if mode == "intersect":
        accepting = frozenset(i for i, (sa, sb) in enumerate(pairs) if sa in a.accepting and sb in b.accepting)
    else:
        accepting = frozenset(i for i, (sa, sb) in enumerate(pairs) if sa in a.accepting and sb not in b.accepting)
    return Dfa(alphabet, tuple(rows), 0, accepting)


def dfa_complement(a: Dfa) -> Dfa:
    """Σ* minus L(a); relies on the transition function being total."""
    accepting = frozenset(range(a.state_count)) - a.accepting
    return Dfa(a.alphabet, a.transitions, a.start, accepting)


def dfa_witness(a: Dfa) -> str | None:
    """Shortest accepted string, or None when the language is empty.

    BFS explores classes in ascending scalar order, so among equally short
    witnesses the one built from the smallest class representatives wins.
    """
    if a.start in a.accepting:
        return ""
    parents: dict[int, tuple[int, int]] = {}  # state -> (parent state, class)
    seen = {a.start}
    queue = deque([a.start])
    while queue:
        state = queue.popleft()
        for c in range(a.alphabet.size):
            dest = a.transitions[state][c]
            if dest in seen:
                continue
            seen.add(dest)
            parents[dest] = (state, c)
            if dest in a.accepting:
                chars: list[str] = []
                cursor = dest
                while cursor != a.start:
                    parent, cls = parents[cursor]
                    chars.append(a.alphabet.representative(cls))
                    cursor = parent
                return "".join(reversed(chars))
            queue.append(dest)
    return None


def dfa_for_literal(text: str) -> Dfa:
    """DFA accepting exactly `text`."""
    alphabet = alphabet_for([(ord(ch), ord(ch)) for ch in text])
    dead = len(text) + 1
    rows = []
    for i in range(len(text) + 2):
        row = [dead] * alphabet.size
        if i < len(text):
            row[alphabet.class_of(ord(text[i]))] = i + 1
        rows.append(tuple(row))
    return Dfa(alphabet, tuple(rows), 0, frozenset([len(text)]))


def dfa_for_length(op: str, bound: int, state_budget: int = DEFAULT_STATE_BUDGET) -> Dfa:
    """DFA accepting strings whose length compares to `bound` via `op`.

    Counts up to bound+1 and then saturates, which is exact for every
    comparison operator.
    """
    if bound < 0:
        raise ValueError("length bound must be non-negative")
    saturate = bound + 1
    if saturate + 1 > state_budget:
        raise StateBudgetExceeded(f"length automaton needs {saturate + 1} states (budget {state_budget})")
    alphabet = Alphabet((0,))
    rows = tuple((min(i + 1, saturate),) for i in range(saturate + 1))
    compare = {
        "<": lambda n: n < bound,
        "<=": lambda n: n <= bound,
        ">": lambda n: n > bound,
        ">=": lambda n: n >= bound,
        "==": lambda n: n == bound,
        "!=": lambda n: n != bound,
    }[op]
    # State i < saturate means length exactly i; state saturate means length
    # >= saturate, and compare(saturate) agrees with every such length for
    # all six operators.
    accepting = frozenset(i for i in range(saturate + 1) if compare(i))
    return Dfa(alphabet, rows, 0, accepting)
