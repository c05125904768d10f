"""Regular expression engine used by the string constraint solver.

Two independent evaluation routes are provided on purpose: a direct
backtracking matcher over the syntax tree (`backtrack`) and a compiled
DFA pipeline (`dfa`).  The solver uses the DFA route; the matcher serves
as the verification oracle for every model the solver emits.
"""

from pcw.regexlib.syntax import (
    Alt,
    AnyChar,
    CharClass,
    Concat,
    Literal,
    Opt,
    Plus,
    RegexSyntaxError,
    Repeat,
    Star,
    UnsupportedFeature,
    parse_regex,
)
from pcw.regexlib.backtrack import match_fullmatch
from pcw.regexlib.dfa import (
    Dfa,
    StateBudgetExceeded,
    dfa_complement,
    dfa_for_length,
    dfa_for_literal,
    dfa_product,
    dfa_witness,
    regex_to_dfa,
)

__all__ = [
    "Alt",
    "AnyChar",
    "CharClass",
    "Concat",
    "Dfa",
    "Literal",
    "Opt",
    "Plus",
    "RegexSyntaxError",
    "Repeat",
    "Star",
    "StateBudgetExceeded",
    "UnsupportedFeature",
    "dfa_complement",
    "dfa_for_length",
    "dfa_for_literal",
    "dfa_product",
    "dfa_witness",
    "match_fullmatch",
    "parse_regex",
    "regex_to_dfa",
]
