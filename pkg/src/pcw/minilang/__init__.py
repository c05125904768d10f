"""MiniLang frontend: parsing, type checking, CFG lowering, fact extraction.

A bundled two-variant corpus (`buggy` and `fixed`) ships with the
package; `corpus_path` locates it.
"""

from pathlib import Path

from .cfg import (
    Assign,
    BasicBlock,
    Binary,
    BoolConst,
    Branch,
    CallAssign,
    Cfg,
    IntConst,
    Jump,
    Len,
    Matches,
    Return,
    StrConst,
    Unary,
    Var,
    expr_vars,
    int_div,
    int_mod,
    is_atom,
    subst,
)
from .facts import (
    AmbiguousCall,
    InvalidForest,
    MiniProvider,
    NoSpan,
    UnresolvedCall,
    extract_facts,
)
from .interp import Interpreter, MiniRuntimeError, OutOfFuel, run_method
from .lower import LoweringContext, lower_method
from .parser import EmptyProject, IoError, parse_project, parse_source
from .printer import print_expr, print_file
from .syntax import Diagnostic, Span, SyntaxForest
from .typecheck import MiniTypeError, build_method_table, check_method


def corpus_path(variant: str = "buggy") -> str:
    """Directory of a bundled corpus variant ("buggy" or "fixed")."""
    path = Path(__file__).parent / "corpus" / variant
    if not path.is_dir():
        raise ValueError(f"no bundled corpus named {variant!r}")
    return str(path)
