"""MiniLang tokenizer."""

from __future__ import annotations

from dataclasses import dataclass

KEYWORDS = {
    "namespace",
    "class",
    "fn",
    "let",
    "if",
    "else",
    "while",
    "return",
    "true",
    "false",
    "len",
    "matches",
    "int",
    "bool",
    "string",
}

# longest first so == beats = and -> beats -
PUNCT = [
    "->",
    "<=",
    ">=",
    "==",
    "!=",
    "&&",
    "||",
    "{",
    "}",
    "(",
    ")",
    ",",
    ";",
    ":",
    ".",
    "@",
    "=",
    "+",
    "-",
    "*",
    "/",
    "%",
    "<",
    ">",
    "!",
]

_ESCAPES = {"\\": "\\", '"': '"', "n": "\n", "t": "\t"}


class MiniSyntaxError(Exception):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT INT STRING EOF or the punct/keyword text itself
    text: str
    line: int
    col: int


def lex(text: str, file: str = "<input>") -> list[Token]:
    """Tokenize a file; raises MiniSyntaxError at the first bad character."""
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def advance(k: int) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            advance(1)
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                advance(1)
            continue
        if ch.isdigit():
            start, sl, sc = i, line, col
            while i < n and text[i].isdigit():
                advance(1)
            tokens.append(Token("INT", text[start:i], sl, sc))
            continue
        if ch.isalpha() or ch == "_":
            start, sl, sc = i, line, col
            while i < n and (text[i].isalnum() or text[i] == "_"):
                advance(1)
            word = text[start:i]
            tokens.append(Token(word if word in KEYWORDS else "IDENT", word, sl, sc))
            continue
        if ch == '"':
            sl, sc = line, col
            advance(1)
            out = []
            while True:
                if i >= n or text[i] == "\n":
                    raise MiniSyntaxError("unterminated string", sl, sc)
                c = text[i]
                if c == '"':
                    advance(1)
                    break
                if c == "\\":
                    if i + 1 >= n or text[i + 1] not in _ESCAPES:
                        raise MiniSyntaxError("unknown escape", line, col)
                    out.append(_ESCAPES[text[i + 1]])
                    advance(2)
                    continue
                out.append(c)
                advance(1)
            tokens.append(Token("STRING", "".join(out), sl, sc))
            continue
        for p in PUNCT:
            if text.startswith(p, i):
                tokens.append(Token(p, p, line, col))
                advance(len(p))
                break
        else:
            raise MiniSyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("EOF", "", line, col))
    return tokens
