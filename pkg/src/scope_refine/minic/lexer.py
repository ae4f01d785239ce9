"""Tokenizer for MiniC source text."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import LexError

KEYWORDS = frozenset({
    "int", "bool", "true", "false", "if", "else", "while", "for",
    "switch", "case", "default", "break", "continue", "return",
})

# longest match first
_PUNCT2 = ("&&", "||", "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=", "%=", "++", "--")
_PUNCT1 = "+-*/%<>=!?:;,(){}"

EOF = "eof"
IDENT = "ident"
INT_LIT = "int_lit"


@dataclass(frozen=True)
class Token:
    kind: str  # keyword text, punctuation text, 'ident', 'int_lit' or 'eof'
    text: str
    line: int
    col: int


def lex(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            col += 1
            i += 1
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = word if word in KEYWORDS else IDENT
            tokens.append(Token(kind, word, line, col))
            col += j - i
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token(INT_LIT, text[i:j], line, col))
            col += j - i
            i = j
            continue
        two = text[i:i + 2]
        if two in _PUNCT2:
            tokens.append(Token(two, two, line, col))
            col += 2
            i += 2
            continue
        if ch in _PUNCT1:
            tokens.append(Token(ch, ch, line, col))
            col += 1
            i += 1
            continue
        raise LexError(line, col, f"illegal character {ch!r}")
    tokens.append(Token(EOF, "", line, col))
    return tokens
