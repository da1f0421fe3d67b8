"""Tokenizer for PerfC source text.

Produces a flat token list ending in an "eof" token. Keywords get their
own kind; everything else is "ident", "int", "float", "op" or "perf"
(the ``#perf`` annotation marker). Line comments (``//``) and block
comments (``/* */``) are skipped; any other ``#`` directive is an error
because the language has no preprocessor.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import Diagnostic, FrontendError, Loc

KEYWORDS = {
    "int", "double", "void", "if", "else", "for", "while", "return", "sizeof",
    # recognized so they can be rejected with a named diagnostic:
    "break", "continue", "goto",
}

# Two-character operators, tried before single characters (maximal munch).
TWO_CHAR_OPS = {
    "<=", ">=", "==", "!=", "&&", "||", "+=", "-=", "*=", "/=", "%=", "++", "--",
}
ONE_CHAR_OPS = set("+-*/%<>=!&(){}[];,")


@dataclass(frozen=True)
class Token:
    kind: str  # keyword text, "ident", "int", "float", "op", "perf", "eof"
    text: str
    loc: Loc


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    n = len(source)

    def err(message: str, at_line: int, at_col: int):
        raise FrontendError(Diagnostic(Loc(at_line, at_col), message))

    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        if source.startswith("/*", i):
            end = source.find("*/", i + 2)
            if end < 0:
                err("unterminated block comment", line, col)
            skipped = source[i : end + 2]
            line += skipped.count("\n")
            col = (len(skipped) - skipped.rfind("\n")) if "\n" in skipped else col + len(skipped)
            i = end + 2
            continue
        if ch == "#":
            start_col = col
            j = i + 1
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            word = source[i + 1 : j]
            if word != "perf":
                err(f"unknown directive '#{word}'; the language has no preprocessor",
                    line, start_col)
            tokens.append(Token("perf", "#perf", Loc(line, start_col)))
            col += j - i
            i = j
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and source[i + 1].isdigit()):
            start, start_col = i, col
            while i < n and source[i].isdigit():
                i += 1
            is_float = False
            if i < n and source[i] == ".":
                is_float = True
                i += 1
                while i < n and source[i].isdigit():
                    i += 1
            if i < n and source[i] in "eE":
                j = i + 1
                if j < n and source[j] in "+-":
                    j += 1
                if j < n and source[j].isdigit():
                    is_float = True
                    i = j
                    while i < n and source[i].isdigit():
                        i += 1
            text = source[start:i]
            tokens.append(Token("float" if is_float else "int", text, Loc(line, start_col)))
            col += i - start
            continue
        if ch.isalpha() or ch == "_":
            start, start_col = i, col
            while i < n and (source[i].isalnum() or source[i] == "_"):
                i += 1
            text = source[start:i]
            kind = text if text in KEYWORDS else "ident"
            tokens.append(Token(kind, text, Loc(line, start_col)))
            col += i - start
            continue
        two = source[i : i + 2]
        if two in TWO_CHAR_OPS:
            tokens.append(Token("op", two, Loc(line, col)))
            i += 2
            col += 2
            continue
        if ch in ONE_CHAR_OPS:
            tokens.append(Token("op", ch, Loc(line, col)))
            i += 1
            col += 1
            continue
        err(f"unexpected character {ch!r}", line, col)

    tokens.append(Token("eof", "", Loc(line, col)))
    return tokens
