"""Boolean conditions over named state variables.

Grammar (precedence high to low)::

    atom    := NAME | true | false | '(' expr ')'
    unary   := '!' unary | atom
    conj    := unary ('&' unary)*
    expr    := conj ('|' conj)*

Nested conjunctions/disjunctions are flattened on construction so that
``parse_formula(format_formula(f)) == f`` holds for every parsed formula.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence, Union

from .errors import DslError

__all__ = [
    "Const",
    "Var",
    "Not",
    "And",
    "Or",
    "Formula",
    "TRUE",
    "FALSE",
    "parse_formula",
    "format_formula",
    "formula_vars",
    "compile_formula",
    "conj",
    "disj",
]


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    args: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    args: tuple["Formula", ...]


Formula = Union[Const, Var, Not, And, Or]

TRUE = Const(True)
FALSE = Const(False)


def conj(args: Sequence[Formula]) -> Formula:
    flat: list[Formula] = []
    for a in args:
        flat.extend(a.args if isinstance(a, And) else (a,))
    if not flat:
        return TRUE
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(args: Sequence[Formula]) -> Formula:
    flat: list[Formula] = []
    for a in args:
        flat.extend(a.args if isinstance(a, Or) else (a,))
    if not flat:
        return FALSE
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*")
_TOKEN_RE = re.compile(r"\s*(?:(?P<op>[!&|()])|(?P<name>[A-Za-z_][A-Za-z0-9_.\-]*))")


def _tokenize(text: str, line: int | None, col0: int) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            stripped = len(text[pos:]) - len(text[pos:].lstrip())
            raise DslError(f"unexpected character {text[pos + stripped]!r} in formula",
                           line, col0 + pos + stripped)
        tok = m.group("op") or m.group("name")
        tokens.append((tok, col0 + m.start(m.lastindex or 0)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str, line: int | None, col0: int):
        self.tokens = _tokenize(text, line, col0)
        self.i = 0
        self.line = line
        self.end_col = col0 + len(text)

    def peek(self) -> str | None:
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def col(self) -> int:
        return self.tokens[self.i][1] if self.i < len(self.tokens) else self.end_col

    def take(self) -> str:
        tok = self.tokens[self.i][0]
        self.i += 1
        return tok

    def expr(self) -> Formula:
        parts = [self.conj()]
        while self.peek() == "|":
            self.take()
            parts.append(self.conj())
        return disj(parts) if len(parts) > 1 else parts[0]

    def conj(self) -> Formula:
        parts = [self.unary()]
        while self.peek() == "&":
            self.take()
            parts.append(self.unary())
        return conj(parts) if len(parts) > 1 else parts[0]

    def unary(self) -> Formula:
        if self.peek() == "!":
            self.take()
            return Not(self.unary())
        return self.atom()

    def atom(self) -> Formula:
        tok = self.peek()
        if tok is None:
            raise DslError("unexpected end of formula", self.line, self.col())
        if tok == "(":
            self.take()
            inner = self.expr()
            if self.peek() != ")":
                raise DslError("expected ')'", self.line, self.col())
            self.take()
            return inner
        if tok in ("&", "|", ")"):
            raise DslError(f"unexpected {tok!r}", self.line, self.col())
        self.take()
        if tok == "true":
            return TRUE
        if tok == "false":
            return FALSE
        return Var(tok)


def parse_formula(text: str, line: int | None = None, col: int = 1) -> Formula:
    """Parse ``text``; ``line``/``col`` locate it inside a larger file for errors."""
    p = _Parser(text, line, col)
    f = p.expr()
    if p.peek() is not None:
        raise DslError(f"trailing token {p.peek()!r} in formula", line, p.col())
    return f


def format_formula(f: Formula) -> str:
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Not):
        inner = format_formula(f.arg)
        return f"!({inner})" if isinstance(f.arg, (And, Or)) else f"!{inner}"
    if isinstance(f, And):
        return " & ".join(
            f"({format_formula(a)})" if isinstance(a, Or) else format_formula(a) for a in f.args
        )
    return " | ".join(format_formula(a) for a in f.args)


def _walk(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Not):
        yield from _walk(f.arg)
    elif isinstance(f, (And, Or)):
        for a in f.args:
            yield from _walk(a)


def formula_vars(f: Formula) -> set[str]:
    return {g.name for g in _walk(f) if isinstance(g, Var)}


def compile_formula(f: Formula, variables: Sequence[str]) -> Callable[[tuple[int, ...]], bool]:
    """Turn ``f`` into a predicate over bit tuples laid out as ``variables``.

    Raises KeyError naming the first variable that is not declared.
    """
    index = {v: i for i, v in enumerate(variables)}
    for name in sorted(formula_vars(f)):
        if name not in index:
            raise KeyError(name)

    def build(g: Formula) -> Callable[[tuple[int, ...]], bool]:
        if isinstance(g, Const):
            value = g.value
            return lambda s: value
        if isinstance(g, Var):
            i = index[g.name]
            return lambda s: s[i] == 1
        if isinstance(g, Not):
            inner = build(g.arg)
            return lambda s: not inner(s)
        parts = [build(a) for a in g.args]
        if isinstance(g, And):
            return lambda s: all(p(s) for p in parts)
        return lambda s: any(p(s) for p in parts)

    return build(f)
