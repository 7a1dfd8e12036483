"""Lexer, recursive-descent parser and object-sugar desugarer for pDOT source.

Concrete syntax, by example::

    // comments run to end of line
    let x = nu(x: {a: x.type} /\ {B: Top..Top}) { a = x; B = Top } in
    let f = lam(y: Top) y in
    f x : Top

Object sugar ``nu(x => A = T; a = p; f: all(y: S) U = lam(y: S) t)`` infers
the self type from the members.  A lambda member must carry its type.
"""
from __future__ import annotations

import re
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union

from .diagnostics import Diagnostic, ParseError, Span
from .syntax import (
    BOT, TOP, All, And, App, Bound, Def, FieldDef, Free, Fld, Lam, Let, Obj, Path, Rec,
    Sel, Sngl, Stable, Term, Type, TypDecl, TypeDef, and_all,
)

KEYWORDS = {"let", "in", "nu", "lam", "mu", "all", "type", "Top", "Bot"}

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>/\\|=>|\.\.|[.(){}:;=])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "kw", "sym" or "eof"
    text: str
    span: Span


@dataclass(frozen=True)
class SourceProgram:
    """Program text together with where it came from."""

    text: str
    origin: str = "<input>"


def is_type_label(label: str) -> bool:
    return label[:1].isupper()


def tokenize(text: str, origin: str = "<input>") -> list[Token]:
    tokens: list[Token] = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            span = Span(line, col, line, col + 1, pos, 1)
            raise ParseError([Diagnostic(f"unexpected character {text[pos]!r}", "lex",
                                         span, origin=origin)])
        chunk = m.group()
        kind = m.lastgroup
        end_line, end_col = line, col
        for ch in chunk:
            if ch == "\n":
                end_line, end_col = end_line + 1, 1
            else:
                end_col += 1
        if kind == "ident":
            kind = "kw" if chunk in KEYWORDS else "ident"
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, chunk, Span(line, col, end_line, end_col, pos, len(chunk))))
        pos, line, col = m.end(), end_line, end_col
    tokens.append(Token("eof", "", Span(line, col, line, col, pos, 0)))
    return tokens


# Sugared objects


@dataclass(frozen=True)
class SugarMember:
    """One member of ``nu(x => ...)``: a type definition or a (possibly annotated) field."""

    label: str
    value: Union[Stable, Type]
    annot: Optional[Type] = None
    span: Optional[Span] = field(default=None, compare=False)


@dataclass(frozen=True)
class SugarObject:
    """``nu(x => m; ...)`` with members already resolved in the scope of ``x``."""

    hint: str
    members: tuple[SugarMember, ...]
    span: Optional[Span] = field(default=None, compare=False)


def declared_type(m: SugarMember, origin: str = "<input>") -> Type:
    """The member declaration a sugared member stands for."""
    if is_type_label(m.label):
        return TypDecl(m.label, m.value, m.value)
    if m.annot is not None:
        return Fld(m.label, m.annot)
    v = m.value
    if isinstance(v, Path):
        return Fld(m.label, Sngl(v))
    if isinstance(v, Obj):
        return Fld(m.label, Rec(v.self_type, v.hint))
    raise ParseError([Diagnostic(
        f"lambda member '{m.label}' needs a type: write {m.label}: all(x: S) T = lam(x: S) ...",
        "desugar", m.span, origin=origin)])


def desugar_object(obj: SugarObject, origin: str = "<input>") -> Obj:
    """Turn ``nu(x => ...)`` into a core object with its inferred self type."""
    seen: set[str] = set()
    for m in obj.members:
        if m.label in seen:
            raise ParseError([Diagnostic(f"duplicate definition of '{m.label}'", "AndDef-I",
                                         m.span, origin=origin)])
        seen.add(m.label)
    decls = [declared_type(m, origin) for m in obj.members]
    defs: list[Def] = []
    for m in obj.members:
        if is_type_label(m.label):
            defs.append(TypeDef(m.label, m.value, m.span))
        else:
            defs.append(FieldDef(m.label, m.value, m.span))
    return Obj(and_all(decls), tuple(defs), obj.hint, obj.span)


# Parser


class Parser:
    def __init__(self, text: str, origin: str = "<input>", free: Iterable[str] = ()):
        self.origin = origin
        self.tokens = tokenize(text, origin)
        self.pos = 0
        self.scope: list[str] = []
        self.hidden: list[str] = []
        self.free = set(free)

    # token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def error(self, message: str, tok: Optional[Token] = None, rule: str = "syntax"):
        tok = tok or self.tok
        return ParseError([Diagnostic(message, rule, tok.span, origin=self.origin)])

    def at(self, text: str) -> bool:
        return self.tok.kind in ("sym", "kw") and self.tok.text == text

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.pos += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected '{text}' but found '{found}'")
        return self.advance()

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            found = self.tok.text or "end of input"
            raise self.error(f"expected an identifier but found '{found}'")
        return self.advance()

    def span_from(self, start: Token) -> Span:
        last = self.tokens[max(self.pos - 1, 0)]
        return Span(start.span.line, start.span.col, last.span.end_line, last.span.end_col,
                    start.span.offset, last.span.offset + last.span.length - start.span.offset)

    def finish(self) -> None:
        if self.tok.kind != "eof":
            raise self.error(f"unexpected '{self.tok.text}' after end of expression")

    # scoping

    def resolve(self, tok: Token):
        name = tok.text
        for depth, bound in enumerate(reversed(self.scope)):
            if bound == name:
                return Bound(depth)
        if name in self.free:
            return Free(name)
        if name in self.hidden:
            raise self.error(f"the type of a let body cannot mention the let-bound '{name}'",
                             tok, "Let")
        raise self.error(f"unbound identifier '{name}'", tok, "scope")

    @contextmanager
    def bind(self, name: str) -> Iterator[None]:
        self.scope.append(name)
        try:
            yield
        finally:
            self.scope.pop()

    # paths

    def path_prefix(self) -> tuple[Token, Path]:
        """A root variable followed by lowercase selections."""
        start = self.ident()
        root = self.resolve(start)
        labels: list[str] = []
        while self.at(".") and self.peek().kind == "ident" and not is_type_label(self.peek().text):
            self.advance()
            labels.append(self.advance().text)
        return start, Path(root, tuple(labels), self.span_from(start))

    def path(self) -> Path:
        _, p = self.path_prefix()
        if self.at("."):
            nxt = self.peek()
            if nxt.text == "type" or (nxt.kind == "ident" and is_type_label(nxt.text)):
                raise self.error(f"'{p}.{nxt.text}' is a type, not a term", nxt)
            raise self.error("expected a field label after '.'", nxt)
        return p

    # types

    def type_(self) -> Type:
        t = self.prefix_type()
        while self.at("/\\"):
            self.advance()
            t = And(t, self.prefix_type())
        return t

    def prefix_type(self) -> Type:
        if self.at("all"):
            self.advance()
            self.expect("(")
            name = self.ident().text
            self.expect(":")
            param = self.type_()
            self.expect(")")
            with self.bind(name):
                body = self.type_()
            return All(param, body, name)
        if self.at("mu"):
            self.advance()
            self.expect("(")
            name = self.ident().text
            with self.bind(name):
                if self.at(":"):
                    self.advance()
                    body = self.type_()
                    self.expect(")")
                else:
                    self.expect(")")
                    body = self.type_()
            return Rec(body, name)
        return self.atom_type()

    def atom_type(self) -> Type:
        tok = self.tok
        if self.at("Top"):
            self.advance()
            return TOP
        if self.at("Bot"):
            self.advance()
            return BOT
        if self.at("("):
            self.advance()
            t = self.type_()
            self.expect(")")
            return t
        if self.at("{"):
            self.advance()
            t = self.decl()
            self.expect("}")
            return t
        if tok.kind == "ident":
            _, p = self.path_prefix()
            if not self.at("."):
                raise self.error(f"expected '.type' or a type label after path '{p}'")
            self.advance()
            nxt = self.tok
            if self.at("type"):
                self.advance()
                return Sngl(p)
            if nxt.kind == "ident" and is_type_label(nxt.text):
                self.advance()
                return Sel(p, nxt.text)
            raise self.error("expected 'type' or a type label", nxt)
        found = tok.text or "end of input"
        raise self.error(f"expected a type but found '{found}'")

    def decl(self) -> Type:
        explicit = self.at("type")
        if explicit:
            self.advance()
        label = self.ident()
        if is_type_label(label.text):
            self.expect(":")
            lo = self.type_()
            self.expect("..")
            hi = self.type_()
            return TypDecl(label.text, lo, hi)
        if explicit:
            raise self.error("type member labels start with an uppercase letter", label)
        self.expect(":")
        return Fld(label.text, self.type_())

    # terms

    def term(self) -> Term:
        start = self.tok
        if self.at("let"):
            self.advance()
            name = self.ident().text
            self.expect("=")
            bound = self.term()
            self.expect("in")
            with self.bind(name):
                body = self.term()
            annot = None
            if self.at(":"):
                self.advance()
                self.hidden.append(name)
                try:
                    annot = self.type_()
                finally:
                    self.hidden.pop()
            return Let(bound, body, name, annot, self.span_from(start))
        if self.at("("):
            self.advance()
            t = self.term()
            self.expect(")")
            return t
        if start.kind == "ident":
            fun = self.path()
            if self.tok.kind == "ident":
                arg = self.path()
                return App(fun, arg, self.span_from(start))
            return fun
        return self.value()

    def stable(self) -> Stable:
        if self.tok.kind == "ident":
            return self.path()
        return self.value()

    def value(self):
        start = self.tok
        if self.at("lam"):
            self.advance()
            self.expect("(")
            name = self.ident().text
            self.expect(":")
            param = self.type_()
            self.expect(")")
            with self.bind(name):
                body = self.term()
            return Lam(param, body, name, self.span_from(start))
        if self.at("nu"):
            return self.object()
        found = start.text or "end of input"
        raise self.error(f"expected a term but found '{found}'")

    def object(self) -> Obj:
        start = self.expect("nu")
        self.expect("(")
        name = self.ident().text
        with self.bind(name):
            if self.at("=>"):
                self.advance()
                members = self.members(")")
                self.expect(")")
                sugar = SugarObject(name, tuple(members), self.span_from(start))
                return desugar_object(sugar, self.origin)
            self.expect(":")
            self_type = self.type_()
            self.expect(")")
            self.expect("{")
            defs = self.defs()
            self.expect("}")
        return Obj(self_type, tuple(defs), name, self.span_from(start))

    def defs(self) -> list[Def]:
        out: list[Def] = []
        seen: set[str] = set()
        while not self.at("}"):
            start = self.tok
            label = self.ident().text
            self.expect("=")
            if is_type_label(label):
                ty = self.type_()
                d: Def = TypeDef(label, ty, self.span_from(start))
            else:
                v = self.stable()
                d = FieldDef(label, v, self.span_from(start))
            if label in seen:
                raise self.error(f"duplicate definition of '{label}'", start, "AndDef-I")
            seen.add(label)
            out.append(d)
            if not self.at(";"):
                break
            self.advance()
        return out

    def members(self, closer: str) -> list[SugarMember]:
        out: list[SugarMember] = []
        while not self.at(closer):
            start = self.tok
            label = self.ident().text
            annot = None
            if is_type_label(label):
                self.expect("=")
                value: Union[Stable, Type] = self.type_()
            else:
                if self.at(":"):
                    self.advance()
                    annot = self.type_()
                self.expect("=")
                value = self.stable()
            out.append(SugarMember(label, value, annot, self.span_from(start)))
            if not self.at(";"):
                break
            self.advance()
        return out


def _source(src: Union[str, SourceProgram], origin: Optional[str]) -> SourceProgram:
    if isinstance(src, SourceProgram):
        return src
    return SourceProgram(src, origin or "<input>")


def parse_program(src: Union[str, SourceProgram], origin: Optional[str] = None) -> Term:
    """Parse a closed program; raises ParseError with a located diagnostic."""
    prog = _source(src, origin)
    p = Parser(prog.text, prog.origin)
    t = p.term()
    p.finish()
    return t


def parse_term(text: str, free: Iterable[str] = (), origin: str = "<input>") -> Term:
    p = Parser(text, origin, free)
    t = p.term()
    p.finish()
    return t


def parse_type(text: str, free: Iterable[str] = (), origin: str = "<input>") -> Type:
    p = Parser(text, origin, free)
    t = p.type_()
    p.finish()
    return t


def parse_path(text: str, free: Iterable[str] = (), origin: str = "<input>") -> Path:
    p = Parser(text, origin, free)
    t = p.path()
    p.finish()
    return t
