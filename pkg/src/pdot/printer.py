"""Pretty-printing back to concrete syntax, and the JSON AST dump."""
from __future__ import annotations

import json

from .syntax import (
    All, And, App, Bot, FieldDef, Fld, Free, Lam, Let, Obj, Path, Rec, Sel, Sngl,
    Top, TypDecl, TypeDef, free_names,
)


class _Names:
    """Binder names in scope, renamed where a hint would shadow something."""

    def __init__(self, avoid: set[str]):
        self.avoid = avoid
        self.stack: list[str] = []

    def fresh(self, hint: str) -> str:
        taken = self.avoid | set(self.stack)
        if hint not in taken:
            return hint
        n = 1
        while f"{hint}{n}" in taken:
            n += 1
        return f"{hint}{n}"

    def push(self, hint: str) -> str:
        name = self.fresh(hint)
        self.stack.append(name)
        return name

    def pop(self) -> None:
        self.stack.pop()

    def var(self, v) -> str:
        if isinstance(v, Free):
            return v.name
        if v.index < len(self.stack):
            return self.stack[-1 - v.index]
        return f"#{v.index}"


def pretty(node) -> str:
    """Render a type, term or definition list in concrete syntax."""
    return _Printer(_Names(free_names(node))).show(node)


class _Printer:
    def __init__(self, names: _Names):
        self.names = names

    def path(self, p: Path) -> str:
        return ".".join([self.names.var(p.root), *p.fields])

    def bind(self, hint: str, body) -> tuple[str, str]:
        name = self.names.push(hint)
        try:
            return name, self.show(body)
        finally:
            self.names.pop()

    def show(self, node) -> str:
        match node:
            case Path():
                return self.path(node)
            case Top():
                return "Top"
            case Bot():
                return "Bot"
            case Fld(label, t):
                return f"{{{label}: {self.show(t)}}}"
            case TypDecl(label, lo, hi):
                return f"{{type {label}: {self.show(lo)}..{self.show(hi)}}}"
            case Sel(p, label):
                return f"{self.path(p)}.{label}"
            case Sngl(p):
                return f"{self.path(p)}.type"
            case And(l, r):
                left = self.show(l)
                if isinstance(l, All):
                    left = f"({left})"
                right = self.show(r)
                if isinstance(r, (And, All)):
                    right = f"({right})"
                return f"{left} /\\ {right}"
            case Rec(body):
                name, b = self.bind(node.hint, body)
                return f"mu({name}: {b})"
            case All(param, body):
                s = self.show(param)
                name, b = self.bind(node.hint, body)
                return f"all({name}: {s}) {b}"
            case Lam(param, body):
                s = self.show(param)
                name, b = self.bind(node.hint, body)
                return f"lam({name}: {s}) {b}"
            case Obj(self_type, defs):
                name = self.names.push(node.hint)
                try:
                    t = self.show(self_type)
                    ds = "; ".join(self.show(d) for d in defs)
                finally:
                    self.names.pop()
                return f"nu({name}: {t}){{{ds}}}"
            case App(p, q):
                return f"{self.path(p)} {self.path(q)}"
            case Let(bound, body):
                t = self.show(bound)
                name, u = self.bind(node.hint, body)
                if node.annot is None:
                    return f"let {name} = {t} in {u}"
                if isinstance(body, (Let, Lam)):
                    u = f"({u})"
                return f"let {name} = {t} in {u} : {self.show(node.annot)}"
            case FieldDef(label, value):
                return f"{label} = {self.show(value)}"
            case TypeDef(label, t):
                return f"{label} = {self.show(t)}"
            case tuple():
                return "; ".join(self.show(d) for d in node)
        raise TypeError(f"cannot print {node!r}")


# JSON dump


def to_json(node, names: list[str] | None = None):
    """A JSON-compatible tree with the node kind as a tag field."""
    names = [] if names is None else names

    def root(v):
        return v.name if isinstance(v, Free) else {"bound": v.index}

    def p(x: Path) -> dict:
        return {"root": root(x.root), "fields": list(x.fields)}

    match node:
        case Path():
            return {"path": p(node)}
        case Top():
            return {"type": "Top"}
        case Bot():
            return {"type": "Bot"}
        case Fld(label, t):
            return {"type": "Fld", "label": label, "field": to_json(t)}
        case TypDecl(label, lo, hi):
            return {"type": "TypDecl", "label": label, "lower": to_json(lo),
                    "upper": to_json(hi)}
        case Sel(x, label):
            return {"type": "Sel", "path": p(x), "label": label}
        case Sngl(x):
            return {"type": "Sngl", "path": p(x)}
        case And(l, r):
            return {"type": "And", "left": to_json(l), "right": to_json(r)}
        case Rec(body):
            return {"type": "Rec", "binder": node.hint, "body": to_json(body)}
        case All(param, body):
            return {"type": "All", "binder": node.hint, "param": to_json(param),
                    "body": to_json(body)}
        case Lam(param, body):
            return {"lam": node.hint, "param": to_json(param), "body": to_json(body)}
        case Obj(self_type, defs):
            return {"nu": node.hint, "self": to_json(self_type),
                    "defs": [to_json(d) for d in defs]}
        case App(f, a):
            return {"app": {"fun": p(f), "arg": p(a)}}
        case Let(bound, body):
            out = {"let": node.hint, "bound": to_json(bound), "body": to_json(body)}
            if node.annot is not None:
                out["annot"] = to_json(node.annot)
            return out
        case FieldDef(label, value):
            return {"field": label, "value": to_json(value)}
        case TypeDef(label, t):
            return {"typedef": label, "type": to_json(t)}
    raise TypeError(f"cannot dump {node!r}")


def dump_ast(node) -> str:
    """Deterministic JSON text for ``node``."""
    return json.dumps(to_json(node), indent=2, ensure_ascii=False)
