"""Abstract syntax of pDOT with a locally nameless treatment of binders.

Free variables are names; a variable bound by an enclosing binder is a
de Bruijn index counting binders outward (0 is the innermost).  Binder
names are kept only as printing hints and never take part in equality,
so structural equality of nodes is alpha-equivalence.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Union

from .diagnostics import Span


@dataclass(frozen=True)
class Free:
    """A free variable."""

    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Bound:
    """A bound variable, as a de Bruijn index."""

    index: int

    def __str__(self) -> str:
        return f"#{self.index}"


Var = Union[Free, Bound]


@dataclass(frozen=True)
class Path:
    """A variable followed by field selections, e.g. ``x.a.b``."""

    root: Var
    fields: tuple[str, ...] = ()
    span: Optional[Span] = field(default=None, compare=False, repr=False)

    def sel(self, label: str) -> Path:
        return Path(self.root, self.fields + (label,))

    def extend(self, labels: tuple[str, ...]) -> Path:
        return Path(self.root, self.fields + tuple(labels)) if labels else self

    @property
    def is_var(self) -> bool:
        return not self.fields

    @property
    def name(self) -> str:
        assert isinstance(self.root, Free), "bound path has no name"
        return self.root.name

    @property
    def parent(self) -> Path:
        return Path(self.root, self.fields[:-1])

    def prefixes(self) -> Iterator[Path]:
        """Every prefix, shortest (the root) first, ending with the path itself."""
        for n in range(len(self.fields) + 1):
            yield Path(self.root, self.fields[:n])

    def has_prefix(self, p: Path) -> bool:
        n = len(p.fields)
        return self.root == p.root and self.fields[:n] == p.fields

    def __str__(self) -> str:
        return ".".join([str(self.root), *self.fields])


def var(name: str) -> Path:
    return Path(Free(name))


def path(text: str) -> Path:
    """Build a free path from dotted text: ``path("x.a.b")``."""
    root, *labels = text.split(".")
    return Path(Free(root), tuple(labels))


# Types


class Type:
    """Base class of the nine type forms."""

    __slots__ = ()


@dataclass(frozen=True)
class Top(Type):
    pass


@dataclass(frozen=True)
class Bot(Type):
    pass


@dataclass(frozen=True)
class Fld(Type):
    """Field declaration ``{a: T}``."""

    label: str
    type: Type


@dataclass(frozen=True)
class TypDecl(Type):
    """Type member declaration ``{A: S..U}``."""

    label: str
    lower: Type
    upper: Type


@dataclass(frozen=True)
class Sel(Type):
    """Type projection ``p.A``."""

    path: Path
    label: str


@dataclass(frozen=True)
class Sngl(Type):
    """Singleton type ``p.type``."""

    path: Path


@dataclass(frozen=True)
class And(Type):
    left: Type
    right: Type


@dataclass(frozen=True)
class Rec(Type):
    """Recursive type ``mu(x: T)``; index 0 in ``body`` is the self variable."""

    body: Type
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True)
class All(Type):
    """Dependent function type ``all(x: S) T``; index 0 in ``body`` is the parameter."""

    param: Type
    body: Type
    hint: str = field(default="x", compare=False)


TOP = Top()
BOT = Bot()


def and_all(types: list[Type]) -> Type:
    """Left-nested intersection of a nonempty list, or Top for an empty one."""
    if not types:
        return TOP
    out = types[0]
    for t in types[1:]:
        out = And(out, t)
    return out


def conjuncts(t: Type) -> list[Type]:
    if isinstance(t, And):
        return conjuncts(t.left) + conjuncts(t.right)
    return [t]


# Terms, values and definitions


@dataclass(frozen=True)
class Lam:
    """``lam(x: T) t``."""

    param: Type
    body: Term
    hint: str = field(default="x", compare=False)
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class FieldDef:
    """``a = s`` where ``s`` is a path or a value."""

    label: str
    value: Stable
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class TypeDef:
    """``A = T``."""

    label: str
    type: Type
    span: Optional[Span] = field(default=None, compare=False, repr=False)


Def = Union[FieldDef, TypeDef]
DefList = tuple[Def, ...]


@dataclass(frozen=True)
class Obj:
    """``nu(x: T){ d }``; index 0 in ``self_type`` and ``defs`` is the self variable."""

    self_type: Type
    defs: DefList
    hint: str = field(default="x", compare=False)
    span: Optional[Span] = field(default=None, compare=False, repr=False)

    def lookup(self, label: str) -> Optional[Def]:
        for d in self.defs:
            if d.label == label:
                return d
        return None


@dataclass(frozen=True)
class App:
    """``p q``."""

    fun: Path
    arg: Path
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Let:
    """``let x = t in u``, optionally ascribing the type of ``u``.

    Index 0 in ``body`` is ``x``.  The annotation lives outside the scope
    of ``x``, which is what the Let rule's side condition demands.
    """

    bound: Term
    body: Term
    hint: str = field(default="x", compare=False)
    annot: Optional[Type] = None
    span: Optional[Span] = field(default=None, compare=False, repr=False)


Value = Union[Lam, Obj]
Stable = Union[Path, Lam, Obj]
Term = Union[Path, Lam, Obj, App, Let]
Node = Union[Type, Term, Def, DefList]


def is_value(t: object) -> bool:
    return isinstance(t, (Lam, Obj))


def labels_of(defs: DefList) -> list[str]:
    return [d.label for d in defs]


# Generic traversal

PathFn = Callable[[Path, int], Path]


def map_paths(node, f: PathFn, depth: int = 0):
    """Rebuild ``node`` with every path replaced by ``f(path, depth)``.

    ``depth`` counts the binders crossed so far.
    """
    match node:
        case Path():
            return f(node, depth)
        case Top() | Bot():
            return node
        case Fld(label, t):
            return Fld(label, map_paths(t, f, depth))
        case TypDecl(label, lo, hi):
            return TypDecl(label, map_paths(lo, f, depth), map_paths(hi, f, depth))
        case Sel(p, label):
            return Sel(f(p, depth), label)
        case Sngl(p):
            return Sngl(f(p, depth))
        case And(l, r):
            return And(map_paths(l, f, depth), map_paths(r, f, depth))
        case Rec(body):
            return Rec(map_paths(body, f, depth + 1), node.hint)
        case All(param, body):
            return All(map_paths(param, f, depth), map_paths(body, f, depth + 1), node.hint)
        case Lam(param, body):
            return Lam(map_paths(param, f, depth), map_paths(body, f, depth + 1),
                       node.hint, node.span)
        case Obj(self_type, defs):
            return Obj(map_paths(self_type, f, depth + 1), map_paths(defs, f, depth + 1),
                       node.hint, node.span)
        case App(p, q):
            return App(f(p, depth), f(q, depth), node.span)
        case Let(bound, body):
            annot = None if node.annot is None else map_paths(node.annot, f, depth)
            return Let(map_paths(bound, f, depth), map_paths(body, f, depth + 1),
                       node.hint, annot, node.span)
        case FieldDef(label, value):
            return FieldDef(label, map_paths(value, f, depth), node.span)
        case TypeDef(label, t):
            return TypeDef(label, map_paths(t, f, depth), node.span)
        case tuple():
            return tuple(map_paths(d, f, depth) for d in node)
    raise TypeError(f"not a syntax node: {node!r}")


def iter_paths(node, depth: int = 0) -> Iterator[tuple[Path, int]]:
    """Every path occurrence in ``node`` with its binder depth, left to right."""
    match node:
        case Path():
            yield node, depth
        case Top() | Bot():
            return
        case Fld(_, t):
            yield from iter_paths(t, depth)
        case TypDecl(_, lo, hi):
            yield from iter_paths(lo, depth)
            yield from iter_paths(hi, depth)
        case Sel(p, _) | Sngl(p):
            yield p, depth
        case And(l, r):
            yield from iter_paths(l, depth)
            yield from iter_paths(r, depth)
        case Rec(body):
            yield from iter_paths(body, depth + 1)
        case All(param, body) | Lam(param, body):
            yield from iter_paths(param, depth)
            yield from iter_paths(body, depth + 1)
        case Obj(self_type, defs):
            yield from iter_paths(self_type, depth + 1)
            yield from iter_paths(defs, depth + 1)
        case App(p, q):
            yield p, depth
            yield q, depth
        case Let(bound, body):
            yield from iter_paths(bound, depth)
            yield from iter_paths(body, depth + 1)
            if node.annot is not None:
                yield from iter_paths(node.annot, depth)
        case FieldDef(_, value):
            yield from iter_paths(value, depth)
        case TypeDef(_, t):
            yield from iter_paths(t, depth)
        case tuple():
            for d in node:
                yield from iter_paths(d, depth)
        case _:
            raise TypeError(f"not a syntax node: {node!r}")


# Binding operations


def open_at(node, k: int, p: Path):
    """Replace bound index ``k`` (as seen from the top of ``node``) by path ``p``."""
    if not isinstance(p.root, Free):
        raise ValueError("can only open with a free-rooted path")

    def f(r: Path, depth: int) -> Path:
        if r.root == Bound(k + depth):
            return p.extend(r.fields)
        return r

    return map_paths(node, f)


def open_with_path(body, p: Path):
    """Instantiate the outermost bound slot of a binder body with ``p``."""
    return open_at(body, 0, p)


def close(node, name: str):
    """Abstract the free name ``name``: the inverse of opening with ``var(name)``."""
    target = Free(name)

    def f(r: Path, depth: int) -> Path:
        if r.root == target:
            return Path(Bound(depth), r.fields)
        return r

    return map_paths(node, f)


def subst_name(x: str, p: Path, target):
    """Rewrite every path rooted at free ``x`` to start with ``p`` instead."""
    root = Free(x)

    def f(r: Path, depth: int) -> Path:
        if r.root == root:
            return p.extend(r.fields)
        return r

    return map_paths(target, f)


def free_names(target) -> set[str]:
    return {r.root.name for r, _ in iter_paths(target) if isinstance(r.root, Free)}


def free_paths(target) -> list[Path]:
    """Free-rooted path occurrences, deduplicated, in first-seen order."""
    seen: dict[Path, None] = {}
    for r, _ in iter_paths(target):
        if isinstance(r.root, Free):
            seen.setdefault(r, None)
    return list(seen)


def is_locally_closed(node) -> bool:
    return all(not isinstance(r.root, Bound) or r.root.index < depth
               for r, depth in iter_paths(node))


# Replacement of path prefixes


def replace_prefix(p: Path, q: Path, r: Path) -> Optional[Path]:
    """``p.bs`` becomes ``q.bs``; anything not starting with ``p`` gives None."""
    if r.has_prefix(p):
        return q.extend(r.fields[len(p.fields):])
    return None


def repl_candidates(p: Path, q: Path, t: Type) -> set[Type]:
    """All types obtained from ``t`` by rewriting exactly one ``p``-prefixed path."""
    match t:
        case Sel(r, label):
            r2 = replace_prefix(p, q, r)
            return set() if r2 is None else {Sel(r2, label)}
        case Sngl(r):
            r2 = replace_prefix(p, q, r)
            return set() if r2 is None else {Sngl(r2)}
        case And(l, r):
            return ({And(l2, r) for l2 in repl_candidates(p, q, l)}
                    | {And(l, r2) for r2 in repl_candidates(p, q, r)})
        case Rec(body):
            return {Rec(b, t.hint) for b in repl_candidates(p, q, body)}
        case All(param, body):
            return ({All(s, body, t.hint) for s in repl_candidates(p, q, param)}
                    | {All(param, b, t.hint) for b in repl_candidates(p, q, body)})
        case Fld(label, u):
            return {Fld(label, u2) for u2 in repl_candidates(p, q, u)}
        case TypDecl(label, lo, hi):
            return ({TypDecl(label, lo2, hi) for lo2 in repl_candidates(p, q, lo)}
                    | {TypDecl(label, lo, hi2) for hi2 in repl_candidates(p, q, hi)})
    return set()


def repl_all(p: Path, q: Path, t: Type) -> Type:
    """Rewrite every ``p``-prefixed path in ``t`` until none is left.

    Rejects the case where ``q`` itself starts with ``p``, since the
    rewriting would then never run out of ``p``-prefixed paths.
    """
    if q.has_prefix(p):
        raise ValueError(f"repl_all: {p} is a prefix of {q}")

    def f(r: Path, depth: int) -> Path:
        while r.has_prefix(p):
            r = replace_prefix(p, q, r)
        return r

    return map_paths(t, f)


def node_size(node) -> int:
    """A rough size measure, used to bound generated test inputs."""
    match node:
        case Path() | Top() | Bot() | Sel() | Sngl():
            return 1
        case Fld(_, t) | Rec(t) | TypeDef(_, t):
            return 1 + node_size(t)
        case TypDecl(_, lo, hi):
            return 1 + node_size(lo) + node_size(hi)
        case And(l, r) | All(l, r) | Lam(l, r) | Let(l, r):
            return 1 + node_size(l) + node_size(r)
        case Obj(s, ds):
            return 1 + node_size(s) + node_size(ds)
        case App():
            return 1
        case FieldDef(_, v):
            return 1 + node_size(v)
        case tuple():
            return sum(node_size(d) for d in node)
    raise TypeError(f"not a syntax node: {node!r}")
