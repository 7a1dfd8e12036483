"""Structural predicates on types and the precise (elimination) path typing.

Everything here is a plain function of the environment: tight bounds,
record and inert types, the ``⊢!`` closure of a path's type, alias
chains through singleton types, and member bounds read off precise types.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Union

from ..syntax import (
    All, And, Fld, Free, Path, Rec, Sngl, Type, TypDecl, free_paths, open_with_path, var,
)
from .derivation import Env

# Shape predicates


def tight_bounds(t: Type) -> bool:
    """Every type member reachable through Rec/Fld/And has equal bounds."""
    match t:
        case TypDecl(_, lo, hi):
            return lo == hi
        case Rec(body) | Fld(_, body):
            return tight_bounds(body)
        case And(l, r):
            return tight_bounds(l) and tight_bounds(r)
    return True


def record_type(t: Type) -> bool:
    """An intersection of ``{A: T..T}``, ``{a: q.type}`` and ``{a: T}`` with T inert."""
    match t:
        case TypDecl(_, lo, hi):
            return lo == hi
        case Fld(_, Sngl()):
            return True
        case Fld(_, u):
            return inert(u)
        case And(l, r):
            return record_type(l) and record_type(r)
    return False


def inert(t: Type) -> bool:
    match t:
        case All():
            return True
        case Rec(body):
            return record_type(body)
    return False


def inert_env(env: Env) -> bool:
    return all(inert(t) for _, t in env)


# Precise typing


def _eliminate(types: Iterable[Type], p: Path) -> list[Type]:
    """Close a set of types of ``p`` under Rec-E and And-elimination."""
    out: dict[Type, None] = {}
    work = deque(types)
    while work:
        t = work.popleft()
        if t in out:
            continue
        out[t] = None
        if isinstance(t, And):
            work.extend((t.left, t.right))
        elif isinstance(t, Rec):
            work.append(open_with_path(t.body, p))
    return list(out)


def precise_types(env: Env, p: Path) -> list[Type]:
    """The types of ``p`` under the elimination-only relation, in discovery order."""
    if not isinstance(p.root, Free):
        return []
    t = env.get(p.root.name)
    if t is None:
        return []
    prefix = Path(p.root)
    current = _eliminate([t], prefix)
    for label in p.fields:
        prefix = prefix.sel(label)
        fields = [u.type for u in current if isinstance(u, Fld) and u.label == label]
        if not fields:
            return []
        current = _eliminate(fields, prefix)
    return current


def precise_singleton(env: Env, p: Path) -> Optional[Path]:
    for t in precise_types(env, p):
        if isinstance(t, Sngl):
            return t.path
    return None


# Alias chains


@dataclass(frozen=True)
class Canonical:
    """The chain stops at ``path``, which has no usable singleton type."""

    path: Path


@dataclass(frozen=True)
class Cyclic:
    """The chain revisits these paths forever."""

    paths: frozenset[Path]

    @property
    def representative(self) -> Path:
        return min(self.paths, key=lambda q: (len(q.fields), str(q)))


PathResolution = Union[Canonical, Cyclic]


@dataclass(frozen=True)
class AliasStep:
    """``before`` = ``prefix``.suffix is rewritten to ``target``.suffix = ``after``."""

    before: Path
    prefix: Path
    target: Path
    after: Path


StepFn = Callable[[Path], Optional[AliasStep]]


def first_alias(p: Path, singleton: Callable[[Path], Optional[Path]]) -> Optional[AliasStep]:
    """Rewrite the shortest prefix of ``p`` that has a singleton type."""
    for pre in p.prefixes():
        q = singleton(pre)
        if q is not None:
            return AliasStep(p, pre, q, q.extend(p.fields[len(pre.fields):]))
    return None


def follow_chain(p: Path, step: StepFn) -> tuple[PathResolution, list[AliasStep]]:
    """Walk alias steps from ``p`` until a fixed point or a repeat."""
    visited: list[Path] = []
    steps: list[AliasStep] = []
    cur = p
    while True:
        if cur in visited:
            i = visited.index(cur)
            return Cyclic(frozenset(visited[i:])), steps
        for i, seen in enumerate(visited):
            if cur.has_prefix(seen):
                # the chain from `seen` reached an extension of itself, so it
                # would keep growing without ever repeating
                return Cyclic(frozenset(visited[i:])), steps
        visited.append(cur)
        s = step(cur)
        if s is None:
            return Canonical(cur), steps
        steps.append(s)
        cur = s.after


def precise_typeable(env: Env, p: Path, _busy: Optional[set] = None) -> bool:
    """Whether ``p`` has a type under precise typing with singleton propagation."""
    busy = set() if _busy is None else _busy
    if precise_types(env, p):
        return True
    if p in busy or len(busy) > 256:
        return False
    busy.add(p)
    try:
        s = first_alias(p, lambda pre: precise_singleton(env, pre))
        if s is None or s.prefix == p:
            return False
        # Sngl-E needs each extension of the target to be typeable
        cur = s.target
        for label in p.fields[len(s.prefix.fields):]:
            cur = cur.sel(label)
            if not precise_typeable(env, cur, busy):
                return False
        return True
    finally:
        busy.discard(p)


def precise_step(env: Env) -> StepFn:
    def step(p: Path) -> Optional[AliasStep]:
        s = first_alias(p, lambda pre: precise_singleton(env, pre))
        if s is None or not precise_typeable(env, s.target):
            return None
        return s

    return step


def canonical_path(env: Env, p: Path) -> PathResolution:
    """Resolve ``p`` along its chain of precise singleton types."""
    return follow_chain(p, precise_step(env))[0]


def member_bounds(env: Env, p: Path, label: str) -> Optional[tuple[Type, Type]]:
    """Bounds of type member ``label`` on the canonical representative of ``p``."""
    res = canonical_path(env, p)
    if isinstance(res, Cyclic):
        return None
    for t in precise_types(env, res.path):
        if isinstance(t, TypDecl) and t.label == label:
            return t.lower, t.upper
    return None


def reachable_paths(env: Env, name: str) -> list[tuple[Path, list[Type]]]:
    """Paths reachable from ``name`` by declared fields, with their precise types."""
    out: list[tuple[Path, list[Type]]] = []
    work = deque([var(name)])
    seen: set[Path] = set()
    while work:
        p = work.popleft()
        if p in seen:
            continue
        seen.add(p)
        types = precise_types(env, p)
        out.append((p, types))
        for t in types:
            if isinstance(t, Fld):
                work.append(p.sel(t.label))
    return out


def untypeable_paths(env: Env) -> list[Path]:
    """Paths mentioned in the environment's types that have no precise type."""
    bad: dict[Path, None] = {}
    for name, _ in env:
        for _, types in reachable_paths(env, name):
            for t in types:
                for q in free_paths(t):
                    if q not in bad and not precise_typeable(env, q):
                        bad[q] = None
    return list(bad)
