"""Brute-force reference implementations used to derive expected values.

None of these reuse the traversals, lookup or alias machinery of the
package: they walk dataclass fields generically and enumerate finite
universes instead.  They are slow and only meant for small inputs.
"""
from __future__ import annotations

import dataclasses
from itertools import product
from typing import Callable, Optional

from pdot.syntax import (
    And, Bound, FieldDef, Fld, Free, Lam, Obj, Path, Rec, Sngl, Type, TypeDef,
)

# Replacement


def _children(node):
    """(field name, value) pairs that take part in equality."""
    return [(f.name, getattr(node, f.name)) for f in dataclasses.fields(node) if f.compare]


def occurrences(t) -> list[tuple[Path, Callable[[Path], object]]]:
    """Every path occurrence in ``t`` with a function that rebuilds ``t`` around a new path."""
    if isinstance(t, Path):
        return [(t, lambda new: new)]
    if not dataclasses.is_dataclass(t):
        return []
    out = []
    for name, child in _children(t):
        for occ, rebuild in occurrences(child):
            out.append((occ, lambda new, name=name, rebuild=rebuild:
                        dataclasses.replace(t, **{name: rebuild(new)})))
    return out


def starts_with(r: Path, p: Path) -> bool:
    return r.root == p.root and r.fields[:len(p.fields)] == p.fields


def ref_candidates(p: Path, q: Path, t: Type) -> set:
    """Replace exactly one ``p``-prefixed occurrence, in every possible way."""
    return {rebuild(Path(q.root, q.fields + r.fields[len(p.fields):]))
            for r, rebuild in occurrences(t) if starts_with(r, p)}


def ref_repl_fixpoints(p: Path, q: Path, t: Type) -> set:
    """All end points of single replacements iterated in every order."""
    done, seen, frontier = set(), {t}, [t]
    while frontier:
        nxt = []
        for u in frontier:
            cands = ref_candidates(p, q, u)
            if not cands:
                done.add(u)
            for c in cands - seen:
                seen.add(c)
                nxt.append(c)
        frontier = nxt
    return done


# Precise typing and alias chains


def _close_types(types, p: Path) -> set:
    """Close under And-elimination and Rec-E opened with ``p``."""
    out, todo = set(), list(types)
    while todo:
        t = todo.pop()
        if t in out:
            continue
        out.add(t)
        if isinstance(t, And):
            todo += [t.left, t.right]
        elif isinstance(t, Rec):
            todo.append(_instantiate(t.body, 0, p))
    return out


def _instantiate(node, k: int, p: Path):
    """Substitute ``p`` for bound index ``k``, tracking binder depth generically."""
    if isinstance(node, Path):
        if node.root == Bound(k):
            return Path(p.root, p.fields + node.fields)
        return node
    if isinstance(node, tuple):
        return tuple(_instantiate(d, k, p) for d in node)
    if not dataclasses.is_dataclass(node):
        return node
    changes = {}
    for name, child in _children(node):
        inner = k + 1 if _binds(node, name) else k
        changes[name] = _instantiate(child, inner, p)
    return dataclasses.replace(node, **changes)


def _binds(node, name: str) -> bool:
    return (name == "body" and type(node).__name__ in ("Rec", "All", "Lam", "Let")
            or name in ("self_type", "defs") and isinstance(node, Obj))


def ref_precise(env: dict, p: Path) -> set:
    """Var, then Fld-E per label, each followed by the closure."""
    if not isinstance(p.root, Free) or p.root.name not in env:
        return set()
    cur = Path(p.root)
    types = _close_types([env[p.root.name]], cur)
    for label in p.fields:
        cur = Path(cur.root, cur.fields + (label,))
        types = _close_types([t.type for t in types if isinstance(t, Fld) and t.label == label], cur)
        if not types:
            return set()
    return types


def ref_singleton(env: dict, p: Path) -> Optional[Path]:
    targets = sorted((t.path for t in ref_precise(env, p) if isinstance(t, Sngl)), key=str)
    return targets[0] if targets else None


def ref_alias_graph(env: dict, universe: list[Path]) -> dict:
    """One alias step for every path of the universe that has one.

    A path steps by its shortest prefix with a singleton type, provided
    the target is typeable by some finite chain inside the universe.
    """
    def rewrite(r: Path) -> Optional[Path]:
        for n in range(len(r.fields) + 1):
            q = ref_singleton(env, Path(r.root, r.fields[:n]))
            if q is not None:
                return Path(q.root, q.fields + r.fields[n:])
        return None

    raw = {r: rewrite(r) for r in universe}
    typeable = {r for r in universe if ref_precise(env, r)}
    changed = True
    while changed:
        changed = False
        for r, nxt in raw.items():
            if r not in typeable and nxt in typeable:
                typeable.add(r)
                changed = True
    graph = {}
    for r, nxt in raw.items():
        if nxt is None:
            continue
        pre = next(Path(r.root, r.fields[:n]) for n in range(len(r.fields) + 1)
                   if ref_singleton(env, Path(r.root, r.fields[:n])) is not None)
        if ref_singleton(env, pre) in typeable:
            graph[r] = nxt
    return graph


def path_universe(names, labels, depth: int) -> list[Path]:
    out = []
    for n in range(depth + 1):
        for fs in product(sorted(labels), repeat=n):
            out += [Path(Free(x), fs) for x in sorted(names)]
    return out


def ref_chain(env: dict, p: Path, depth: int = 4):
    """('canonical', q) or ('cyclic', paths) by walking the alias graph."""
    labels = {lab for t in env.values() for lab in _field_labels(t)}
    graph = ref_alias_graph(env, path_universe(env, labels, depth))
    seq, cur = [], p
    while cur not in seq:
        seq.append(cur)
        if cur not in graph:
            return "canonical", cur
        cur = graph[cur]
    return "cyclic", frozenset(seq[seq.index(cur):])


def _field_labels(node) -> set:
    if isinstance(node, Fld):
        return {node.label} | _field_labels(node.type)
    if isinstance(node, tuple):
        return set().union(*map(_field_labels, node)) if node else set()
    if dataclasses.is_dataclass(node):
        return set().union(*(_field_labels(c) for _, c in _children(node)))
    return set()


# Lookup


def ref_lookup_facts(store: dict, depth: int = 4) -> dict:
    """The single-step lookup relation on every path of bounded length, by fixpoint."""
    labels = set()
    for v in store.values():
        if isinstance(v, Obj):
            labels |= _def_labels(v)
    universe = path_universe(store, labels, depth)
    facts: dict = {}
    changed = True
    while changed:
        changed = False
        for r in universe:
            if r in facts:
                continue
            out = None
            if not r.fields:
                out = store.get(r.root.name)
            else:
                parent = Path(r.root, r.fields[:-1])
                prev = facts.get(parent)
                if isinstance(prev, Path):
                    out = Path(prev.root, prev.fields + (r.fields[-1],))
                elif isinstance(prev, Obj):
                    for d in prev.defs:
                        if isinstance(d, FieldDef) and d.label == r.fields[-1]:
                            out = _instantiate(d.value, 0, parent)
            if out is not None:
                facts[r] = out
                changed = True
    return facts


def _def_labels(v) -> set:
    out = set()
    if isinstance(v, Obj):
        for d in v.defs:
            if isinstance(d, FieldDef):
                out.add(d.label)
                out |= _def_labels(d.value)
    elif isinstance(v, Lam):
        pass
    return out


def ref_lookup_star(store: dict, p: Path, depth: int = 4):
    """('value', v) or ('cycle', paths) or ('stuck', None)."""
    facts = ref_lookup_facts(store, depth)
    seq, cur = [], p
    while not isinstance(cur, (Lam, Obj)):
        if cur in seq:
            return "cycle", frozenset(seq[seq.index(cur):])
        seq.append(cur)
        if cur not in facts:
            return "stuck", None
        cur = facts[cur]
    return "value", cur


__all__ = [
    "occurrences", "ref_candidates", "ref_repl_fixpoints", "ref_precise", "ref_chain",
    "ref_lookup_facts", "ref_lookup_star", "path_universe", "TypeDef",
]
