"""Stores, path lookup, small-step reduction and the run/trace drivers."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Union

from .printer import pretty
from .syntax import App, Lam, Let, Obj, Path, Stable, Term, Value, is_value, open_with_path, var

DEFAULT_RUN_FUEL = 100_000
DEFAULT_LOOKUP_FUEL = 10_000


class Store:
    """An append-only map from names to values, kept in allocation order."""

    __slots__ = ("bindings", "_map", "_hash")

    def __init__(self, bindings=()):
        self.bindings: tuple[tuple[str, Value], ...] = tuple(bindings)
        self._map = dict(self.bindings)
        if len(self._map) != len(self.bindings):
            raise ValueError("duplicate name in store")
        self._hash = hash(self.bindings)

    def get(self, name: str) -> Optional[Value]:
        return self._map.get(name)

    def extend(self, name: str, v: Value) -> Store:
        if name in self._map:
            raise ValueError(f"'{name}' is already allocated")
        return Store(self.bindings + ((name, v),))

    def fresh(self, hint: str) -> str:
        """``hint``, else ``hint$1``, ``hint$2`` and so on."""
        if hint not in self._map:
            return hint
        n = 1
        while f"{hint}${n}" in self._map:
            n += 1
        return f"{hint}${n}"

    def names(self) -> list[str]:
        return [n for n, _ in self.bindings]

    def __contains__(self, name: str) -> bool:
        return name in self._map

    def __iter__(self) -> Iterator[tuple[str, Value]]:
        return iter(self.bindings)

    def __len__(self) -> int:
        return len(self.bindings)

    def __eq__(self, other) -> bool:
        return isinstance(other, Store) and (self is other or self.bindings == other.bindings)

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Store({self.names()})"


@dataclass(frozen=True)
class Configuration:
    store: Store
    term: Term


# Path lookup


@dataclass(frozen=True)
class LookupFact:
    """One derived single-step lookup ``source ↝ target``."""

    rule: str
    source: Stable
    target: Stable

    def __str__(self) -> str:
        return f"{self.rule}: {pretty(self.source)} ~> {pretty(self.target)}"


@dataclass(frozen=True)
class Found:
    value: Value
    steps: int = 0


@dataclass(frozen=True)
class Cycle:
    paths: frozenset


@dataclass(frozen=True)
class LookupStuck:
    reason: str


@dataclass(frozen=True)
class FuelOut:
    fuel: int


LookupOutcome = Union[Found, Cycle, LookupStuck, FuelOut]


def _lookup_step(store: Store, s: Stable, facts: Optional[list]) -> Optional[Stable]:
    if not isinstance(s, Path):
        return None
    if s.is_var:
        out = store.get(s.name)
        rule = "Lookup-Step-Var"
    else:
        prev = _lookup_step(store, s.parent, facts)
        if prev is None:
            return None
        label = s.fields[-1]
        if isinstance(prev, Path):
            out, rule = prev.sel(label), "Lookup-Step-Path"
        elif isinstance(prev, Obj):
            d = prev.lookup(label)
            if d is None or not hasattr(d, "value"):
                return None
            out, rule = open_with_path(d.value, s.parent), "Lookup-Step-Val"
        else:
            return None
    if out is not None and facts is not None:
        facts.append(LookupFact(rule, s, out))
    return out


def lookup_step(store: Store, s: Stable) -> Optional[Stable]:
    """The unique ``s'`` with ``store ⊢ s ↝ s'``, if any."""
    return _lookup_step(store, s, None)


def lookup_star(store: Store, s: Stable, fuel: int = DEFAULT_LOOKUP_FUEL,
                trace: Optional[list] = None) -> LookupOutcome:
    """Iterate lookup to a value, detecting revisited paths.

    When ``trace`` is given, every single-step fact used along the way is
    appended to it, sub-derivations first.
    """
    visited: list[Stable] = []
    cur = s
    steps = 0
    while True:
        if is_value(cur):
            return Found(cur, steps)
        if cur in visited:
            return Cycle(frozenset(visited[visited.index(cur):]))
        if steps >= fuel:
            return FuelOut(fuel)
        visited.append(cur)
        nxt = _lookup_step(store, cur, trace)
        if nxt is None:
            return LookupStuck(f"no lookup step applies to '{pretty(cur)}'")
        cur = nxt
        steps += 1


# Reduction


class StuckError(Exception):
    pass


def _step(c: Configuration, lookup_fuel: int) -> Optional[tuple[Configuration, str]]:
    t, store = c.term, c.store
    match t:
        case App(p, q):
            res = lookup_star(store, p, lookup_fuel)
            if isinstance(res, Found) and isinstance(res.value, Lam):
                return Configuration(store, open_with_path(res.value.body, q)), "Apply"
            raise StuckError(f"cannot apply '{p}': {_describe(res)}")
        case Let(bound, body):
            if isinstance(bound, Path):
                return Configuration(store, open_with_path(body, bound)), "Let-Path"
            if is_value(bound):
                x = store.fresh(t.hint)
                return Configuration(store.extend(x, bound), open_with_path(body, var(x))), "Let-Value"
            inner = _step(Configuration(store, bound), lookup_fuel)
            assert inner is not None
            nxt, _ = inner
            return Configuration(nxt.store, Let(nxt.term, body, t.hint, t.annot, t.span)), "Ctx"
    return None


def _describe(res: LookupOutcome) -> str:
    match res:
        case Found(v):
            return f"it is not a function but {pretty(v)}"
        case Cycle(paths):
            return "its lookup cycles through " + ", ".join(sorted(pretty(p) for p in paths))
        case LookupStuck(reason):
            return reason
        case FuelOut(n):
            return f"lookup ran out of fuel after {n} steps"
    return str(res)


def is_normal(t: Term) -> bool:
    return isinstance(t, Path) or is_value(t)


def step(c: Configuration, lookup_fuel: int = DEFAULT_LOOKUP_FUEL) -> Optional[Configuration]:
    """One reduction step; None on normal forms.  Raises StuckError when stuck."""
    r = _step(c, lookup_fuel)
    return None if r is None else r[0]


def step_rule(c: Configuration, lookup_fuel: int = DEFAULT_LOOKUP_FUEL
              ) -> Optional[tuple[Configuration, str]]:
    """Like ``step`` but also names the rule that fired."""
    return _step(c, lookup_fuel)


def extended_step(c: Configuration, lookup_fuel: int = DEFAULT_LOOKUP_FUEL
                  ) -> Optional[tuple[Configuration, str]]:
    """A reduction step, or one lookup step on a normal-form path."""
    r = _step(c, lookup_fuel)
    if r is not None:
        return r
    if isinstance(c.term, Path):
        facts: list[LookupFact] = []
        nxt = _lookup_step(c.store, c.term, facts)
        if nxt is not None:
            return Configuration(c.store, nxt), facts[-1].rule
    return None


# Drivers


@dataclass(frozen=True)
class ValueResult:
    value: Value
    steps: int
    store: Store = field(compare=False)


@dataclass(frozen=True)
class NormalPath:
    path: Path
    steps: int
    resolution: LookupOutcome
    store: Store = field(compare=False)


@dataclass(frozen=True)
class Diverged:
    fuel: int


@dataclass(frozen=True)
class Stuck:
    configuration: Configuration
    reason: str


RunOutcome = Union[ValueResult, NormalPath, Diverged, Stuck]


@dataclass(frozen=True)
class TraceEntry:
    index: int
    rule: Optional[str]
    configuration: Configuration

    def line(self) -> str:
        return f"{self.index}  rule={self.rule}  term={pretty(self.configuration.term)}"


def _finish(c: Configuration, steps: int, lookup_fuel: int) -> RunOutcome:
    if isinstance(c.term, Path):
        return NormalPath(c.term, steps, lookup_star(c.store, c.term, lookup_fuel), c.store)
    return ValueResult(c.term, steps, c.store)


def drive(t: Term, fuel: int = DEFAULT_RUN_FUEL, lookup_fuel: int = DEFAULT_LOOKUP_FUEL,
          on_step: Optional[Callable[[TraceEntry], None]] = None
          ) -> tuple[RunOutcome, Configuration]:
    """Reduce ``t`` for at most ``fuel`` steps; return the outcome and the last configuration."""
    c = Configuration(Store(), t)
    if on_step is not None:
        on_step(TraceEntry(0, None, c))
    steps = 0
    while True:
        if is_normal(c.term):
            return _finish(c, steps, lookup_fuel), c
        if steps >= fuel:
            return Diverged(fuel), c
        try:
            c, rule = _step(c, lookup_fuel)
        except StuckError as e:
            return Stuck(c, str(e)), c
        steps += 1
        if on_step is not None:
            on_step(TraceEntry(steps, rule, c))


def run(t: Term, fuel: int = DEFAULT_RUN_FUEL, lookup_fuel: int = DEFAULT_LOOKUP_FUEL
        ) -> RunOutcome:
    """Reduce ``t`` to a normal form, or give up after ``fuel`` steps."""
    return drive(t, fuel, lookup_fuel)[0]


def trace(t: Term, fuel: int = DEFAULT_RUN_FUEL, lookup_fuel: int = DEFAULT_LOOKUP_FUEL
          ) -> tuple[list[TraceEntry], RunOutcome]:
    """Every configuration visited (the first with rule None) and the outcome."""
    entries: list[TraceEntry] = []
    outcome, _ = drive(t, fuel, lookup_fuel, entries.append)
    return entries, outcome
