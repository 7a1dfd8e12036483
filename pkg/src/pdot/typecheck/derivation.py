"""Environments, judgement forms, derivation trees, verdicts and fuel."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from ..diagnostics import Diagnostic, Span
from ..syntax import DefList, Path, Term, Type


class Env:
    """An ordered typing environment; extension returns a new environment."""

    __slots__ = ("bindings", "_map", "_hash")

    def __init__(self, bindings=()):
        self.bindings: tuple[tuple[str, Type], ...] = tuple(bindings)
        self._map = dict(self.bindings)
        if len(self._map) != len(self.bindings):
            raise ValueError("duplicate name in environment")
        self._hash = hash(self.bindings)

    def extend(self, name: str, t: Type) -> Env:
        if name in self._map:
            raise ValueError(f"'{name}' is already bound")
        return Env(self.bindings + ((name, t),))

    def get(self, name: str) -> Optional[Type]:
        return self._map.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self._map

    def __iter__(self) -> Iterator[tuple[str, Type]]:
        return iter(self.bindings)

    def __len__(self) -> int:
        return len(self.bindings)

    def __eq__(self, other) -> bool:
        return isinstance(other, Env) and (self is other or self.bindings == other.bindings)

    def __hash__(self) -> int:
        return self._hash

    def names(self) -> list[str]:
        return [n for n, _ in self.bindings]

    def fresh(self, hint: str, avoid: set[str] = frozenset()) -> str:
        """``hint`` itself if unused, otherwise ``hint'``, ``hint''`` and so on."""
        name = hint
        while name in self._map or name in avoid:
            name += "'"
        return name

    def __repr__(self) -> str:
        return f"Env({self.names()})"


EMPTY = Env()


# Judgement forms


@dataclass(frozen=True)
class HasType:
    """Γ ⊢ t : T"""

    env: Env
    term: Term
    type: Type


@dataclass(frozen=True)
class Subtype:
    """Γ ⊢ S <: T"""

    env: Env
    lower: Type
    upper: Type


@dataclass(frozen=True)
class DefsType:
    """p; Γ ⊢ d : T"""

    env: Env
    path: Path
    defs: DefList
    type: Type


@dataclass(frozen=True)
class Typeable:
    """Γ ⊢ p, i.e. the path has some type."""

    env: Env
    path: Path


Judgement = Union[HasType, Subtype, DefsType, Typeable]


@dataclass(frozen=True, eq=False)
class Deriv:
    """A derivation node: a rule name, its conclusion and its premises."""

    rule: str
    concl: Judgement
    premises: tuple[Deriv, ...] = ()
    fresh: Optional[str] = None

    def nodes(self) -> Iterator[Deriv]:
        stack = [self]
        while stack:
            d = stack.pop()
            yield d
            stack.extend(reversed(d.premises))

    def rules(self) -> list[str]:
        return [d.rule for d in self.nodes()]

    def size(self) -> int:
        return sum(1 for _ in self.nodes())


# Verdicts


@dataclass(frozen=True)
class Yes:
    """The query holds; ``deriv`` is the evidence (None for environment checks)."""

    deriv: Optional[Deriv]
    type: Optional[Type] = None

    @property
    def rules(self) -> list[str]:
        return [] if self.deriv is None else self.deriv.rules()


@dataclass(frozen=True)
class No:
    """The algorithm found no derivation."""

    reason: str
    rule: str = "Sub"
    span: Optional[Span] = field(default=None, compare=False)

    def diagnostic(self, origin: str = "<input>") -> Diagnostic:
        return Diagnostic(self.reason, self.rule, self.span, origin=origin)


@dataclass(frozen=True)
class Unknown:
    """Fuel ran out before the query was decided."""

    reason: str = "fuel exhausted"


Verdict = Union[Yes, No, Unknown]


class OutOfFuel(Exception):
    pass


class Fuel:
    """A budget of rule applications shared by one top-level query."""

    def __init__(self, amount: int):
        self.initial = amount
        self.remaining = amount

    def spend(self) -> None:
        if self.remaining <= 0:
            raise OutOfFuel()
        self.remaining -= 1

    @property
    def used(self) -> int:
        return self.initial - self.remaining


DEFAULT_FUEL = 10_000
