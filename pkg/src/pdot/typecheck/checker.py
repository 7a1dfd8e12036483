"""Sound, fuel-bounded algorithmic typing and subtyping.

Every successful answer comes with a derivation built only from the
declarative typing and subtyping rules, so it can be replayed by an
independent checker.  The algorithm is incomplete: failing to find a
derivation yields ``No``; running out of fuel yields ``Unknown``.

Path typing works on "facts": the types a path can be given by Var,
Fld-E, Sngl-E, And-elimination through Sub, Rec-E, Sngl-Trans and
widening a projection to its upper bound.  Path aliasing is handled by
rewriting each path along its chain of singleton types to a common
representative; each rewrite is one Sngl-pq or Sngl-qp subtyping step.
"""
from __future__ import annotations

from collections import deque
from typing import Optional

from ..diagnostics import Span
from ..printer import pretty
from ..syntax import (
    All, And, App, Bot, DefList, Fld, Free, Lam, Let, Obj, Path, Rec, Sel, Sngl,
    Term, Top, Type, TypDecl, TypeDef, close, free_names, iter_paths, map_paths,
    open_with_path, var,
)
from .derivation import (
    DEFAULT_FUEL, EMPTY, Deriv, DefsType, Env, Fuel, HasType, No, OutOfFuel, Subtype,
    Typeable, Unknown, Verdict, Yes,
)
from .relations import (
    AliasStep, Canonical, PathResolution, follow_chain, tight_bounds, untypeable_paths,
)

Fact = tuple[Type, Deriv]


class TypeFailure(Exception):
    """A definite failure of the algorithm, naming the rule that could not be applied."""

    def __init__(self, rule: str, message: str, span: Optional[Span] = None):
        super().__init__(message)
        self.rule = rule
        self.message = message
        self.span = span


def _span(node) -> Optional[Span]:
    return getattr(node, "span", None)


def decl_labels(t: Type) -> Optional[list[str]]:
    """Labels declared by an intersection of member declarations, else None."""
    match t:
        case Fld(label, _) | TypDecl(label, _, _):
            return [label]
        case And(l, r):
            left, right = decl_labels(l), decl_labels(r)
            if left is None or right is None:
                return None
            return left + right
    return None


# Nested path, subtyping and path-check goals allowed at once.  Some
# environments have an infinite closure of path facts (each Sngl-E step
# mentions a longer path), and this cap stops the search there before
# Python's own recursion limit would.
MAX_NESTING = 80


class Checker:
    """One top-level query: holds the fuel budget and per-query caches."""

    def __init__(self, fuel: int = DEFAULT_FUEL):
        self.fuel = Fuel(fuel)
        self.depth = 0
        self.max_depth = 0
        self._facts: dict[tuple[Env, Path], list[Fact]] = {}
        self._facts_busy: set[tuple[Env, Path]] = set()
        self._chains: dict[tuple[Env, Path], tuple[PathResolution, list]] = {}
        self._sub_busy: set[tuple[Env, Type, Type]] = set()
        self._path_busy: set[tuple[Env, Path, Type]] = set()

    # Path facts

    def facts(self, env: Env, p: Path) -> list[Fact]:
        """Types derivable for ``p`` without subsumption search, with derivations."""
        key = (env, p)
        cached = self._facts.get(key)
        if cached is not None:
            return cached
        if key in self._facts_busy or not isinstance(p.root, Free):
            return []
        self.fuel.spend()
        self._facts_busy.add(key)
        self._enter()
        try:
            result = self._closure(env, p, self._seed_facts(env, p))
        finally:
            self.depth -= 1
            self._facts_busy.discard(key)
        self._facts[key] = result
        return result

    def _seed_facts(self, env: Env, p: Path) -> list[Fact]:
        if p.is_var:
            t = env.get(p.name)
            return [] if t is None else [(t, Deriv("Var", HasType(env, p, t)))]
        parent, label = p.parent, p.fields[-1]
        seeds: list[Fact] = []
        parent_facts = self.facts(env, parent)
        for t, d in parent_facts:
            if isinstance(t, Fld) and t.label == label:
                seeds.append((t.type, Deriv("Fld-E", HasType(env, p, t.type), (d,))))
        for t, d in parent_facts:
            if isinstance(t, Sngl):
                q = t.path.sel(label)
                wf = self.typeable(env, q)
                if wf is not None:
                    seeds.append((Sngl(q), Deriv("Sngl-E", HasType(env, p, Sngl(q)), (d, wf))))
        return seeds

    def _closure(self, env: Env, p: Path, seeds: list[Fact]) -> list[Fact]:
        out: dict[Type, Deriv] = {}
        work = deque(seeds)
        while work:
            t, d = work.popleft()
            self.fuel.spend()
            if t in out:
                continue
            out[t] = d
            match t:
                case And(l, r):
                    work.append((l, self._subsume(env, p, d, Deriv("And1-<:", Subtype(env, t, l)))))
                    work.append((r, self._subsume(env, p, d, Deriv("And2-<:", Subtype(env, t, r)))))
                case Rec(body):
                    u = open_with_path(body, p)
                    work.append((u, Deriv("Rec-E", HasType(env, p, u), (d,))))
                case Sel(r, label):
                    for _, hi, dd in self.member_decls(env, r, label):
                        up = Deriv("Sel-<:", Subtype(env, t, hi), (dd,))
                        work.append((hi, self._subsume(env, p, d, up)))
                case Sngl(q):
                    for u, dq in self.facts(env, q):
                        work.append((u, Deriv("Sngl-Trans", HasType(env, p, u), (d, dq))))
        return list(out.items())

    def _enter(self) -> None:
        """Count one more nested goal; too deep a nesting ends the query as Unknown."""
        if self.depth >= MAX_NESTING:
            raise OutOfFuel()
        self.depth += 1
        self.max_depth = max(self.max_depth, self.depth)

    @staticmethod
    def _subsume(env: Env, t: Term, d: Deriv, sd: Deriv) -> Deriv:
        """Sub: from ``t : S`` and ``S <: T`` conclude ``t : T``."""
        if sd.rule == "Refl":
            return d
        return Deriv("Sub", HasType(env, t, sd.concl.upper), (d, sd))

    def typeable(self, env: Env, p: Path) -> Optional[Deriv]:
        fs = self.facts(env, p)
        if not fs:
            return None
        return Deriv("Wf", Typeable(env, p), (fs[0][1],))

    def member_decls(self, env: Env, p: Path, label: str) -> list[tuple[Type, Type, Deriv]]:
        return [(t.lower, t.upper, d) for t, d in self.facts(env, p)
                if isinstance(t, TypDecl) and t.label == label]

    def path_candidates(self, env: Env, p: Path) -> list[Fact]:
        """Facts ordered for synthesis: singleton, then Rec-E results, then the rest."""
        fs = self.facts(env, p)
        sngl = [f for f in fs if isinstance(f[0], Sngl)]
        opened = [f for f in fs if f[1].rule == "Rec-E" and not isinstance(f[0], Sngl)]
        rest = [f for f in fs if f not in sngl and f not in opened]
        return sngl[:1] + opened + rest + sngl[1:]

    # Aliasing

    def _alias_step(self, env: Env, p: Path) -> Optional[tuple[AliasStep, Deriv, Deriv]]:
        for pre in p.prefixes():
            for t, d in self.facts(env, pre):
                if isinstance(t, Sngl):
                    wf = self.typeable(env, t.path)
                    if wf is None:
                        continue
                    step = AliasStep(p, pre, t.path, t.path.extend(p.fields[len(pre.fields):]))
                    return step, d, wf
        return None

    def resolve(self, env: Env, p: Path) -> tuple[PathResolution, list[tuple[AliasStep, Deriv, Deriv]]]:
        key = (env, p)
        hit = self._chains.get(key)
        if hit is not None:
            return hit
        evidence: dict[Path, tuple[Deriv, Deriv]] = {}

        def step(cur: Path) -> Optional[AliasStep]:
            found = self._alias_step(env, cur)
            if found is None:
                return None
            s, d, wf = found
            evidence[cur] = (d, wf)
            return s

        res, steps = follow_chain(p, step)
        out = (res, [(s, *evidence[s.before]) for s in steps])
        self._chains[key] = out
        return out

    def path_key(self, env: Env, p: Path) -> Path:
        res, _ = self.resolve(env, p)
        return res.path if isinstance(res, Canonical) else res.representative

    def canon_type(self, env: Env, t: Type) -> Type:
        def f(r: Path, depth: int) -> Path:
            return self.path_key(env, r) if isinstance(r.root, Free) else r

        return map_paths(t, f)

    def _to_key(self, env: Env, t: Type) -> list[tuple[Type, Type, AliasStep, Deriv, Deriv]]:
        """Single rewriting steps taking ``t`` to its canonical form."""
        steps = []
        for i, (r, _) in enumerate(list(iter_paths(t))):
            if not isinstance(r.root, Free):
                continue
            key = self.path_key(env, r)
            if key == r:
                continue
            _, chain = self.resolve(env, r)
            for s, d, wf in chain:
                new = _replace_occurrence(t, i, s.after)
                steps.append((t, new, s, d, wf))
                t = new
                if s.after == key:
                    break
        return steps

    def _equiv(self, env: Env, s: Type, t: Type) -> Optional[Deriv]:
        """Derive ``s <: t`` when both rewrite to the same canonical form."""
        if self.canon_type(env, s) != self.canon_type(env, t):
            return None
        chain: list[Deriv] = []
        for before, after, st, d, wf in self._to_key(env, s):
            chain.append(Deriv("Sngl-pq-<:", Subtype(env, before, after), (d, wf)))
        back = [Deriv("Sngl-qp-<:", Subtype(env, after, before), (d, wf))
                for before, after, st, d, wf in self._to_key(env, t)]
        chain.extend(reversed(back))
        if not chain:
            return Deriv("Refl", Subtype(env, s, t))
        out = chain[0]
        for nxt in chain[1:]:
            out = self._trans(env, out, nxt)
        return out

    @staticmethod
    def _trans(env: Env, d1: Deriv, d2: Deriv) -> Deriv:
        if d1.rule == "Refl":
            return d2
        if d2.rule == "Refl":
            return d1
        return Deriv("Trans", Subtype(env, d1.concl.lower, d2.concl.upper), (d1, d2))

    # Subtyping

    def sub(self, env: Env, s: Type, t: Type) -> Optional[Deriv]:
        self.fuel.spend()
        if s == t:
            return Deriv("Refl", Subtype(env, s, t))
        if isinstance(t, Top):
            return Deriv("Top", Subtype(env, s, t))
        if isinstance(s, Bot):
            return Deriv("Bot", Subtype(env, s, t))
        key = (env, s, t)
        if key in self._sub_busy:
            return None
        self._sub_busy.add(key)
        self._enter()
        try:
            return self._sub(env, s, t)
        finally:
            self.depth -= 1
            self._sub_busy.discard(key)

    def _sub(self, env: Env, s: Type, t: Type) -> Optional[Deriv]:
        d = self._equiv(env, s, t)
        if d is not None:
            return d
        if isinstance(t, And):
            dl = self.sub(env, s, t.left)
            dr = dl and self.sub(env, s, t.right)
            if dr is None:
                return None
            return Deriv("<:-And", Subtype(env, s, t), (dl, dr))
        match s, t:
            case Fld(a, s1), Fld(b, t1) if a == b:
                d = self.sub(env, s1, t1)
                return d and Deriv("Fld-<:-Fld", Subtype(env, s, t), (d,))
            case TypDecl(a, s1, t1), TypDecl(b, s2, t2) if a == b:
                dlo = self.sub(env, s2, s1)
                dhi = dlo and self.sub(env, t1, t2)
                return dhi and Deriv("Typ-<:-Typ", Subtype(env, s, t), (dlo, dhi))
            case All(s1, t1), All(s2, t2):
                dp = self.sub(env, s2, s1)
                if dp is None:
                    return None
                z = env.fresh(t.hint)
                inner = env.extend(z, s2)
                db = self.sub(inner, open_with_path(t1, var(z)), open_with_path(t2, var(z)))
                return db and Deriv("All-<:-All", Subtype(env, s, t), (dp, db), fresh=z)
        if isinstance(s, And):
            for part, rule in ((s.left, "And1-<:"), (s.right, "And2-<:")):
                d = self.sub(env, part, t)
                if d is not None:
                    return self._trans(env, Deriv(rule, Subtype(env, s, part)), d)
        if isinstance(s, Sel):
            for _, hi, dd in self.member_decls(env, s.path, s.label):
                d = self.sub(env, hi, t)
                if d is not None:
                    return self._trans(env, Deriv("Sel-<:", Subtype(env, s, hi), (dd,)), d)
        if isinstance(t, Sel):
            for lo, _, dd in self.member_decls(env, t.path, t.label):
                d = self.sub(env, s, lo)
                if d is not None:
                    return self._trans(env, d, Deriv("<:-Sel", Subtype(env, lo, t), (dd,)))
        return None

    # Terms

    def synth(self, env: Env, t: Term) -> Fact:
        self.fuel.spend()
        try:
            return self._synth(env, t)
        except TypeFailure as f:
            f.span = f.span or _span(t)
            raise

    def _synth(self, env: Env, t: Term) -> Fact:
        match t:
            case Path():
                cands = self.path_candidates(env, t)
                if not cands:
                    raise TypeFailure(*self._untypeable(env, t))
                return cands[0]
            case Lam(param, body):
                z = env.fresh(t.hint)
                u, d = self.synth(env.extend(z, param), open_with_path(body, var(z)))
                ty = All(param, close(u, z), t.hint)
                return ty, Deriv("All-I", HasType(env, t, ty), (d,), fresh=z)
            case Obj(self_type, defs):
                z = env.fresh(t.hint)
                opened = open_with_path(self_type, var(z))
                inner = env.extend(z, opened)
                dd = self.check_defs(inner, var(z), open_with_path(defs, var(z)), opened)
                ty = Rec(self_type, t.hint)
                return ty, Deriv("{}-I", HasType(env, t, ty), (dd,), fresh=z)
            case App(p, q):
                return self._app(env, t, p, q)
            case Let():
                return self._let(env, t, None)
        raise TypeError(f"not a term: {t!r}")

    def _untypeable(self, env: Env, p: Path) -> tuple[str, str]:
        if p.is_var:
            return "Var", f"'{p}' is not in scope"
        return "Fld-E", f"'{p}' has no type: no member '{p.fields[-1]}' on '{p.parent}'"

    def _app(self, env: Env, t: App, p: Path, q: Path) -> Fact:
        funs = [(ft, d) for ft, d in self.facts(env, p) if isinstance(ft, All)]
        if not funs:
            if not self.facts(env, p):
                raise TypeFailure(*self._untypeable(env, p))
            raise TypeFailure("All-E", f"'{p}' does not have a function type")
        last: Optional[TypeFailure] = None
        for ft, d in funs:
            try:
                dq = self.check(env, q, ft.param)
            except TypeFailure as f:
                last = f
                continue
            result = open_with_path(ft.body, q)
            return result, Deriv("All-E", HasType(env, t, result), (d, dq))
        assert last is not None
        raise TypeFailure("All-E", f"argument '{q}' does not match the parameter type of '{p}': "
                          f"{last.message}", _span(t))

    def _let(self, env: Env, t: Let, expected: Optional[Type]) -> Fact:
        t1, d1 = self.synth(env, t.bound)
        z = env.fresh(t.hint)
        inner = env.extend(z, t1)
        body = open_with_path(t.body, var(z))
        goal = t.annot if t.annot is not None else expected
        if goal is not None:
            d2 = self.check(inner, body, goal)
            d = Deriv("Let", HasType(env, t, goal), (d1, d2), fresh=z)
            if t.annot is not None and expected is not None:
                sd = self.sub(env, t.annot, expected)
                if sd is None:
                    raise TypeFailure("Sub", f"annotation {pretty(t.annot)} is not a subtype "
                                      f"of {pretty(expected)}", _span(t))
                d = self._subsume(env, t, d, sd)
                return expected, d
            return goal, d
        if isinstance(body, Path):
            cands = self.path_candidates(inner, body)
            if not cands:
                raise TypeFailure(*self._untypeable(inner, body), _span(t))
            options = [c for c in cands if z not in free_names(c[0])]
        else:
            cands = [self.synth(inner, body)]
            options = [c for c in cands if z not in free_names(c[0])]
        if not options:
            u = cands[0][0]
            raise TypeFailure(
                "Let", f"the body's type {pretty(u)} mentions the let-bound '{z}' "
                f"(side condition x ∉ fv(U)); ascribe a type: let {t.hint} = ... in ... : T",
                _span(t))
        u, d2 = options[0]
        return u, Deriv("Let", HasType(env, t, u), (d1, d2), fresh=z)

    def check(self, env: Env, t: Term, ty: Type) -> Deriv:
        self.fuel.spend()
        try:
            return self._check(env, t, ty)
        except TypeFailure as f:
            f.span = f.span or _span(t)
            raise

    def _check(self, env: Env, t: Term, ty: Type) -> Deriv:
        if isinstance(t, Path):
            d = self.check_path(env, t, ty)
            if d is None:
                raise self._path_mismatch(env, t, ty)
            return d
        if isinstance(t, Let):
            return self._let(env, t, ty)[1]
        if isinstance(t, Lam) and isinstance(ty, All):
            return self._check_lam(env, t, ty)
        s, d = self.synth(env, t)
        sd = self.sub(env, s, ty)
        if sd is None:
            raise TypeFailure("Sub", f"{pretty(s)} is not a subtype of {pretty(ty)}", _span(t))
        return self._subsume(env, t, d, sd)

    def _path_mismatch(self, env: Env, p: Path, ty: Type) -> TypeFailure:
        fs = self.facts(env, p)
        if not fs:
            return TypeFailure(*self._untypeable(env, p), _span(p))
        shown = ", ".join(pretty(f[0]) for f in fs[:3])
        more = ", ..." if len(fs) > 3 else ""
        return TypeFailure("Sub", f"'{p}' has types {shown}{more}, none of them a subtype "
                           f"of {pretty(ty)}", _span(p))

    def _check_lam(self, env: Env, t: Lam, ty: All) -> Deriv:
        z = env.fresh(t.hint)
        db = self.check(env.extend(z, t.param), open_with_path(t.body, var(z)),
                        open_with_path(ty.body, var(z)))
        lam_type = All(t.param, ty.body, ty.hint)
        dl = Deriv("All-I", HasType(env, t, lam_type), (db,), fresh=z)
        if lam_type == ty:
            return dl
        dp = self.sub(env, ty.param, t.param)
        if dp is None:
            raise TypeFailure("All-<:-All", f"parameter type {pretty(ty.param)} is not a "
                              f"subtype of {pretty(t.param)}", _span(t))
        z2 = env.fresh(ty.hint)
        inner = env.extend(z2, ty.param)
        body = open_with_path(ty.body, var(z2))
        refl = Deriv("Refl", Subtype(inner, body, body))
        dall = Deriv("All-<:-All", Subtype(env, lam_type, ty), (dp, refl), fresh=z2)
        return Deriv("Sub", HasType(env, t, ty), (dl, dall))

    def check_path(self, env: Env, p: Path, ty: Type) -> Optional[Deriv]:
        key = (env, p, ty)
        if key in self._path_busy:
            return None
        self.fuel.spend()
        self._path_busy.add(key)
        self._enter()
        try:
            return self._check_path(env, p, ty)
        finally:
            self.depth -= 1
            self._path_busy.discard(key)

    def _check_path(self, env: Env, p: Path, ty: Type) -> Optional[Deriv]:
        fs = self.facts(env, p)
        if not fs:
            return None
        if isinstance(ty, And):
            dl = self.check_path(env, p, ty.left)
            dr = dl and self.check_path(env, p, ty.right)
            return dr and Deriv("&-I", HasType(env, p, ty), (dl, dr))
        for s, d in fs:
            if s == ty:
                return d
        for s, d in fs:
            sd = self.sub(env, s, ty)
            if sd is not None:
                return self._subsume(env, p, d, sd)
        match ty:
            case Rec(body):
                d = self.check_path(env, p, open_with_path(body, p))
                return d and Deriv("Rec-I", HasType(env, p, ty), (d,))
            case Fld(label, u):
                d = self.check_path(env, p.sel(label), u)
                return d and Deriv("Fld-I", HasType(env, p, ty), (d,))
            case Sel(r, label):
                for lo, _, dd in self.member_decls(env, r, label):
                    d = self.check_path(env, p, lo)
                    if d is not None:
                        return self._subsume(env, p, d, Deriv("<:-Sel", Subtype(env, lo, ty), (dd,)))
        return None

    # Definitions

    def check_defs(self, env: Env, p: Path, defs: DefList, ty: Type) -> Deriv:
        self.fuel.spend()
        if not defs:
            raise TypeFailure("{}-I", "an object needs at least one definition")
        if len(defs) == 1:
            return self._check_def(env, p, defs[0], ty)
        labels = decl_labels(ty)
        if labels is None or not isinstance(ty, And):
            raise TypeFailure("AndDef-I", f"{len(defs)} definitions need an intersection of "
                              f"member declarations, found {pretty(ty)}", _span(defs[0]))
        left, right = decl_labels(ty.left), decl_labels(ty.right)
        defined = [d.label for d in defs]
        for d in defs:
            if d.label not in labels:
                raise TypeFailure("AndDef-I", f"'{d.label}' is defined but not declared", _span(d))
        for label in labels:
            if label not in defined:
                raise TypeFailure("AndDef-I", f"'{label}' is declared but not defined",
                                  _span(defs[0]))
        if len(set(labels)) != len(labels):
            raise TypeFailure("AndDef-I", "a member is declared twice", _span(defs[0]))
        d1 = tuple(d for d in defs if d.label in left)
        d2 = tuple(d for d in defs if d.label in right)
        p1 = self.check_defs(env, p, d1, ty.left)
        p2 = self.check_defs(env, p, d2, ty.right)
        return Deriv("AndDef-I", DefsType(env, p, defs, ty), (p1, p2))

    def _check_def(self, env: Env, p: Path, d, ty: Type) -> Deriv:
        concl = DefsType(env, p, (d,), ty)
        if isinstance(d, TypeDef):
            want = TypDecl(d.label, d.type, d.type)
            if ty != want:
                raise TypeFailure("Def-Typ", f"type member {d.label} = {pretty(d.type)} can only "
                                  f"be declared as {pretty(want)}, not {pretty(ty)}", _span(d))
            return Deriv("Def-Typ", concl)
        v = d.value
        rule = "Def-Path" if isinstance(v, Path) else "Def-All" if isinstance(v, Lam) else "Def-New"
        if not (isinstance(ty, Fld) and ty.label == d.label):
            raise TypeFailure(rule, f"field '{d.label}' is declared as {pretty(ty)}", _span(d))
        u = ty.type
        if isinstance(v, Path):
            if u != Sngl(v):
                raise TypeFailure("Def-Path", f"a path member {d.label} = {v} must be declared "
                                  f"{{{d.label}: {v}.type}}, not {pretty(ty)}", _span(d))
            wf = self.typeable(env, v)
            if wf is None:
                raise TypeFailure("Def-Path", f"path '{v}' is not typeable", _span(d))
            return Deriv("Def-Path", concl, (wf,))
        if isinstance(v, Lam):
            if not isinstance(u, All):
                raise TypeFailure("Def-All", f"lambda member '{d.label}' must be declared at a "
                                  f"function type, not {pretty(u)}", _span(d))
            return Deriv("Def-All", concl, (self.check(env, v, u),))
        if not (isinstance(u, Rec) and u.body == v.self_type):
            raise TypeFailure("Def-New", f"object member '{d.label}' must be declared "
                              f"{pretty(Fld(d.label, Rec(v.self_type, v.hint)))}, "
                              f"not {pretty(ty)}", _span(d))
        if not tight_bounds(v.self_type):
            raise TypeFailure("Def-New", f"object member '{d.label}' has a type member whose "
                              "bounds differ", _span(d))
        pa = p.sel(d.label)
        inner = self.check_defs(env, pa, open_with_path(v.defs, pa),
                                open_with_path(v.self_type, pa))
        return Deriv("Def-New", concl, (inner,))


def _replace_occurrence(t: Type, index: int, new: Path) -> Type:
    counter = iter(range(1 << 30))

    def f(r: Path, depth: int) -> Path:
        return new if next(counter) == index else r

    return map_paths(t, f)


# Query entry points


def _run(fuel: int, query) -> Verdict:
    checker = Checker(fuel)
    try:
        return query(checker)
    except TypeFailure as f:
        return No(f.message, f.rule, f.span)
    except OutOfFuel:
        return Unknown()


def synth(env: Env, t: Term, fuel: int = DEFAULT_FUEL) -> Verdict:
    def q(c: Checker) -> Verdict:
        ty, d = c.synth(env, t)
        return Yes(d, ty)
    return _run(fuel, q)


def check(env: Env, t: Term, ty: Type, fuel: int = DEFAULT_FUEL) -> Verdict:
    return _run(fuel, lambda c: Yes(c.check(env, t, ty), ty))


def subtype(env: Env, s: Type, t: Type, fuel: int = DEFAULT_FUEL) -> Verdict:
    def q(c: Checker) -> Verdict:
        d = c.sub(env, s, t)
        if d is None:
            return No(f"{pretty(s)} is not a subtype of {pretty(t)}", "Sub")
        return Yes(d)
    return _run(fuel, q)


def check_defs(env: Env, p: Path, defs: DefList, ty: Type, fuel: int = DEFAULT_FUEL) -> Verdict:
    return _run(fuel, lambda c: Yes(c.check_defs(env, p, defs, ty), ty))


def path_types(env: Env, p: Path, fuel: int = DEFAULT_FUEL) -> list[Type]:
    """Every type the checker can derive for ``p`` directly (no subsumption search)."""
    try:
        return [t for t, _ in Checker(fuel).path_candidates(env, p)]
    except OutOfFuel:
        return []


def wf_env(env: Env) -> Verdict:
    """Every path mentioned in the environment's types is typeable."""
    bad = untypeable_paths(env)
    if bad:
        return No("untypeable paths in the environment: " + ", ".join(map(str, bad)), "Wf")
    return Yes(None)


def typecheck(program: Term, fuel: int = DEFAULT_FUEL, env: Env = EMPTY,
              expected: Optional[Type] = None) -> Verdict:
    """Type a closed program: synthesize, or check against ``expected`` when given."""
    if expected is not None:
        return check(env, program, expected, fuel)
    return synth(env, program, fuel)
