"""Independent replay of derivation trees against the declarative rules.

Each node is checked locally: its conclusion must follow from the
conclusions of its premises by the named rule, with the rule's side
conditions.  Nothing here calls into the algorithmic checker, and path
replacement is verified by a direct structural diff.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from ..syntax import (
    All, And, App, Bot, FieldDef, Fld, Free, Lam, Let, Obj, Path, Rec, Sel, Sngl, Top,
    TypDecl, TypeDef, free_names, open_with_path, var,
)
from .derivation import DefsType, Deriv, HasType, Subtype, Typeable
from .relations import tight_bounds


@dataclass(frozen=True)
class ReplayError:
    rule: str
    message: str
    node: Deriv


class _Bad(Exception):
    pass


def _need(cond: bool, message: str) -> None:
    if not cond:
        raise _Bad(message)


def _premises(d: Deriv, *kinds) -> tuple:
    _need(len(d.premises) == len(kinds), f"expected {len(kinds)} premises, got {len(d.premises)}")
    out = []
    for p, kind in zip(d.premises, kinds):
        _need(isinstance(p.concl, kind), f"premise {p.rule} concludes the wrong judgement form")
        out.append(p.concl)
    return tuple(out)


def _same_env(d: Deriv, *premises) -> None:
    for p in premises:
        _need(p.env == d.concl.env, "premise environment differs from the conclusion's")


def _fresh(d: Deriv, *nodes) -> str:
    z = d.fresh
    _need(z is not None, "binder rule without a fresh name")
    _need(z not in d.concl.env, f"'{z}' is already bound")
    for n in nodes:
        _need(z not in free_names(n), f"'{z}' is not fresh")
    return z


# Single replacement, checked by a parallel walk


def _diff_paths(t, u, out: list) -> bool:
    """Collect differing path occurrences; False if the shapes differ elsewhere."""
    if type(t) is not type(u):
        return False
    match t:
        case Top() | Bot():
            return True
        case Fld(a, x):
            return a == u.label and _diff_paths(x, u.type, out)
        case TypDecl(a, lo, hi):
            return a == u.label and _diff_paths(lo, u.lower, out) and _diff_paths(hi, u.upper, out)
        case Sel(p, a):
            if a != u.label:
                return False
            if p != u.path:
                out.append((p, u.path))
            return True
        case Sngl(p):
            if p != u.path:
                out.append((p, u.path))
            return True
        case And(l, r):
            return _diff_paths(l, u.left, out) and _diff_paths(r, u.right, out)
        case Rec(body):
            return _diff_paths(body, u.body, out)
        case All(s, body):
            return _diff_paths(s, u.param, out) and _diff_paths(body, u.body, out)
    return False


def single_replacement(p: Path, q: Path, t, u) -> bool:
    """Whether ``u`` is ``t`` with exactly one ``p``-prefixed path rewritten to start with ``q``."""
    diffs: list = []
    if not _diff_paths(t, u, diffs) or len(diffs) != 1:
        return False
    before, after = diffs[0]
    n = len(p.fields)
    return (before.root == p.root and before.fields[:n] == p.fields
            and after == q.extend(before.fields[n:]))


# Rules


def _var(d):
    _premises(d)
    c = d.concl
    _need(isinstance(c.term, Path) and c.term.is_var and isinstance(c.term.root, Free),
          "Var needs a variable")
    _need(c.env.get(c.term.name) == c.type, "type differs from the environment's")


def _all_i(d):
    c = d.concl
    (b,) = _premises(d, HasType)
    lam, ty = c.term, c.type
    _need(isinstance(lam, Lam) and isinstance(ty, All), "All-I shape")
    _need(lam.param == ty.param, "parameter types differ")
    z = _fresh(d, lam, ty)
    _need(b.env == c.env.extend(z, lam.param), "body environment")
    _need(b.term == open_with_path(lam.body, var(z)), "body term")
    _need(b.type == open_with_path(ty.body, var(z)), "body type")


def _all_e(d):
    c = d.concl
    f, a = _premises(d, HasType, HasType)
    _same_env(d, f, a)
    _need(isinstance(c.term, App), "All-E needs an application")
    _need(f.term == c.term.fun and a.term == c.term.arg, "premise terms")
    _need(isinstance(f.type, All), "function premise is not a function type")
    _need(a.type == f.type.param, "argument type differs from the parameter")
    _need(c.type == open_with_path(f.type.body, c.term.arg), "result type")


def _new_i(d):
    c = d.concl
    (b,) = _premises(d, DefsType)
    obj = c.term
    _need(isinstance(obj, Obj) and c.type == Rec(obj.self_type), "{}-I shape")
    z = _fresh(d, obj)
    zt = open_with_path(obj.self_type, var(z))
    _need(b.env == c.env.extend(z, zt), "environment")
    _need(b.path == var(z) and b.type == zt, "definition typing target")
    _need(b.defs == open_with_path(obj.defs, var(z)), "definitions")


def _fld_e(d):
    c = d.concl
    (b,) = _premises(d, HasType)
    _same_env(d, b)
    _need(isinstance(c.term, Path) and c.term.fields, "Fld-E needs a selection")
    _need(b.term == c.term.parent, "premise path")
    _need(b.type == Fld(c.term.fields[-1], c.type), "premise type")


def _fld_i(d):
    c = d.concl
    (b,) = _premises(d, HasType)
    _same_env(d, b)
    _need(isinstance(c.term, Path) and isinstance(c.type, Fld), "Fld-I shape")
    _need(b.term == c.term.sel(c.type.label) and b.type == c.type.type, "premise")


def _let(d):
    c = d.concl
    b1, b2 = _premises(d, HasType, HasType)
    t = c.term
    _need(isinstance(t, Let), "Let needs a let")
    _same_env(d, b1)
    _need(b1.term == t.bound, "bound term")
    z = _fresh(d, t, c.type)
    _need(b2.env == c.env.extend(z, b1.type), "body environment")
    _need(b2.term == open_with_path(t.body, var(z)), "body term")
    _need(b2.type == c.type, "body type")


def _sngl_trans(d):
    c = d.concl
    a, b = _premises(d, HasType, HasType)
    _same_env(d, a, b)
    _need(a.term == c.term and isinstance(a.type, Sngl), "first premise")
    _need(b.term == a.type.path and b.type == c.type, "second premise")


def _sngl_e(d):
    c = d.concl
    a, b = _premises(d, HasType, Typeable)
    _same_env(d, a, b)
    p = c.term
    _need(isinstance(p, Path) and p.fields and isinstance(c.type, Sngl), "Sngl-E shape")
    _need(a.term == p.parent and isinstance(a.type, Sngl), "first premise")
    qa = a.type.path.sel(p.fields[-1])
    _need(b.path == qa and c.type == Sngl(qa), "extended path")


def _rec_i(d):
    c = d.concl
    (b,) = _premises(d, HasType)
    _same_env(d, b)
    _need(isinstance(c.term, Path) and isinstance(c.type, Rec), "Rec-I shape")
    _need(b.term == c.term and b.type == open_with_path(c.type.body, c.term), "premise")


def _rec_e(d):
    c = d.concl
    (b,) = _premises(d, HasType)
    _same_env(d, b)
    _need(isinstance(c.term, Path) and isinstance(b.type, Rec), "Rec-E shape")
    _need(b.term == c.term and c.type == open_with_path(b.type.body, c.term), "conclusion")


def _and_i(d):
    c = d.concl
    a, b = _premises(d, HasType, HasType)
    _same_env(d, a, b)
    _need(isinstance(c.term, Path), "&-I types paths")
    _need(a.term == c.term == b.term and c.type == And(a.type, b.type), "premises")


def _sub(d):
    c = d.concl
    a, b = _premises(d, HasType, Subtype)
    _same_env(d, a, b)
    _need(a.term == c.term and b.lower == a.type and b.upper == c.type, "premises")


def _wf(d):
    c = d.concl
    (a,) = _premises(d, HasType)
    _same_env(d, a)
    _need(a.term == c.path, "premise path")


def _single_def(d, kind):
    c = d.concl
    _need(len(c.defs) == 1 and isinstance(c.defs[0], kind), "single definition expected")
    return c.defs[0]


def _def_typ(d):
    _premises(d)
    df = _single_def(d, TypeDef)
    _need(d.concl.type == TypDecl(df.label, df.type, df.type), "bounds must equal the definition")


def _def_all(d):
    c = d.concl
    (b,) = _premises(d, HasType)
    _same_env(d, b)
    df = _single_def(d, FieldDef)
    _need(isinstance(df.value, Lam), "Def-All needs a lambda")
    _need(isinstance(c.type, Fld) and c.type.label == df.label and isinstance(c.type.type, All),
          "declared type")
    _need(b.term == df.value and b.type == c.type.type, "premise")


def _def_new(d):
    c = d.concl
    (b,) = _premises(d, DefsType)
    _same_env(d, b)
    df = _single_def(d, FieldDef)
    obj = df.value
    _need(isinstance(obj, Obj), "Def-New needs an object")
    _need(c.type == Fld(df.label, Rec(obj.self_type)), "declared type")
    _need(tight_bounds(obj.self_type), "bounds are not tight")
    pa = c.path.sel(df.label)
    _need(b.path == pa, "premise path")
    _need(b.defs == open_with_path(obj.defs, pa), "premise definitions")
    _need(b.type == open_with_path(obj.self_type, pa), "premise type")


def _def_path(d):
    c = d.concl
    (b,) = _premises(d, Typeable)
    _same_env(d, b)
    df = _single_def(d, FieldDef)
    _need(isinstance(df.value, Path), "Def-Path needs a path")
    _need(c.type == Fld(df.label, Sngl(df.value)) and b.path == df.value, "declared type")


def _and_def_i(d):
    c = d.concl
    a, b = _premises(d, DefsType, DefsType)
    _same_env(d, a, b)
    _need(a.path == c.path == b.path, "paths")
    _need(c.type == And(a.type, b.type), "type")
    la, lb = {x.label for x in a.defs}, {x.label for x in b.defs}
    _need(not la & lb, "definition domains overlap")
    _need(len(a.defs) + len(b.defs) == len(c.defs), "definitions")
    _need(all(x in c.defs for x in a.defs + b.defs), "definitions")


def _axiom(check: Callable[[Subtype], bool], what: str):
    def rule(d):
        _premises(d)
        _need(check(d.concl), what)
    return rule


def _trans(d):
    c = d.concl
    a, b = _premises(d, Subtype, Subtype)
    _same_env(d, a, b)
    _need(a.lower == c.lower and a.upper == b.lower and b.upper == c.upper, "chain")


def _sub_and(d):
    c = d.concl
    a, b = _premises(d, Subtype, Subtype)
    _same_env(d, a, b)
    _need(a.lower == c.lower == b.lower and c.upper == And(a.upper, b.upper), "premises")


def _fld_fld(d):
    c = d.concl
    (a,) = _premises(d, Subtype)
    _same_env(d, a)
    _need(isinstance(c.lower, Fld) and isinstance(c.upper, Fld), "Fld-<:-Fld shape")
    _need(c.lower.label == c.upper.label, "labels")
    _need(a.lower == c.lower.type and a.upper == c.upper.type, "premise")


def _typ_typ(d):
    c = d.concl
    lo, hi = _premises(d, Subtype, Subtype)
    _same_env(d, lo, hi)
    s, t = c.lower, c.upper
    _need(isinstance(s, TypDecl) and isinstance(t, TypDecl) and s.label == t.label, "shape")
    _need(lo.lower == t.lower and lo.upper == s.lower, "lower bounds (contravariant)")
    _need(hi.lower == s.upper and hi.upper == t.upper, "upper bounds")


def _sub_sel(d):
    c = d.concl
    (a,) = _premises(d, HasType)
    _same_env(d, a)
    _need(isinstance(c.upper, Sel) and isinstance(a.type, TypDecl), "<:-Sel shape")
    _need(a.term == c.upper.path and a.type.label == c.upper.label, "member")
    _need(c.lower == a.type.lower, "lower bound")


def _sel_sub(d):
    c = d.concl
    (a,) = _premises(d, HasType)
    _same_env(d, a)
    _need(isinstance(c.lower, Sel) and isinstance(a.type, TypDecl), "Sel-<: shape")
    _need(a.term == c.lower.path and a.type.label == c.lower.label, "member")
    _need(c.upper == a.type.upper, "upper bound")


def _sngl(pq: bool):
    def rule(d):
        c = d.concl
        a, b = _premises(d, HasType, Typeable)
        _same_env(d, a, b)
        _need(isinstance(a.term, Path) and isinstance(a.type, Sngl), "alias premise")
        p, q = a.term, a.type.path
        _need(b.path == q, "typeable premise")
        src, dst = (p, q) if pq else (q, p)
        _need(single_replacement(src, dst, c.lower, c.upper),
              "upper type is not a single replacement of the lower")
    return rule


def _all_all(d):
    c = d.concl
    a, b = _premises(d, Subtype, Subtype)
    s, t = c.lower, c.upper
    _need(isinstance(s, All) and isinstance(t, All), "All-<:-All shape")
    _same_env(d, a)
    _need(a.lower == t.param and a.upper == s.param, "parameter premise")
    z = _fresh(d, s, t)
    _need(b.env == c.env.extend(z, t.param), "body environment")
    _need(b.lower == open_with_path(s.body, var(z)) and b.upper == open_with_path(t.body, var(z)),
          "body premise")


RULES: dict[str, tuple[type, Callable]] = {
    "Var": (HasType, _var),
    "All-I": (HasType, _all_i),
    "All-E": (HasType, _all_e),
    "{}-I": (HasType, _new_i),
    "Fld-E": (HasType, _fld_e),
    "Fld-I": (HasType, _fld_i),
    "Let": (HasType, _let),
    "Sngl-Trans": (HasType, _sngl_trans),
    "Sngl-E": (HasType, _sngl_e),
    "Rec-I": (HasType, _rec_i),
    "Rec-E": (HasType, _rec_e),
    "&-I": (HasType, _and_i),
    "Sub": (HasType, _sub),
    "Wf": (Typeable, _wf),
    "Def-Typ": (DefsType, _def_typ),
    "Def-All": (DefsType, _def_all),
    "Def-New": (DefsType, _def_new),
    "Def-Path": (DefsType, _def_path),
    "AndDef-I": (DefsType, _and_def_i),
    "Top": (Subtype, _axiom(lambda c: isinstance(c.upper, Top), "upper type is not Top")),
    "Bot": (Subtype, _axiom(lambda c: isinstance(c.lower, Bot), "lower type is not Bot")),
    "Refl": (Subtype, _axiom(lambda c: c.lower == c.upper, "types differ")),
    "Trans": (Subtype, _trans),
    "And1-<:": (Subtype, _axiom(lambda c: isinstance(c.lower, And) and c.lower.left == c.upper,
                                "not a left projection")),
    "And2-<:": (Subtype, _axiom(lambda c: isinstance(c.lower, And) and c.lower.right == c.upper,
                                "not a right projection")),
    "<:-And": (Subtype, _sub_and),
    "Fld-<:-Fld": (Subtype, _fld_fld),
    "Typ-<:-Typ": (Subtype, _typ_typ),
    "<:-Sel": (Subtype, _sub_sel),
    "Sel-<:": (Subtype, _sel_sub),
    "Sngl-pq-<:": (Subtype, _sngl(True)),
    "Sngl-qp-<:": (Subtype, _sngl(False)),
    "All-<:-All": (Subtype, _all_all),
}


def check_node(d: Deriv) -> Optional[str]:
    """Why this single step is not a rule instance, or None when it is."""
    entry = RULES.get(d.rule)
    if entry is None:
        return f"unknown rule {d.rule!r}"
    kind, rule = entry
    if not isinstance(d.concl, kind):
        return "conclusion has the wrong judgement form"
    try:
        rule(d)
    except _Bad as e:
        return str(e)
    return None


def replay(d: Deriv) -> list[ReplayError]:
    """Check every node of a derivation; an empty list means it is valid."""
    errors = []
    for node in d.nodes():
        why = check_node(node)
        if why is not None:
            errors.append(ReplayError(node.rule, why, node))
    return errors
