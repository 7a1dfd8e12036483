import pytest

from oracles import ref_candidates, ref_repl_fixpoints
from pdot.parser import parse_type
from pdot.syntax import (
    BOT, TOP, All, And, Bound, FieldDef, Fld, Free, Path, Rec, Sel, Sngl, close, free_names,
    open_with_path, path, repl_all, repl_candidates, replace_prefix, subst_name, var,
)

x, y, p, q = var("x"), var("y"), var("p"), var("q")
SELF = Path(Bound(0))


def ty(text, free=("x", "y", "p", "q")):
    return parse_type(text, free)


# open_with_path


def test_open_rec_body():
    body = Fld("a", Sngl(SELF.sel("b")))
    assert open_with_path(body, x) == Fld("a", Sngl(path("x.b")))


def test_open_all_body_result_type():
    assert open_with_path(Sel(SELF, "A"), q) == Sel(q, "A")


def test_open_without_bound_slot_is_identity():
    t = ty("{a: x.b.type} /\\ y.A")
    assert open_with_path(t, p) == t


def test_open_skips_inner_binders():
    # mu(s: {a: s.type /\ outer.type}) where outer is index 1 inside the body
    body = Rec(And(Sngl(Path(Bound(0))), Sngl(Path(Bound(1), ("c",)))))
    assert open_with_path(body, x) == Rec(And(Sngl(Path(Bound(0))), Sngl(path("x.c"))))


def test_open_rejects_bound_path():
    with pytest.raises(ValueError):
        open_with_path(TOP, SELF)


def test_close_is_inverse_of_open():
    t = ty("{a: x.b.type} /\\ all(z: x.A) z.B")
    assert open_with_path(close(t, "x"), x) == t


# subst_name


def test_subst_extends_suffix():
    assert subst_name("x", path("y.b"), path("x.c")) == path("y.b.c")


def test_subst_in_defs():
    defs = (FieldDef("b", path("y.b")),)
    assert subst_name("y", path("p.a"), defs) == (FieldDef("b", path("p.a.b")),)


def test_subst_in_top():
    assert subst_name("x", p, TOP) == TOP


def test_subst_leaves_other_roots():
    assert subst_name("x", p, path("xy.a")) == path("xy.a")


# free_names


def test_free_names_excludes_bound():
    assert free_names(All(TOP, Sel(SELF, "A"))) == set()


def test_free_names_enumerates_roots():
    assert free_names(ty("{a: x.b.type} /\\ y.A")) == {"x", "y"}


def test_free_names_bot():
    assert free_names(BOT) == set()


# replace_prefix


def test_replace_prefix_with_suffix():
    assert replace_prefix(p, q, path("p.b")) == path("q.b")


def test_replace_prefix_empty_suffix():
    assert replace_prefix(x, y, x) == y


def test_replace_prefix_not_a_prefix():
    assert replace_prefix(path("x.a"), y, path("x.b")) is None


def test_replace_prefix_other_root():
    assert replace_prefix(x, y, path("xx.a")) is None


# repl_candidates


def test_repl_candidates_projection():
    assert repl_candidates(p, q, ty("p.b.c.A")) == {ty("q.b.c.A")}


def test_repl_candidates_one_per_conjunct():
    t = ty("{a: p.type} /\\ {b: p.type}")
    assert repl_candidates(p, q, t) == {ty("{a: q.type} /\\ {b: p.type}"),
                                        ty("{a: p.type} /\\ {b: q.type}")}


def test_repl_candidates_top_is_empty():
    assert repl_candidates(p, q, TOP) == set()


def test_repl_candidates_under_binders():
    t = ty("mu(s: {a: p.a.type}) /\\ all(z: p.A) z.B")
    assert repl_candidates(p, q, t) == ref_candidates(p, q, t)
    assert len(repl_candidates(p, q, t)) == 2


def test_repl_candidates_agree_with_oracle_on_examples():
    for text in ["p.b.c.A", "{a: p.type} /\\ {b: p.type}", "Top",
                 "{A: p.A..p.b.A} /\\ {c: p.c.type}", "all(z: p.A) mu(s: {a: p.type})"]:
        t = ty(text)
        assert repl_candidates(p, q, t) == ref_candidates(p, q, t), text


# repl_all

# Frozen from ref_repl_fixpoints: iterating single replacements in every
# order reaches exactly one fixpoint.
REPL_ALL_FROZEN = [
    ("p", "q", "{a: p.type} /\\ {b: p.type}", "{a: q.type} /\\ {b: q.type}"),
    ("p", "q", "Bot", "Bot"),
    ("x", "y", "all(z: x.A) x.B", "all(z: y.A) y.B"),
]


@pytest.mark.parametrize("p_, q_, before, after", REPL_ALL_FROZEN)
def test_repl_all_examples(p_, q_, before, after):
    assert repl_all(var(p_), var(q_), ty(before)) == ty(after)


@pytest.mark.parametrize("p_, q_, before, after", REPL_ALL_FROZEN)
def test_repl_all_frozen_values_match_oracle(p_, q_, before, after):
    assert ref_repl_fixpoints(var(p_), var(q_), ty(before)) == {ty(after)}


def test_repl_all_two_single_steps_commute():
    t = ty("all(z: x.A) x.B")
    firsts = repl_candidates(x, y, t)
    assert len(firsts) == 2
    seconds = {u for f in firsts for u in repl_candidates(x, y, f)}
    assert seconds == {ty("all(z: y.A) y.B")}


def test_repl_all_rejects_prefix_target():
    with pytest.raises(ValueError):
        repl_all(x, path("x.a"), TOP)
    with pytest.raises(ValueError):
        repl_all(x, x, TOP)


def test_repl_all_to_shorter_path():
    assert repl_all(path("x.a"), x, ty("x.a.b.A /\\ x.b.A")) == ty("x.b.A /\\ x.b.A")


def test_equality_ignores_binder_hints():
    assert Rec(Sngl(SELF), "s") == Rec(Sngl(SELF), "t")
    assert All(TOP, TOP, "u") == All(TOP, TOP, "v")
    assert Free("x") != Bound(0)
