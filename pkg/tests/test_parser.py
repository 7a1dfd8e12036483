import json
from pathlib import Path as FilePath

import pytest

from pdot.diagnostics import ParseError, PdotError
from pdot.parser import SourceProgram, parse_path, parse_program, parse_term, parse_type
from pdot.printer import dump_ast, pretty
from pdot.syntax import (
    BOT, TOP, All, And, Bound, FieldDef, Fld, Free, Let, Obj, Path, Rec, Sngl, TypDecl, TypeDef,
    path, var,
)
from pdot.typecheck import EMPTY, Yes, synth

CORPUS = FilePath(__file__).resolve().parent.parent / "corpus"


def corpus(name: str) -> str:
    return (CORPUS / name).read_text(encoding="utf-8")


def b(k: int, *fields: str) -> Path:
    return Path(Bound(k), fields)


def diag(text: str):
    with pytest.raises(PdotError) as info:
        parse_program(text)
    return info.value.diagnostics[0]


# Reference AST built by hand, independently of the parser.
REFERENCE = Let(
    Obj(And(Fld("a", Sngl(b(0))), Fld("b", TOP)),
        (FieldDef("a", b(0)), FieldDef("b", Obj(TOP, ())))),
    b(0, "a"),
)


def test_reference_program():
    src = "let x = nu(x: {a: x.type} /\\ {b: Top}) { a = x; b = nu(y: Top){} } in x.a"
    assert parse_program(src) == REFERENCE


def test_reference_binders_are_indices():
    t = parse_program("let x = nu(x: {a: x.type} /\\ {b: Top}) { a = x; b = nu(y: Top){} } in x.a")
    assert t.bound.defs[0].value == Path(Bound(0))
    assert t.body == Path(Bound(0), ("a",))


def test_chaining_round_trip():
    t = parse_program(corpus("chaining.pdot"))
    assert parse_program(pretty(t)) == t


def test_list_library_round_trip():
    t = parse_program(corpus("list_library.pdot"))
    assert parse_program(pretty(t)) == t


def test_every_corpus_program_round_trips():
    for f in sorted(CORPUS.glob("*.pdot")):
        t = parse_program(f.read_text(encoding="utf-8"))
        assert parse_program(pretty(t)) == t, f.name


def test_missing_bound_term_points_at_in():
    d = diag("let x = in")
    assert d.rule == "syntax"
    assert (d.span.line, d.span.col, d.span.end_col) == (1, 9, 11)
    assert "let x = in"[d.span.offset:d.span.offset + d.span.length] == "in"


def test_unbound_identifier():
    d = diag("let x = y in x")
    assert d.rule == "scope" and "'y'" in d.message
    assert (d.span.col, d.span.length) == (9, 1)


def test_lexical_error_span():
    d = diag("x $ y")
    assert d.rule == "lex" and d.span.col == 3


def test_duplicate_label_core():
    assert diag("nu(x: Top){a = x; a = x}").rule == "AndDef-I"


def test_duplicate_label_sugar():
    assert diag("nu(x => a = x; a = x)").rule == "AndDef-I"


def test_diagnostic_render_format():
    with pytest.raises(ParseError) as info:
        parse_program(SourceProgram("let x = in", "f.pdot"))
    assert info.value.diagnostics[0].render().startswith("f.pdot:1:9: error: syntax: ")


def test_diagnostic_on_second_line():
    d = diag("let x = nu(x => a = x) in\n  x.a $")
    assert (d.span.line, d.span.col) == (2, 7)


# Object sugar


def test_desugar_type_and_path_members():
    got = parse_term("nu(x => A = Top; a = p)", ["p"])
    assert got == Obj(And(TypDecl("A", TOP, TOP), Fld("a", Sngl(var("p")))),
                      (TypeDef("A", TOP), FieldDef("a", var("p"))))


def test_desugar_nested_object():
    got = parse_program("nu(x => b = nu(y => c = y.c))")
    inner = Obj(Fld("c", Sngl(b(0, "c"))), (FieldDef("c", b(0, "c")),))
    assert got == Obj(Fld("b", Rec(Fld("c", Sngl(b(0, "c"))))), (FieldDef("b", inner),))


def test_desugar_nested_object_agrees_with_checker():
    t = parse_program("nu(x => b = nu(y => c = y.c))")
    v = synth(EMPTY, t)
    assert isinstance(v, Yes) and v.type == Rec(t.self_type)


def test_desugar_requires_lambda_annotation():
    d = diag("nu(x => f = lam(z: Top) z)")
    assert d.rule == "desugar" and "'f'" in d.message


def test_desugar_annotated_lambda():
    t = parse_program("nu(x => f: all(z: Top) Top = lam(z: Top) z)")
    assert t.self_type == Fld("f", All(TOP, TOP))


def test_desugar_is_identity_on_core_syntax():
    core = parse_program("nu(x: {A: Top..Top} /\\ {a: x.type}){A = Top; a = x}")
    sugared = parse_program("nu(x => A = Top; a = x)")
    assert core == sugared
    assert parse_program(pretty(core)) == core


# Concrete syntax details


def test_type_keyword_optional_in_declarations():
    assert parse_type("{type A: Bot..Top}") == parse_type("{A: Bot..Top}") == TypDecl("A", BOT, TOP)


def test_mu_forms():
    assert parse_type("mu(x) x.A") == parse_type("mu(x: x.A)")


def test_comments_are_ignored():
    assert parse_program("// hello\nnu(x => a = x) // tail") == parse_program("nu(x => a = x)")


def test_intersection_is_left_nested():
    assert parse_type("Top /\\ Bot /\\ Top") == And(And(TOP, BOT), TOP)


def test_let_annotation():
    t = parse_program("let x = nu(x => a = x) in x : Top")
    assert isinstance(t, Let) and t.annot == TOP


def test_parse_path_with_free_names():
    assert parse_path("x.a.c", ["x"]) == path("x.a.c")


def test_type_projection_needs_type_position():
    with pytest.raises(PdotError):
        parse_program("let x = nu(x => A = Top) in x.A")


# Printing


def test_pretty_top():
    assert pretty(TOP) == "Top"


def test_pretty_singleton():
    assert pretty(Sngl(path("x.a"))) == "x.a.type"


def test_pretty_renames_shadowing_binders():
    t = Rec(Rec(And(Sngl(b(0)), Sngl(b(1))), "s"), "s")
    text = pretty(t)
    assert parse_type(text) == t
    assert "s1" in text


def test_pretty_avoids_capturing_free_names():
    t = Rec(And(Sngl(b(0)), Sngl(var("x"))), "x")
    assert parse_type(pretty(t), ["x"]) == t


# JSON dump


def test_dump_variable_path():
    assert json.loads(dump_ast(var("x"))) == {"path": {"root": "x", "fields": []}}


def test_dump_bot():
    assert json.loads(dump_ast(BOT)) == {"type": "Bot"}


def test_dump_let():
    out = json.loads(dump_ast(parse_program("let x = nu(x => a = x) in x")))
    assert {"let", "bound", "body"} <= set(out)
    assert out["body"] == {"path": {"root": {"bound": 0}, "fields": []}}


def test_dump_is_byte_stable():
    src = corpus("compiler.pdot")
    assert dump_ast(parse_program(src)) == dump_ast(parse_program(src))


def test_dump_free_root_is_string():
    out = json.loads(dump_ast(Sngl(Path(Free("y"), ("a",)))))
    assert out == {"type": "Sngl", "path": {"root": "y", "fields": ["a"]}}
