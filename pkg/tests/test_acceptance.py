"""The six acceptance criteria.  Each test prints one PASS/FAIL line in the summary."""
import time
from pathlib import Path as FilePath

import pytest

import test_properties as props
from pdot.eval import Diverged, Found, NormalPath, Store, lookup_star, run
from pdot.harness import run_harness
from pdot.parser import parse_program, parse_term
from pdot.printer import pretty
from pdot.syntax import path
from pdot.typecheck import No, Yes, typecheck
from pdot.typecheck.replay import replay

CORPUS = FilePath(__file__).resolve().parent.parent / "corpus"

ACCEPTED = ["list_library.pdot", "compiler.pdot", "chaining.pdot"]
REJECTED = {
    "reject_bad_bounds.pdot": "Def-Path",
    "reject_field_cycle.pdot": "Def-Path",
    "reject_type_bounds.pdot": "Def-Typ",
}

# The worked lookup example: rule, source, head of the target.
LOOKUP_ROWS = [
    ("Lookup-Step-Var", "x", "nu"),
    ("Lookup-Step-Val", "x.a", "y.b"),
    ("Lookup-Step-Path", "x.a.c", "y.b.c"),
    ("Lookup-Step-Var", "y", "nu"),
    ("Lookup-Step-Val", "y.b", "nu"),
    ("Lookup-Step-Val", "y.b.c", "lam"),
]

PROPERTIES = [
    props.test_round_trip_terms, props.test_round_trip_types,
    props.test_open_close_types, props.test_open_close_terms,
    props.test_subst_absent_name_is_noop, props.test_repl_candidates_symmetric,
    props.test_repl_all_eliminates_prefix, props.test_subtype_reflexive,
    props.test_subtype_fuel_monotone, props.test_synth_fuel_monotone,
    props.test_canonical_path_terminates,
]


def load(name):
    return parse_program((CORPUS / name).read_text(encoding="utf-8"), str(CORPUS / name))


def timed(fn):
    start = time.perf_counter()
    result = fn()
    return result, time.perf_counter() - start


@pytest.mark.criterion(1, "corpus programs accepted and rejected with rule names")
def test_corpus_acceptance():
    for name in ACCEPTED:
        verdict, secs = timed(lambda: typecheck(load(name)))
        assert isinstance(verdict, Yes), (name, verdict)
        assert secs < 1.0, (name, secs)
    for name, rule in REJECTED.items():
        verdict, secs = timed(lambda: typecheck(load(name)))
        assert isinstance(verdict, No) and verdict.rule == rule, (name, verdict)
        assert secs < 1.0, (name, secs)


@pytest.mark.criterion(2, "lookup x.a.c reproduces the worked step table")
def test_lookup_reproduction():
    store = Store([
        ("y", parse_term("nu(y' => b = nu(y'' => c: all(z: Top) Top = lam(z: Top) z))")),
        ("x", parse_term("nu(x => a = y.b)", ["y"])),
    ])
    facts = []
    res = lookup_star(store, path("x.a.c"), trace=facts)
    assert isinstance(res, Found) and res.value == parse_term("lam(z: Top) z")
    rows = [(f.rule, pretty(f.source), pretty(f.target).split("(")[0]) for f in facts]
    assert rows == LOOKUP_ROWS


@pytest.mark.criterion(3, "chaining resolves to its object and nil-head diverges")
def test_execution_semantics():
    outcome, secs = timed(lambda: run(load("chaining.pdot")))
    assert isinstance(outcome, NormalPath) and secs < 1.0
    assert outcome.path.fields == ("incr", "decr")
    assert isinstance(outcome.resolution, Found)
    assert outcome.resolution.value is outcome.store.get(outcome.path.root.name)
    outcome, secs = timed(lambda: run(load("list_nil_head.pdot"), fuel=10_000))
    assert outcome == Diverged(10_000) and secs < 1.0


@pytest.mark.criterion(4, "harness reports zero violations across the corpus")
def test_metatheory_harness():
    reports, secs = timed(lambda: run_harness(str(CORPUS)))
    assert secs < 30.0
    assert sum(r.total_violations for r in reports) == 0
    assert all(r.status in ("pass", "skipped") for r in reports)
    assert sum(r.status == "pass" for r in reports) == 9


@pytest.mark.criterion(5, "property suites pass at 1,000 seeded examples each")
def test_property_suites():
    assert props.PROPERTY.max_examples >= 1000
    for prop in PROPERTIES:
        assert prop._hypothesis_internal_use_seed == props.SEED
        prop()


@pytest.mark.criterion(6, "every corpus derivation replays without errors")
def test_derivation_replay():
    checked = 0
    for f in sorted(CORPUS.glob("*.pdot")):
        verdict = typecheck(load(f.name))
        if isinstance(verdict, Yes):
            assert replay(verdict.deriv) == [], f.name
            checked += 1
    assert checked == 9
