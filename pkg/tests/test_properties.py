"""Randomized properties.  Every suite runs 1,000 examples from a fixed seed."""
import os

from hypothesis import HealthCheck, assume, given, seed, settings
from hypothesis import strategies as st

from strategies import FREE, inert_envs, paths, terms, types
from pdot.parser import parse_term, parse_type
from pdot.printer import pretty
from pdot.syntax import (
    TOP, And, close, free_names, iter_paths, open_with_path, repl_all, repl_candidates,
    subst_name, var,
)
from pdot.typecheck import (
    Canonical, Cyclic, No, Unknown, Yes, canonical_path, member_bounds, path_types, subtype,
    synth,
)
from pdot.typecheck.relations import precise_step

SEED = 20_231_016

PROPERTY = settings(
    max_examples=int(os.environ.get("PDOT_EXAMPLES", 1000)),
    deadline=None,
    database=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large,
                           HealthCheck.filter_too_much],
)


def fixed(test):
    return seed(SEED)(PROPERTY(test))


# 1. parser round trip


@fixed
@given(terms())
def test_round_trip_terms(t):
    assert parse_term(pretty(t), FREE) == t


@fixed
@given(types())
def test_round_trip_types(t):
    assert parse_type(pretty(t), FREE) == t


# 2. open/close inverse


@fixed
@given(types(), st.sampled_from(FREE))
def test_open_close_types(t, x):
    assert open_with_path(close(t, x), var(x)) == t


@fixed
@given(terms(), st.sampled_from(FREE))
def test_open_close_terms(t, x):
    assert open_with_path(close(t, x), var(x)) == t


# 3. substitution of an absent name


@fixed
@given(terms(free=("y", "z")), paths(0, ("y", "z")))
def test_subst_absent_name_is_noop(t, p):
    assert "x" not in free_names(t)
    assert subst_name("x", p, t) == t


# 4. single replacement is symmetric


@fixed
@given(types(), paths(0), paths(0))
def test_repl_candidates_symmetric(t, p, q):
    for u in repl_candidates(p, q, t):
        assert t in repl_candidates(q, p, u)


# 5. repl_all removes every p-prefixed path


@fixed
@given(types(), paths(0), paths(0))
def test_repl_all_eliminates_prefix(t, p, q):
    assume(not q.has_prefix(p))
    out = repl_all(p, q, t)
    assert not any(r.has_prefix(p) for r, _ in iter_paths(out))
    assert bool(repl_candidates(p, q, t)) == (out != t) or not repl_candidates(p, q, t)


# 6. subtype reflexivity


@st.composite
def env_and_type(draw):
    env = draw(inert_envs())
    return env, draw(types(free=tuple(env.names())))


@fixed
@given(env_and_type())
def test_subtype_reflexive(et):
    env, t = et
    assert isinstance(subtype(env, t, t), Yes)


# 7. fuel monotonicity


@st.composite
def env_and_two_types(draw):
    env = draw(inert_envs())
    names = tuple(env.names())
    return env, draw(types(free=names, size=3)), draw(types(free=names, size=3))


@fixed
@given(env_and_two_types(), st.integers(0, 60))
def test_subtype_fuel_monotone(ett, low):
    env, s, t = ett
    small, big = subtype(env, s, t, low), subtype(env, s, t, 10_000)
    if not isinstance(small, Unknown):
        assert type(small) is type(big)


@st.composite
def env_and_term(draw):
    env = draw(inert_envs())
    return env, draw(terms(free=tuple(env.names()), size=3))


@fixed
@given(env_and_term(), st.integers(0, 60))
def test_synth_fuel_monotone(et, low):
    env, t = et
    small, big = synth(env, t, low), synth(env, t, 10_000)
    if not isinstance(small, Unknown):
        assert type(small) is type(big)
        if isinstance(small, Yes):
            assert small.type == big.type


# 8. canonical_path terminates and is well formed


@st.composite
def env_and_path(draw):
    env = draw(inert_envs())
    return env, draw(paths(0, tuple(env.names()), max_len=4))


@fixed
@given(env_and_path())
def test_canonical_path_terminates(ep):
    env, p = ep
    res = canonical_path(env, p)
    step = precise_step(env)
    if isinstance(res, Canonical):
        assert step(res.path) is None
    else:
        assert isinstance(res, Cyclic) and res.paths
        assert member_bounds(env, p, "A") is None


# Further invariants over inert environments


@fixed
@given(env_and_path(), st.sampled_from(("A", "B")))
def test_member_bounds_are_equal(ep, label):
    env, p = ep
    bounds = member_bounds(env, p, label)
    if bounds is not None:
        assert bounds[0] == bounds[1]


@fixed
@given(env_and_path())
def test_cyclic_paths_only_have_singletons(ep):
    env, p = ep
    if isinstance(canonical_path(env, p), Cyclic):
        for t in path_types(env, p):
            assert type(t).__name__ in ("Sngl", "Top")


@fixed
@given(env_and_two_types())
def test_no_answer_never_contradicts_reflexive_widening(ett):
    env, s, _ = ett
    assert not isinstance(subtype(env, And(s, s), s), No)
    assert isinstance(subtype(env, s, TOP), Yes)
