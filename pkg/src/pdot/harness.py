"""Dynamic checks of progress, preservation and canonical forms on traces.

For a program that typechecks at ``T``, every configuration of its trace
is checked: the store gives rise to an environment by synthesizing each
stored value's type in allocation order; that environment must be inert
and well-formed; the term must typecheck against ``T`` under it; each
application must look up a lambda whose parameter type admits the
argument's declared type; the store must only grow; and the run must
never get stuck.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path as FilePath
from typing import Optional

from .diagnostics import PdotError
from .eval import (
    DEFAULT_LOOKUP_FUEL, Configuration, Found, Stuck, Store, TraceEntry, lookup_star, trace,
)
from .parser import SourceProgram, parse_program
from .printer import pretty
from .syntax import All, App, Lam, Let, Path, Term, Type, is_value
from .typecheck.checker import Checker, TypeFailure, check, subtype, typecheck
from .typecheck.derivation import DEFAULT_FUEL, EMPTY, Env, No, OutOfFuel, Yes
from .typecheck.relations import inert_env, untypeable_paths

DEFAULT_HARNESS_STEPS = 1_000

CHECKS = ("progress", "preservation", "canonical", "monotone", "inert-wf")


@dataclass
class FileReport:
    name: str
    status: str = "pass"
    note: str = ""
    steps: int = 0
    outcome: str = ""
    violations: dict[str, list[str]] = field(default_factory=lambda: {c: [] for c in CHECKS})
    unknown: int = 0

    def fail(self, check: str, message: str) -> None:
        self.violations[check].append(message)
        self.status = "fail"

    @property
    def total_violations(self) -> int:
        return sum(len(v) for v in self.violations.values())


def store_env(store: Store, fuel: int = DEFAULT_FUEL) -> tuple[Optional[Env], str]:
    """The environment induced by a store, or None with a reason."""
    env = EMPTY
    for name, v in store:
        c = Checker(fuel)
        try:
            t, _ = c.synth(env, v)
        except (TypeFailure, OutOfFuel) as e:
            return None, f"cannot type stored value '{name}': {getattr(e, 'message', 'fuel')}"
        env = env.extend(name, t)
    return env, ""


def redex(t: Term) -> Term:
    """The subterm the next reduction step acts on."""
    while isinstance(t, Let) and not (isinstance(t.bound, Path) or is_value(t.bound)):
        t = t.bound
    return t


class _Checker:
    def __init__(self, report: FileReport, program_type: Type, fuel: int, lookup_fuel: int):
        self.report = report
        self.type = program_type
        self.fuel = fuel
        self.lookup_fuel = lookup_fuel
        self.env_cache: dict[Store, tuple[Optional[Env], str]] = {}
        self.seen: set[Configuration] = set()

    def env_for(self, store: Store) -> tuple[Optional[Env], str]:
        hit = self.env_cache.get(store)
        if hit is None:
            hit = store_env(store, self.fuel)
            self.env_cache[store] = hit
            env, why = hit
            if env is None:
                self.report.fail("inert-wf", why)
            else:
                if not inert_env(env):
                    self.report.fail("inert-wf", f"environment {env.names()} is not inert")
                bad = untypeable_paths(env)
                if bad:
                    self.report.fail("inert-wf", "untypeable paths in environment: "
                                     + ", ".join(str(p) for p in bad))
        return hit

    def entry(self, e: TraceEntry) -> None:
        c = e.configuration
        if c in self.seen:
            return
        self.seen.add(c)
        env, _ = self.env_for(c.store)
        if env is None:
            return
        self.preservation(e, env)
        r = redex(c.term)
        if isinstance(r, App):
            self.canonical(e, env, r)

    def preservation(self, e: TraceEntry, env: Env) -> None:
        v = check(env, e.configuration.term, self.type, self.fuel)
        if isinstance(v, Yes):
            return
        # fall back to synthesis followed by subtyping against the program type
        s = typecheck(e.configuration.term, self.fuel, env)
        if isinstance(s, Yes):
            sub = subtype(env, s.type, self.type, self.fuel)
            if not isinstance(sub, No):
                self.report.unknown += not isinstance(sub, Yes)
                return
        elif not isinstance(s, No) and not isinstance(v, No):
            self.report.unknown += 1
            return
        reason = v.reason if isinstance(v, No) else "fuel exhausted"
        self.report.fail("preservation", f"step {e.index}: {pretty(e.configuration.term)} "
                         f"does not have type {pretty(self.type)}: {reason}")

    def canonical(self, e: TraceEntry, env: Env, app: App) -> None:
        res = lookup_star(e.configuration.store, app.fun, self.lookup_fuel)
        if not (isinstance(res, Found) and isinstance(res.value, Lam)):
            self.report.fail("canonical", f"step {e.index}: '{app.fun}' does not look up "
                             f"to a lambda: {res}")
            return
        try:
            funs = [t for t, _ in Checker(self.fuel).facts(env, app.fun) if isinstance(t, All)]
        except OutOfFuel:
            self.report.unknown += 1
            return
        if not funs:
            self.report.fail("canonical", f"step {e.index}: '{app.fun}' has no function type")
            return
        sub = subtype(env, funs[0].param, res.value.param, self.fuel)
        if isinstance(sub, No):
            self.report.fail("canonical", f"step {e.index}: declared parameter "
                             f"{pretty(funs[0].param)} is not a subtype of the lambda's "
                             f"{pretty(res.value.param)}")


def check_program(src: SourceProgram, steps: int = DEFAULT_HARNESS_STEPS,
                  lookup_fuel: int = DEFAULT_LOOKUP_FUEL, fuel: int = DEFAULT_FUEL) -> FileReport:
    report = FileReport(src.origin)
    try:
        program = parse_program(src)
    except PdotError as e:
        report.status, report.note = "skipped", e.diagnostics[0].render()
        return report
    verdict = typecheck(program, fuel)
    if not isinstance(verdict, Yes):
        report.status = "skipped"
        report.note = "does not typecheck" + (f" ({verdict.rule})" if isinstance(verdict, No) else "")
        return report
    entries, outcome = trace(program, steps, lookup_fuel)
    report.steps = len(entries) - 1
    report.outcome = type(outcome).__name__
    checker = _Checker(report, verdict.type, fuel, lookup_fuel)
    prev: Optional[Store] = None
    for e in entries:
        store = e.configuration.store
        if prev is not None and store.bindings[:len(prev)] != prev.bindings:
            report.fail("monotone", f"step {e.index}: the store lost or changed a binding")
        prev = store
        checker.entry(e)
    if isinstance(outcome, Stuck):
        report.fail("progress", f"stuck: {outcome.reason}")
    return report


def run_harness(directory: str, steps: int = DEFAULT_HARNESS_STEPS,
                lookup_fuel: int = DEFAULT_LOOKUP_FUEL, fuel: int = DEFAULT_FUEL) -> list[FileReport]:
    reports = []
    for f in sorted(FilePath(directory).glob("*.pdot")):
        src = SourceProgram(f.read_text(encoding="utf-8"), str(f))
        reports.append(check_program(src, steps, lookup_fuel, fuel))
    return reports


def format_matrix(reports: list[FileReport]) -> str:
    header = ["file", "steps", "outcome", *CHECKS, "result"]
    rows = []
    for r in reports:
        if r.status == "skipped":
            rows.append([r.name, "-", "-", *("-" for _ in CHECKS), f"skipped: {r.note}"])
            continue
        marks = ["ok" if not r.violations[c] else str(len(r.violations[c])) for c in CHECKS]
        rows.append([r.name, str(r.steps), r.outcome, *marks, r.status])
    widths = [max(len(x) for x in col) for col in zip(header, *rows)] if rows else map(len, header)
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in rows]
    return "\n".join(lines)
