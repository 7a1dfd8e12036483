"""The ``pdot`` command line: check, run, trace, typeof, lookup, harness, dump."""
from __future__ import annotations

import json
import os
import sys
from typing import Optional

import click

from . import __version__
from .diagnostics import Diagnostic, PdotError
from .eval import (
    DEFAULT_LOOKUP_FUEL, DEFAULT_RUN_FUEL, Configuration, Cycle, Diverged, Found, FuelOut,
    LookupFact, LookupOutcome, LookupStuck, NormalPath, RunOutcome, Stuck, TraceEntry,
    ValueResult, drive, lookup_star,
)
from .harness import DEFAULT_HARNESS_STEPS, format_matrix, run_harness, store_env
from .parser import SourceProgram, parse_path, parse_program
from .printer import dump_ast, pretty
from .syntax import Term
from .typecheck import DEFAULT_FUEL, No, Yes, path_types, typecheck

EXIT_OK = 0
EXIT_TYPE = 1
EXIT_USAGE = 2
EXIT_DIVERGED = 3
EXIT_STUCK = 4

FILE = click.Path(exists=True, dir_okay=False, readable=True)


class Session:
    """Options shared by every subcommand."""

    def __init__(self, fuel: Optional[int], lookup_fuel: int, as_json: bool, unsafe: bool):
        self.fuel = fuel
        self.lookup_fuel = lookup_fuel
        self.as_json = as_json
        self.unsafe = unsafe

    def fuel_or(self, default: int) -> int:
        return default if self.fuel is None else self.fuel

    def emit(self, text: str, data: dict) -> None:
        if self.as_json:
            click.echo(json.dumps(data, indent=2, ensure_ascii=False))
        else:
            click.echo(text)

    def fail(self, diags: list[Diagnostic], code: int = EXIT_TYPE) -> None:
        if self.as_json:
            click.echo(json.dumps({"ok": False, "diagnostics": [d.to_json() for d in diags]},
                                  indent=2, ensure_ascii=False))
        else:
            for d in diags:
                click.echo(d.render(), err=True)
        sys.exit(code)


def _env_fuel() -> Optional[int]:
    raw = os.environ.get("PDOT_FUEL")
    if raw is None or raw == "":
        return None
    try:
        value = int(raw)
    except ValueError:
        raise click.UsageError(f"PDOT_FUEL must be a non-negative integer, not {raw!r}")
    if value < 0:
        raise click.UsageError("PDOT_FUEL must be a non-negative integer")
    return value


@click.group()
@click.version_option(__version__, prog_name="pdot")
@click.option("--fuel", type=click.IntRange(min=0), default=None,
              help="Step budget: typechecking rule applications for check, reduction "
                   "steps for run/trace/typeof/lookup, steps per program for harness. "
                   "Defaults to $PDOT_FUEL, else the command's built-in default.")
@click.option("--lookup-fuel", type=click.IntRange(min=0), default=DEFAULT_LOOKUP_FUEL,
              show_default=True, help="Step budget for each path lookup.")
@click.option("--json", "as_json", is_flag=True, help="Print machine-readable JSON.")
@click.option("--unsafe", is_flag=True, help="Run programs without typechecking them first.")
@click.pass_context
def main(ctx: click.Context, fuel, lookup_fuel, as_json, unsafe) -> None:
    """Parse, typecheck and run pDOT programs."""
    if fuel is None:
        fuel = _env_fuel()
    ctx.obj = Session(fuel, lookup_fuel, as_json, unsafe)


def _load(s: Session, file: str) -> Term:
    try:
        with open(file, encoding="utf-8") as fh:
            text = fh.read()
    except (OSError, UnicodeDecodeError) as e:
        click.echo(f"{file}: error: io: {e}", err=True)
        sys.exit(EXIT_USAGE)
    try:
        return parse_program(SourceProgram(text, file))
    except PdotError as e:
        s.fail(e.diagnostics)
        raise AssertionError("unreachable")


def _require_typed(s: Session, file: str, program: Term) -> bool:
    """Typecheck unless --unsafe; exit on rejection.  Returns whether it was checked."""
    if s.unsafe:
        return False
    v = typecheck(program, DEFAULT_FUEL)
    if not isinstance(v, Yes):
        s.fail([_verdict_diagnostic(v, file, DEFAULT_FUEL)])
    return True


def _verdict_diagnostic(v, file: str, fuel: int) -> Diagnostic:
    if isinstance(v, No):
        return v.diagnostic(file)
    return Diagnostic(f"typechecking ran out of fuel after {fuel} steps; raise it with --fuel",
                      "fuel", origin=file)


# Outcome rendering


def lookup_json(res: LookupOutcome) -> dict:
    match res:
        case Found(v, steps):
            return {"result": "value", "value": pretty(v), "steps": steps}
        case Cycle(paths):
            return {"result": "cycle", "paths": sorted(pretty(p) for p in paths)}
        case LookupStuck(reason):
            return {"result": "stuck", "reason": reason}
        case FuelOut(n):
            return {"result": "fuel-out", "fuel": n}
    raise TypeError(res)


def lookup_text(res: LookupOutcome) -> str:
    match res:
        case Found(v, steps):
            return f"{pretty(v)}  ({steps} steps)"
        case Cycle(paths):
            return "cycle through " + ", ".join(sorted(pretty(p) for p in paths))
        case LookupStuck(reason):
            return f"stuck: {reason}"
        case FuelOut(n):
            return f"no value within {n} lookup steps"
    raise TypeError(res)


def outcome_json(o: RunOutcome) -> dict:
    match o:
        case ValueResult(v, steps):
            return {"outcome": "value", "steps": steps, "value": pretty(v)}
        case NormalPath(p, steps, res):
            return {"outcome": "normal-path", "steps": steps, "path": pretty(p),
                    "resolution": lookup_json(res)}
        case Diverged(fuel):
            return {"outcome": "diverged", "fuel": fuel}
        case Stuck(c, reason):
            return {"outcome": "stuck", "reason": reason, "term": pretty(c.term)}
    raise TypeError(o)


def outcome_text(o: RunOutcome) -> str:
    match o:
        case ValueResult(v, steps):
            return f"value after {steps} steps:\n  {pretty(v)}"
        case NormalPath(p, steps, res):
            return (f"normal form after {steps} steps: {pretty(p)}\n"
                    f"  resolves to: {lookup_text(res)}")
        case Diverged(fuel):
            return f"diverged: no normal form within {fuel} steps"
        case Stuck(c, reason):
            return f"stuck: {reason}\n  term: {pretty(c.term)}"
    raise TypeError(o)


def outcome_code(o: RunOutcome) -> int:
    if isinstance(o, Diverged):
        return EXIT_DIVERGED
    if isinstance(o, Stuck):
        return EXIT_STUCK
    return EXIT_OK


def _finish_run(s: Session, o: RunOutcome, typed: bool, extra: Optional[dict] = None) -> None:
    data = outcome_json(o)
    if extra:
        data = {**extra, **data}
    s.emit(outcome_text(o), data)
    if isinstance(o, Stuck) and typed:
        click.echo("METATHEORY VIOLATION: a well-typed program got stuck", err=True)
    sys.exit(outcome_code(o))


# Commands


@main.command()
@click.argument("file", type=FILE)
@click.pass_obj
def check(s: Session, file: str) -> None:
    """Typecheck FILE and print its type."""
    program = _load(s, file)
    fuel = s.fuel_or(DEFAULT_FUEL)
    v = typecheck(program, fuel)
    if not isinstance(v, Yes):
        s.fail([_verdict_diagnostic(v, file, fuel)])
    s.emit(pretty(v.type), {"ok": True, "type": pretty(v.type),
                            "derivation_size": v.deriv.size()})


@main.command()
@click.argument("file", type=FILE)
@click.pass_obj
def run(s: Session, file: str) -> None:
    """Typecheck and run FILE to a normal form."""
    program = _load(s, file)
    typed = _require_typed(s, file, program)
    o, _ = drive(program, s.fuel_or(DEFAULT_RUN_FUEL), s.lookup_fuel)
    _finish_run(s, o, typed)


@main.command()
@click.argument("file", type=FILE)
@click.pass_obj
def trace(s: Session, file: str) -> None:
    """Run FILE, printing every reduction step."""
    program = _load(s, file)
    typed = _require_typed(s, file, program)
    entries: list[TraceEntry] = []
    o, _ = drive(program, s.fuel_or(DEFAULT_RUN_FUEL), s.lookup_fuel, entries.append)
    if s.as_json:
        steps = [{"step": e.index, "rule": e.rule, "term": pretty(e.configuration.term)}
                 for e in entries[1:]]
        _finish_run(s, o, typed, {"trace": steps})
    for e in entries[1:]:
        click.echo(e.line())
    _finish_run(s, o, typed)


def _final_configuration(s: Session, file: str) -> Configuration:
    program = _load(s, file)
    _require_typed(s, file, program)
    _, c = drive(program, DEFAULT_RUN_FUEL if s.fuel is None else s.fuel, s.lookup_fuel)
    return c


@main.command()
@click.argument("file", type=FILE)
@click.argument("path")
@click.pass_obj
def typeof(s: Session, file: str, path: str) -> None:
    """Print the types of PATH in the environment FILE's run ends with."""
    c = _final_configuration(s, file)
    env, why = store_env(c.store)
    if env is None:
        s.fail([Diagnostic(why, "Var", origin=file)])
    try:
        p = parse_path(path, env.names(), "<path>")
    except PdotError as e:
        s.fail(e.diagnostics)
    types = path_types(env, p, DEFAULT_FUEL)
    if not types:
        s.fail([Diagnostic(f"'{path}' has no type", "Fld-E", origin="<path>")])
    shown = [pretty(t) for t in types]
    s.emit("\n".join(shown), {"ok": True, "path": path, "types": shown})


@main.command()
@click.argument("file", type=FILE)
@click.argument("path")
@click.pass_obj
def lookup(s: Session, file: str, path: str) -> None:
    """Look PATH up in the store FILE's run ends with."""
    c = _final_configuration(s, file)
    try:
        p = parse_path(path, c.store.names(), "<path>")
    except PdotError as e:
        s.fail(e.diagnostics)
    facts: list[LookupFact] = []
    res = lookup_star(c.store, p, s.lookup_fuel, facts)
    lines = [str(f) for f in facts] + [f"{path} ~>* {lookup_text(res)}"]
    s.emit("\n".join(lines), {
        "path": path,
        "steps": [{"rule": f.rule, "from": pretty(f.source), "to": pretty(f.target)}
                  for f in facts],
        **lookup_json(res),
    })
    if isinstance(res, LookupStuck):
        sys.exit(EXIT_STUCK)
    if isinstance(res, (Cycle, FuelOut)):
        sys.exit(EXIT_DIVERGED)


@main.command()
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
@click.pass_obj
def harness(s: Session, directory: str) -> None:
    """Check progress, preservation and canonical forms on every program in DIRECTORY."""
    reports = run_harness(directory, s.fuel_or(DEFAULT_HARNESS_STEPS), s.lookup_fuel)
    failed = [r for r in reports if r.status == "fail"]
    if s.as_json:
        s.emit("", {"ok": not failed, "files": [
            {"file": r.name, "status": r.status, "note": r.note, "steps": r.steps,
             "outcome": r.outcome, "violations": r.violations, "unknown": r.unknown}
            for r in reports]})
    else:
        click.echo(format_matrix(reports))
        for r in failed:
            for check_name, messages in r.violations.items():
                for m in messages:
                    click.echo(f"{r.name}: {check_name}: {m}")
        total = sum(r.total_violations for r in reports)
        checked = sum(r.status != "skipped" for r in reports)
        click.echo(f"{checked} programs checked, {len(reports) - checked} skipped, "
                   f"{total} violations")
    sys.exit(EXIT_TYPE if failed else EXIT_OK)


@main.command()
@click.argument("file", type=FILE)
@click.pass_obj
def dump(s: Session, file: str) -> None:
    """Print the parsed AST of FILE as JSON."""
    click.echo(dump_ast(_load(s, file)))


if __name__ == "__main__":
    main()
