"""Algorithmic typing for pDOT with checkable derivations."""
from .checker import Checker, check, check_defs, path_types, subtype, synth, typecheck, wf_env
from .derivation import DEFAULT_FUEL, EMPTY, Deriv, Env, No, Unknown, Verdict, Yes
from .relations import (
    Canonical, Cyclic, canonical_path, inert, inert_env, member_bounds, precise_types,
    record_type, tight_bounds,
)

__all__ = [
    "Checker", "check", "check_defs", "path_types", "subtype", "synth", "typecheck", "wf_env",
    "DEFAULT_FUEL", "EMPTY", "Deriv", "Env", "No", "Unknown", "Verdict", "Yes",
    "Canonical", "Cyclic", "canonical_path", "inert", "inert_env", "member_bounds",
    "precise_types", "record_type", "tight_bounds",
]
