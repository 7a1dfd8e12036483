"""A reference implementation of the pDOT calculus: parser, typechecker and interpreter."""
from .parser import parse_path, parse_program, parse_term, parse_type
from .printer import dump_ast, pretty

__version__ = "0.1.0"

__all__ = ["parse_path", "parse_program", "parse_term", "parse_type", "dump_ast", "pretty"]
