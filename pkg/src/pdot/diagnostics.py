"""Source spans, diagnostics and the error types shared by every phase."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class Span:
    """A 1-based region of source text."""

    line: int
    col: int
    end_line: int
    end_col: int
    offset: int = 0
    length: int = 0


@dataclass(frozen=True)
class Diagnostic:
    """One reportable problem, tagged with the rule or phase that raised it."""

    message: str
    rule: str
    span: Optional[Span] = None
    severity: str = "error"
    origin: str = "<input>"

    def render(self) -> str:
        line, col = (self.span.line, self.span.col) if self.span else (1, 1)
        return f"{self.origin}:{line}:{col}: {self.severity}: {self.rule}: {self.message}"

    def to_json(self) -> dict:
        out = {"severity": self.severity, "rule": self.rule, "message": self.message,
               "file": self.origin}
        if self.span is not None:
            out.update(line=self.span.line, col=self.span.col,
                       end_line=self.span.end_line, end_col=self.span.end_col)
        return out


class PdotError(Exception):
    """Carries one or more diagnostics."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(d.render() for d in self.diagnostics))


class ParseError(PdotError):
    """Lexical, syntactic or scoping failure."""
