from __future__ import annotations
from typing import List


class TvbError(Exception):
    """Base class for every error raised by tvbkit."""


class ParseError(TvbError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(f"{where}{message}")


class ValidationError(TvbError):
    """Input data violates a structural condition (fan, ideal, diagram).

    `diagnostics` keeps one human-readable entry per failed check.
    """

    def __init__(self, message: str, diagnostics: List[str] | None = None):
        self.diagnostics = list(diagnostics or [])
        super().__init__(message)


class CertificateError(TvbError):
    """No Sym-degree-1 certificate holds and no override was requested."""


class MatroidError(TvbError):
    pass


class PolyhedralError(TvbError):
    pass


class EnumerationLimitError(PolyhedralError):
    pass


class ClassificationMismatchError(TvbError):
    """Closed-form and generic classifications disagree."""
