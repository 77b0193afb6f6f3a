"""Exception hierarchy shared by every module."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceLocation:
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


class MwqError(Exception):
    """Base class for all package errors."""


class ParseError(MwqError):
    def __init__(self, message: str, location: SourceLocation):
        super().__init__(f"{location}: {message}")
        self.message = message
        self.location = location


class ValidationError(MwqError):
    def __init__(self, message: str, location: SourceLocation | None = None):
        text = f"{location}: {message}" if location else message
        super().__init__(text)
        self.message = message
        self.location = location


class InconsistentKBError(MwqError):
    def __init__(self, witness: str):
        super().__init__(f"knowledge base is inconsistent (witness: {witness})")
        self.witness = witness


class OracleRefusal(MwqError):
    """The reference oracle declines an input it cannot decide soundly."""


class InvariantViolation(MwqError):
    """An internal consistency check failed."""
