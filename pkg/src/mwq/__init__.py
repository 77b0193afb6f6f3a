"""Query answering under minimal-world semantics for EL ontologies, with a metric temporal extension."""

from .answers import AnswerSet
from .errors import InconsistentKBError, InvariantViolation, MwqError, OracleRefusal, ParseError, ValidationError
from .intervals import IntervalSet
from .kb import KnowledgeBase
from .pipeline import answer_query, check_consistency, load_kb, load_query
from .textio import parse_kb, parse_query, serialize_kb, write_answers

__version__ = "0.1.0"

__all__ = [
    "AnswerSet",
    "InconsistentKBError",
    "IntervalSet",
    "InvariantViolation",
    "KnowledgeBase",
    "MwqError",
    "OracleRefusal",
    "ParseError",
    "ValidationError",
    "answer_query",
    "check_consistency",
    "load_kb",
    "load_query",
    "parse_kb",
    "parse_query",
    "serialize_kb",
    "write_answers",
]
