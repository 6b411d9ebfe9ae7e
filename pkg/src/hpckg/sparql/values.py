"""Runtime value space for expression evaluation.

Terms from the store are converted into plain Python values plus a few
tagged wrappers.  Any operation on incompatible operands produces the
``ERROR`` sentinel, which filters drop and aggregates skip; evaluation
itself never raises on type mismatches.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime, timezone

from hpckg.rdf_core import Term, TermKind, parse_datetime
from hpckg.vocab import (
    XSD_DATETIME,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_DURATION,
    XSD_FLOAT,
    XSD_INTEGER,
    XSD_STRING,
)


class _Error:
    __slots__ = ()

    def __repr__(self):
        return "ERROR"


#: Sentinel for failed evaluation; distinct from unbound (None).
ERROR = _Error()


@dataclass(frozen=True, slots=True)
class IriVal:
    iri: str


@dataclass(frozen=True, slots=True)
class BlankVal:
    label: str


@dataclass(frozen=True, slots=True)
class DateTimeVal:
    epoch: float


@dataclass(frozen=True, slots=True)
class DurationVal:
    seconds: float


_DURATION_PART = re.compile(
    r"^(?P<sign>-)?P(?:(?P<d>\d+)D)?"
    r"(?:T(?:(?P<h>\d+)H)?(?:(?P<m>\d+)M)?(?:(?P<s>\d+(?:\.\d+)?)S)?)?$"
)


def parse_duration_seconds(lex: str) -> float:
    """Seconds for day/time durations; years and months are rejected."""
    m = _DURATION_PART.match(lex)
    if not m:
        raise ValueError(f"unsupported duration: {lex!r}")
    total = (
        int(m.group("d") or 0) * 86_400
        + int(m.group("h") or 0) * 3_600
        + int(m.group("m") or 0) * 60
        + float(m.group("s") or 0.0)
    )
    return -total if m.group("sign") else total


def term_to_value(term: Term):
    """Convert a stored term into its runtime value (or ERROR)."""
    if term.kind is TermKind.IRI:
        return IriVal(term.text)
    if term.kind is TermKind.BLANK:
        return BlankVal(term.text)
    dt = term.datatype
    lex = term.text
    try:
        if dt == XSD_INTEGER:
            return int(lex)
        if dt in (XSD_FLOAT, XSD_DOUBLE, XSD_DECIMAL):
            return float(lex)
        if dt == XSD_STRING:
            return lex
        if dt == XSD_DATETIME:
            return DateTimeVal(parse_datetime(lex).timestamp())
        if dt == XSD_DURATION:
            return DurationVal(parse_duration_seconds(lex))
    except ValueError:
        return ERROR
    return ERROR


def value_to_term(value) -> Term | None:
    """Best-effort term for a computed value, for re-joining bound vars."""
    if isinstance(value, bool):
        return None
    if isinstance(value, int):
        return Term.integer(value)
    if isinstance(value, float):
        return Term.double(value)
    if isinstance(value, str):
        return Term.string(value)
    if isinstance(value, IriVal):
        return Term.iri(value.iri)
    if isinstance(value, BlankVal):
        return Term.blank(value.label)
    return None


def is_numeric(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


_KIND_RANK = {
    type(None): 0,
    BlankVal: 1,
    IriVal: 2,
    bool: 3,
    str: 5,
    DateTimeVal: 6,
    DurationVal: 7,
    _Error: 8,
}


def sort_key(value) -> tuple:
    """Total order over the value space for deterministic ORDER BY."""
    if is_numeric(value):
        return (4, float(value))
    rank = _KIND_RANK.get(type(value))
    if rank is None:
        return (9, repr(value))
    if value is None or value is ERROR:
        return (rank, 0)
    if isinstance(value, BlankVal):
        return (rank, value.label)
    if isinstance(value, IriVal):
        return (rank, value.iri)
    if isinstance(value, bool):
        return (rank, int(value))
    if isinstance(value, DateTimeVal):
        return (rank, value.epoch)
    if isinstance(value, DurationVal):
        return (rank, value.seconds)
    return (rank, value)


def render_value(value) -> str:
    """Lexical cell text for CSV / aligned-table output."""
    if value is None or value is ERROR:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, str):
        return value
    if isinstance(value, IriVal):
        return value.iri
    if isinstance(value, BlankVal):
        return f"_:{value.label}"
    if isinstance(value, DateTimeVal):
        return datetime.fromtimestamp(value.epoch, tz=timezone.utc).isoformat()
    if isinstance(value, DurationVal):
        seconds = value.seconds
        if seconds == int(seconds):
            return f"PT{int(seconds)}S"
        return f"PT{seconds}S"
    return str(value)
