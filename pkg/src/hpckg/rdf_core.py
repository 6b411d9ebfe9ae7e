"""RDF term model and an in-memory, dictionary-encoded triple store.

Terms are immutable and validated on construction.  The store interns
every distinct term to a dense integer id and keeps the triple set as id
tuples, with three sorted indexes (SPO, POS, OSP) so that any triple
pattern is answered by a binary-searched range scan.

Term equality is lexical: two literals are equal only when both the
lexical form and the datatype IRI match ("01" and "1" are distinct
terms).  Value comparison is the query engine's job.
"""

from __future__ import annotations

import re
from bisect import bisect_left
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from typing import Iterable, Iterator, Optional

from hpckg.errors import SealedStoreError, TermError, TripleError
from hpckg.vocab import (
    XSD_DATETIME,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_DURATION,
    XSD_FLOAT,
    XSD_INTEGER,
    XSD_STRING,
)


class TermKind(Enum):
    IRI = "iri"
    LITERAL = "literal"
    BLANK = "blank"


_BLANK_LABEL_RE = re.compile(r"[A-Za-z0-9_]+\Z")
_INTEGER_RE = re.compile(r"[+-]?[0-9]+\Z")
_DECIMAL_RE = re.compile(r"[+-]?([0-9]+(\.[0-9]*)?|\.[0-9]+)\Z")
_DURATION_RE = re.compile(
    r"-?P(?=.)([0-9]+Y)?([0-9]+M)?([0-9]+D)?"
    r"(T(?=.)([0-9]+H)?([0-9]+M)?([0-9]+(\.[0-9]+)?S)?)?\Z"
)
_FLOAT_SPECIALS = {"INF", "+INF", "-INF", "NaN"}

# Characters never allowed inside an IRI as serialized here.
_IRI_BAD = set(' \t\n\r<>"{}|^`\\')


def _valid_float(lex: str) -> bool:
    if lex in _FLOAT_SPECIALS:
        return True
    try:
        float(lex)
    except ValueError:
        return False
    return True


def _valid_datetime(lex: str) -> bool:
    try:
        parse_datetime(lex)
    except ValueError:
        return False
    return True


def parse_datetime(lex: str) -> datetime:
    """Parse an ISO 8601 dateTime, accepting a trailing ``Z``."""
    text = lex.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    return datetime.fromisoformat(text)


_LEXICAL_CHECKS = {
    XSD_INTEGER: lambda lex: bool(_INTEGER_RE.match(lex)),
    XSD_DECIMAL: lambda lex: bool(_DECIMAL_RE.match(lex)),
    XSD_FLOAT: _valid_float,
    XSD_DOUBLE: _valid_float,
    XSD_DATETIME: _valid_datetime,
    XSD_DURATION: lambda lex: bool(_DURATION_RE.match(lex)),
    XSD_STRING: lambda lex: True,
}

#: Datatype IRIs a literal may carry.
KNOWN_DATATYPES = frozenset(_LEXICAL_CHECKS)


@dataclass(frozen=True, slots=True)
class Term:
    """One RDF term: an IRI, a typed literal, or a blank node.

    ``text`` holds the IRI string, the literal lexical form, or the blank
    node label depending on ``kind``; ``datatype`` is set for literals
    only.
    """

    kind: TermKind
    text: str
    datatype: Optional[str] = None

    def __post_init__(self):
        if self.kind is TermKind.IRI:
            if self.datatype is not None:
                raise TermError("IRI terms carry no datatype")
            if not self.text:
                raise TermError("empty IRI")
            if any(c in _IRI_BAD or ord(c) < 0x20 for c in self.text):
                raise TermError(f"IRI contains forbidden character: {self.text!r}")
        elif self.kind is TermKind.BLANK:
            if self.datatype is not None:
                raise TermError("blank nodes carry no datatype")
            if not _BLANK_LABEL_RE.match(self.text):
                raise TermError(f"invalid blank node label: {self.text!r}")
        else:
            if self.datatype not in KNOWN_DATATYPES:
                raise TermError(f"unknown literal datatype: {self.datatype!r}")
            if not _LEXICAL_CHECKS[self.datatype](self.text):
                raise TermError(
                    f"invalid lexical form {self.text!r} for <{self.datatype}>"
                )

    # -- constructors ----------------------------------------------------

    @staticmethod
    def iri(value: str) -> "Term":
        return Term(TermKind.IRI, value)

    @staticmethod
    def literal(lex: str, datatype: str) -> "Term":
        return Term(TermKind.LITERAL, lex, datatype)

    @staticmethod
    def blank(label: str) -> "Term":
        return Term(TermKind.BLANK, label)

    @staticmethod
    def integer(value: int) -> "Term":
        return Term(TermKind.LITERAL, str(value), XSD_INTEGER)

    @staticmethod
    def double(value: float) -> "Term":
        return Term(TermKind.LITERAL, repr(float(value)), XSD_DOUBLE)

    @staticmethod
    def float_(value: float) -> "Term":
        return Term(TermKind.LITERAL, repr(float(value)), XSD_FLOAT)

    @staticmethod
    def string(value: str) -> "Term":
        return Term(TermKind.LITERAL, value, XSD_STRING)

    # -- predicates ------------------------------------------------------

    @property
    def is_iri(self) -> bool:
        return self.kind is TermKind.IRI

    @property
    def is_literal(self) -> bool:
        return self.kind is TermKind.LITERAL

    @property
    def is_blank(self) -> bool:
        return self.kind is TermKind.BLANK


@dataclass(frozen=True, slots=True)
class Triple:
    """A subject-predicate-object statement."""

    subject: Term
    predicate: Term
    object: Term

    def __post_init__(self):
        if self.subject.is_literal:
            raise TripleError("triple subject must not be a literal")
        if not self.predicate.is_iri:
            raise TripleError("triple predicate must be an IRI")


@dataclass(frozen=True, slots=True)
class TriplePattern:
    """A triple with optional wildcard slots (``None`` matches anything)."""

    subject: Optional[Term] = None
    predicate: Optional[Term] = None
    object: Optional[Term] = None


@dataclass(frozen=True, slots=True)
class StoreStats:
    triple_count: int
    node_count: int
    dict_size: int


def _prefix_bounds(index: list, prefix: tuple) -> tuple[int, int]:
    """Return [lo, hi) bounds of tuples starting with ``prefix``."""
    lo = bisect_left(index, prefix)
    hi = bisect_left(index, prefix[:-1] + (prefix[-1] + 1,))
    return lo, hi


class TripleStore:
    """Set-semantics triple store over interned term ids.

    The build phase is single-writer; calling :meth:`seal` freezes the
    store, after which it may be shared freely between readers.  Indexes
    are (re)built lazily, so interleaving inserts and matches is allowed
    but cheapest when all inserts come first.
    """

    def __init__(self):
        self._terms: list[Term] = []
        self._ids: dict[Term, int] = {}
        self._kinds: list[TermKind] = []
        self._triples: set[tuple[int, int, int]] = set()
        self._spo: Optional[list[tuple[int, int, int]]] = None
        self._pos: Optional[list[tuple[int, int, int]]] = None
        self._osp: Optional[list[tuple[int, int, int]]] = None
        self._sealed = False

    # -- dictionary ------------------------------------------------------

    def intern(self, term: Term) -> int:
        """Return the id for ``term``, assigning a fresh one if needed."""
        tid = self._ids.get(term)
        if tid is not None:
            return tid
        if self._sealed:
            raise SealedStoreError("cannot intern into a sealed store")
        tid = len(self._terms)
        self._ids[term] = tid
        self._terms.append(term)
        self._kinds.append(term.kind)
        return tid

    def resolve(self, tid: int) -> Term:
        return self._terms[tid]

    def term_id(self, term: Term) -> Optional[int]:
        """Id of an already-interned term, or ``None``."""
        return self._ids.get(term)

    @property
    def dict_size(self) -> int:
        return len(self._terms)

    # -- mutation --------------------------------------------------------

    def insert(self, triple: Triple) -> bool:
        """Insert one triple; return True iff it was not already present."""
        if self._sealed:
            raise SealedStoreError("cannot insert into a sealed store")
        key = (
            self.intern(triple.subject),
            self.intern(triple.predicate),
            self.intern(triple.object),
        )
        if key in self._triples:
            return False
        self._triples.add(key)
        self._spo = self._pos = self._osp = None
        return True

    def insert_all(self, triples: Iterable[Triple]) -> int:
        """Insert many triples; return how many were new."""
        added = 0
        for t in triples:
            if self.insert(t):
                added += 1
        return added

    def seal(self) -> "TripleStore":
        """Freeze the store; idempotent, returns self for chaining."""
        if not self._sealed:
            self._ensure_indexes()
            self._sealed = True
        return self

    @property
    def sealed(self) -> bool:
        return self._sealed

    # -- queries ---------------------------------------------------------

    @property
    def triple_count(self) -> int:
        return len(self._triples)

    def __len__(self) -> int:
        return len(self._triples)

    def _ensure_indexes(self):
        if self._spo is None:
            self._spo = sorted(self._triples)
            self._pos = sorted((p, o, s) for s, p, o in self._triples)
            self._osp = sorted((o, s, p) for s, p, o in self._triples)

    def match_ids(
        self,
        s: Optional[int],
        p: Optional[int],
        o: Optional[int],
    ) -> Iterator[tuple[int, int, int]]:
        """Yield (s, p, o) id triples matching the bound positions.

        The scan picks whichever index turns the bound positions into a
        contiguous prefix; results come out in that index's order.
        """
        self._ensure_indexes()
        if s is not None and p is not None and o is not None:
            if (s, p, o) in self._triples:
                yield (s, p, o)
            return
        if s is not None:
            prefix = (s,) if p is None else (s, p)
            lo, hi = _prefix_bounds(self._spo, prefix)
            for t in self._spo[lo:hi]:
                if o is None or t[2] == o:
                    yield t
            return
        if p is not None:
            prefix = (p,) if o is None else (p, o)
            lo, hi = _prefix_bounds(self._pos, prefix)
            for pp, oo, ss in self._pos[lo:hi]:
                yield (ss, pp, oo)
            return
        if o is not None:
            lo, hi = _prefix_bounds(self._osp, (o,))
            for oo, ss, pp in self._osp[lo:hi]:
                yield (ss, pp, oo)
            return
        yield from self._spo

    def match(self, pattern: TriplePattern) -> Iterator[Triple]:
        """Yield triples matching ``pattern`` in deterministic index order.

        A bound term that was never interned matches nothing.
        """
        ids: list[Optional[int]] = []
        for term in (pattern.subject, pattern.predicate, pattern.object):
            if term is None:
                ids.append(None)
            else:
                tid = self._ids.get(term)
                if tid is None:
                    return
                ids.append(tid)
        for s, p, o in self.match_ids(*ids):
            yield Triple(self._terms[s], self._terms[p], self._terms[o])

    def __iter__(self) -> Iterator[Triple]:
        self._ensure_indexes()
        for s, p, o in self._spo:
            yield Triple(self._terms[s], self._terms[p], self._terms[o])

    def stats(self) -> StoreStats:
        """Triple count, graph-node count, and dictionary size.

        Nodes are the distinct IRI or blank terms occurring in subject or
        object position; literals are not graph nodes.
        """
        kinds = self._kinds
        nodes: set[int] = set()
        for s, _, o in self._triples:
            nodes.add(s)
            if kinds[o] is not TermKind.LITERAL:
                nodes.add(o)
        return StoreStats(
            triple_count=len(self._triples),
            node_count=len(nodes),
            dict_size=len(self._terms),
        )
