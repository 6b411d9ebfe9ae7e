"""N-Triples and Turtle writers plus an N-Triples reader.

Writers are byte-deterministic.  N-Triples output orders statements by
their rendered line text, which makes serialization independent of how
term ids were assigned: any store holding the same triple set produces
the same bytes, and write-read-write is a byte fixed point.  Turtle
output groups statements by subject in id (insertion) order, which lets
producers control document layout (the ontology document relies on this).

Literals are always written with an explicit datatype IRI; the reader
treats a bare ``"lex"`` as an ``xsd:string`` literal, so both spellings
intern to the same term.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Union

from hpckg.errors import NTriplesSyntaxError
from hpckg.rdf_core import Term, TermKind, Triple, TripleStore
from hpckg.vocab import PREFIXES, RDF_TYPE, XSD_STRING

_ESCAPES = {
    "\\": "\\\\",
    '"': '\\"',
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
}

_UNESCAPES = {
    "\\": "\\",
    '"': '"',
    "n": "\n",
    "r": "\r",
    "t": "\t",
}

_PN_LOCAL_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True, slots=True)
class SerializationReport:
    bytes_written: int
    triples_written: int
    format: str


def escape_literal(lex: str) -> str:
    out = []
    for ch in lex:
        if ch in _ESCAPES:
            out.append(_ESCAPES[ch])
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


def render_term(term: Term) -> str:
    """Canonical N-Triples spelling of one term."""
    if term.kind is TermKind.IRI:
        return f"<{term.text}>"
    if term.kind is TermKind.BLANK:
        return f"_:{term.text}"
    return f'"{escape_literal(term.text)}"^^<{term.datatype}>'


def render_triple(triple: Triple) -> str:
    return (
        f"{render_term(triple.subject)} {render_term(triple.predicate)} "
        f"{render_term(triple.object)} .\n"
    )


# ---------------------------------------------------------------------------
# N-Triples writer


def serialize_ntriples(store: TripleStore) -> bytes:
    store.seal()
    lines = sorted(render_triple(t) for t in store)
    return "".join(lines).encode("utf-8")


def write_ntriples(store: TripleStore, path: Union[str, Path]) -> SerializationReport:
    data = serialize_ntriples(store)
    Path(path).write_bytes(data)
    return SerializationReport(len(data), store.triple_count, "ntriples")


# ---------------------------------------------------------------------------
# N-Triples reader


def _unescape(lex: str, line: int) -> str:
    out = []
    i = 0
    n = len(lex)
    while i < n:
        ch = lex[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        if i + 1 >= n:
            raise NTriplesSyntaxError("dangling escape", line)
        nxt = lex[i + 1]
        if nxt in _UNESCAPES:
            out.append(_UNESCAPES[nxt])
            i += 2
        elif nxt == "u":
            if i + 6 > n:
                raise NTriplesSyntaxError("truncated \\u escape", line)
            out.append(chr(int(lex[i + 2 : i + 6], 16)))
            i += 6
        elif nxt == "U":
            if i + 10 > n:
                raise NTriplesSyntaxError("truncated \\U escape", line)
            out.append(chr(int(lex[i + 2 : i + 10], 16)))
            i += 10
        else:
            raise NTriplesSyntaxError(f"unknown escape \\{nxt}", line)
    return "".join(out)


class _LineScanner:
    def __init__(self, text: str, line: int):
        self.text = text
        self.pos = 0
        self.line = line

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def expect(self, ch: str):
        self.skip_ws()
        if self.pos >= len(self.text) or self.text[self.pos] != ch:
            raise NTriplesSyntaxError(f"expected {ch!r}", self.line)
        self.pos += 1

    def term(self) -> Term:
        self.skip_ws()
        text = self.text
        if self.pos >= len(text):
            raise NTriplesSyntaxError("unexpected end of statement", self.line)
        ch = text[self.pos]
        if ch == "<":
            end = text.find(">", self.pos + 1)
            if end < 0:
                raise NTriplesSyntaxError("unterminated IRI", self.line)
            iri = text[self.pos + 1 : end]
            self.pos = end + 1
            try:
                return Term.iri(iri)
            except Exception as exc:
                raise NTriplesSyntaxError(str(exc), self.line) from exc
        if ch == "_":
            if text[self.pos : self.pos + 2] != "_:":
                raise NTriplesSyntaxError("malformed blank node", self.line)
            end = self.pos + 2
            while end < len(text) and (text[end].isalnum() or text[end] == "_"):
                end += 1
            label = text[self.pos + 2 : end]
            self.pos = end
            try:
                return Term.blank(label)
            except Exception as exc:
                raise NTriplesSyntaxError(str(exc), self.line) from exc
        if ch == '"':
            end = self.pos + 1
            while end < len(text):
                if text[end] == "\\":
                    end += 2
                    continue
                if text[end] == '"':
                    break
                end += 1
            if end >= len(text):
                raise NTriplesSyntaxError("unterminated literal", self.line)
            lex = _unescape(text[self.pos + 1 : end], self.line)
            self.pos = end + 1
            datatype = XSD_STRING
            if text[self.pos : self.pos + 2] == "^^":
                self.pos += 2
                if self.pos >= len(text) or text[self.pos] != "<":
                    raise NTriplesSyntaxError("datatype must be an IRI", self.line)
                dt_end = text.find(">", self.pos + 1)
                if dt_end < 0:
                    raise NTriplesSyntaxError("unterminated datatype IRI", self.line)
                datatype = text[self.pos + 1 : dt_end]
                self.pos = dt_end + 1
            elif text[self.pos : self.pos + 1] == "@":
                raise NTriplesSyntaxError("language tags are not supported", self.line)
            try:
                return Term.literal(lex, datatype)
            except Exception as exc:
                raise NTriplesSyntaxError(str(exc), self.line) from exc
        raise NTriplesSyntaxError(f"unexpected character {ch!r}", self.line)


def read_ntriples(data: Union[str, bytes]) -> TripleStore:
    """Parse N-Triples text into a sealed store.

    CRLF line endings and full-line ``#`` comments are accepted.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    store = TripleStore()
    for lineno, raw in enumerate(data.split("\n"), start=1):
        line = raw.rstrip("\r").strip()
        if not line or line.startswith("#"):
            continue
        scanner = _LineScanner(line, lineno)
        subject = scanner.term()
        predicate = scanner.term()
        obj = scanner.term()
        scanner.expect(".")
        if not scanner.at_end():
            raise NTriplesSyntaxError("trailing content after '.'", lineno)
        try:
            store.insert(Triple(subject, predicate, obj))
        except Exception as exc:
            raise NTriplesSyntaxError(str(exc), lineno) from exc
    return store.seal()


def read_ntriples_file(path: Union[str, Path]) -> TripleStore:
    return read_ntriples(Path(path).read_bytes())


# ---------------------------------------------------------------------------
# Turtle writer


def _pname(iri: str) -> str | None:
    for prefix, ns in PREFIXES:
        if iri.startswith(ns):
            local = iri[len(ns) :]
            if _PN_LOCAL_RE.match(local):
                return f"{prefix}:{local}"
    return None


def _turtle_term(term: Term, used: set[str]) -> str:
    if term.kind is TermKind.IRI:
        name = _pname(term.text)
        if name:
            used.add(name.split(":", 1)[0])
            return name
        return f"<{term.text}>"
    if term.kind is TermKind.BLANK:
        return f"_:{term.text}"
    dt = _pname(term.datatype or "")
    lex = escape_literal(term.text)
    if dt:
        used.add(dt.split(":", 1)[0])
        return f'"{lex}"^^{dt}'
    return f'"{lex}"^^<{term.datatype}>'


def serialize_turtle(store: TripleStore) -> bytes:
    """Serialize with subject grouping and ``;`` / ``,`` abbreviation.

    Subjects appear in term-id order, predicates within a subject in id
    order with ``rdf:type`` (written ``a``) first, objects in id order.
    """
    store.seal()
    by_subject: dict[int, dict[int, list[int]]] = {}
    for s, p, o in store.match_ids(None, None, None):
        by_subject.setdefault(s, {}).setdefault(p, []).append(o)

    used: set[str] = set()
    type_id = store.term_id(Term.iri(RDF_TYPE))
    blocks: list[str] = []
    for s in sorted(by_subject):
        subj = _turtle_term(store.resolve(s), used)
        preds = by_subject[s]
        order = sorted(preds)
        if type_id in preds:
            order.remove(type_id)
            order.insert(0, type_id)
        lines = []
        for p in order:
            verb = "a" if p == type_id else _turtle_term(store.resolve(p), used)
            objs = ", ".join(
                _turtle_term(store.resolve(o), used) for o in sorted(preds[p])
            )
            lines.append(f"{verb} {objs}")
        body = " ;\n    ".join(lines)
        blocks.append(f"{subj} {body} .\n")

    header = "".join(
        f"@prefix {prefix}: <{ns}> .\n" for prefix, ns in PREFIXES if prefix in used
    )
    text = header + "\n" + "".join(blocks) if header else "".join(blocks)
    return text.encode("utf-8")


def write_turtle(store: TripleStore, path: Union[str, Path]) -> SerializationReport:
    data = serialize_turtle(store)
    Path(path).write_bytes(data)
    return SerializationReport(len(data), store.triple_count, "turtle")
