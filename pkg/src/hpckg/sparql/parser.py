"""Tokenizer and recursive-descent parser for the query subset.

Supported: PREFIX declarations, SELECT (optionally DISTINCT) over plain
variables and ``(expr AS ?var)`` projections, basic graph patterns with
``;`` / ``,`` abbreviation and ``a`` for rdf:type, FILTER and BIND,
GROUP BY, ORDER BY with ASC()/DESC(), LIMIT and OFFSET.  Expressions
cover comparisons, boolean connectives, arithmetic, parentheses, casts
(xsd:integer, xsd:double, xsd:decimal, xsd:dateTime) and the aggregates
COUNT / SUM / AVG / MIN / MAX (COUNT also with DISTINCT or ``*``).

Anything else from full SPARQL (OPTIONAL, UNION, subqueries, property
paths, HAVING, ...) is rejected with an explicit unsupported-feature
error rather than a generic syntax error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from hpckg.errors import QuerySyntaxError, UnsupportedFeatureError
from hpckg.rdf_core import Term
from hpckg.sparql.ast import (
    AGGREGATES,
    BinaryOp,
    BindClause,
    FilterClause,
    FuncCall,
    GroupElement,
    IriExpr,
    LiteralExpr,
    OrderKey,
    SelectItem,
    SelectQuery,
    TriplePatternAst,
    UnaryOp,
    Var,
    VarRef,
    contains_aggregate,
)
from hpckg.vocab import RDF_TYPE, XSD, XSD_DECIMAL, XSD_DOUBLE, XSD_INTEGER, XSD_STRING

_UNSUPPORTED = {
    "OPTIONAL",
    "UNION",
    "MINUS",
    "GRAPH",
    "SERVICE",
    "VALUES",
    "HAVING",
    "EXISTS",
    "NOT",
    "ASK",
    "CONSTRUCT",
    "DESCRIBE",
    "INSERT",
    "DELETE",
    "REDUCED",
    "FROM",
}

_KEYWORDS = {
    "PREFIX",
    "SELECT",
    "DISTINCT",
    "WHERE",
    "FILTER",
    "BIND",
    "AS",
    "GROUP",
    "BY",
    "ORDER",
    "ASC",
    "DESC",
    "LIMIT",
    "OFFSET",
    "TRUE",
    "FALSE",
} | AGGREGATES | _UNSUPPORTED

_CASTS = {
    XSD + "dateTime": "dateTime",
    XSD + "integer": "integer",
    XSD + "double": "double",
    XSD + "decimal": "decimal",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<iriref><[^<>\s]*>)
  | (?P<var>\?[A-Za-z_][A-Za-z0-9_]*)
  | (?P<number>[0-9]+(\.[0-9]*)?([eE][+-]?[0-9]+)?|\.[0-9]+([eE][+-]?[0-9]+)?)
  | (?P<string>"(\\.|[^"\\])*"|'(\\.|[^'\\])*')
  | (?P<pname>[A-Za-z_][A-Za-z0-9_]*:[A-Za-z_][A-Za-z0-9_]*|[A-Za-z_][A-Za-z0-9_]*:)
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>\^\^|&&|\|\||!=|<=|>=|[{}().;,=<>!+\-*/])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # iriref | var | number | string | pname | word | punct | eof
    value: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            col = pos - line_start + 1
            raise QuerySyntaxError(f"line {line}:{col}: unexpected character {text[pos]!r}")
        kind = m.lastgroup
        value = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, value, line, pos - line_start + 1))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self.prefixes: dict[str, str] = {}

    # -- token plumbing ----------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tok
        self.pos += 1
        return t

    def error(self, message: str):
        t = self.tok
        raise QuerySyntaxError(f"line {t.line}:{t.col}: {message} (near {t.value!r})")

    def is_word(self, *words: str) -> bool:
        t = self.tok
        return t.kind == "word" and t.value.upper() in words

    def expect_word(self, word: str):
        if not self.is_word(word):
            self.error(f"expected {word}")
        self.advance()

    def expect_punct(self, value: str):
        t = self.tok
        if t.kind != "punct" or t.value != value:
            self.error(f"expected {value!r}")
        self.advance()

    def at_punct(self, value: str) -> bool:
        t = self.tok
        return t.kind == "punct" and t.value == value

    def check_unsupported(self):
        t = self.tok
        if t.kind == "word" and t.value.upper() in _UNSUPPORTED:
            raise UnsupportedFeatureError(
                f"line {t.line}:{t.col}: unsupported feature: {t.value.upper()}"
            )

    # -- IRIs ---------------------------------------------------------------

    def expand_pname(self, pname: str, tok: Token) -> str:
        prefix, _, local = pname.partition(":")
        if prefix not in self.prefixes:
            raise QuerySyntaxError(
                f"line {tok.line}:{tok.col}: unknown prefix {prefix!r}"
            )
        return self.prefixes[prefix] + local

    # -- prologue ------------------------------------------------------------

    def parse(self) -> SelectQuery:
        while self.is_word("PREFIX"):
            self.advance()
            t = self.advance()
            if t.kind != "pname" or not t.value.endswith(":"):
                raise QuerySyntaxError(f"line {t.line}:{t.col}: expected prefix name")
            prefix = t.value[:-1]
            iri = self.advance()
            if iri.kind != "iriref":
                raise QuerySyntaxError(f"line {iri.line}:{iri.col}: expected IRI")
            self.prefixes[prefix] = iri.value[1:-1]
        self.check_unsupported()
        query = self.parse_select()
        if self.tok.kind != "eof":
            self.check_unsupported()
            self.error("trailing content after query")
        self.validate(query)
        return query

    # -- SELECT ----------------------------------------------------------------

    def parse_select(self) -> SelectQuery:
        if not self.is_word("SELECT"):
            self.check_unsupported()
            self.error("expected SELECT")
        self.advance()
        distinct = False
        if self.is_word("DISTINCT"):
            distinct = True
            self.advance()
        items: list[SelectItem] = []
        while True:
            if self.tok.kind == "var":
                items.append(SelectItem(self.advance().value[1:]))
            elif self.at_punct("("):
                self.advance()
                expr = self.parse_expr()
                self.expect_word("AS")
                v = self.advance()
                if v.kind != "var":
                    self.error("expected variable after AS")
                items.append(SelectItem(v.value[1:], expr))
                self.expect_punct(")")
            else:
                break
        if not items:
            self.error("SELECT needs at least one item")
        self.expect_word("WHERE")
        where = self.parse_group()
        group_by: tuple[str, ...] = ()
        order_by: tuple[OrderKey, ...] = ()
        limit = offset = None
        if self.is_word("GROUP"):
            self.advance()
            self.expect_word("BY")
            keys = []
            while self.tok.kind == "var":
                keys.append(self.advance().value[1:])
            if not keys:
                self.error("GROUP BY needs at least one variable")
            group_by = tuple(keys)
        self.check_unsupported()
        if self.is_word("ORDER"):
            self.advance()
            self.expect_word("BY")
            keys = []
            while True:
                if self.is_word("ASC", "DESC"):
                    desc = self.advance().value.upper() == "DESC"
                    self.expect_punct("(")
                    keys.append(OrderKey(self.parse_expr(), desc))
                    self.expect_punct(")")
                elif self.tok.kind == "var":
                    keys.append(OrderKey(VarRef(self.advance().value[1:]), False))
                else:
                    break
            if not keys:
                self.error("ORDER BY needs at least one key")
            order_by = tuple(keys)
        while self.is_word("LIMIT", "OFFSET"):
            word = self.advance().value.upper()
            t = self.advance()
            if t.kind != "number" or not t.value.isdigit():
                self.error(f"{word} expects a non-negative integer")
            if word == "LIMIT":
                limit = int(t.value)
            else:
                offset = int(t.value)
        return SelectQuery(
            select=tuple(items),
            where=where,
            distinct=distinct,
            group_by=group_by,
            order_by=order_by,
            limit=limit,
            offset=offset,
            prefixes=dict(self.prefixes),
        )

    # -- WHERE group -------------------------------------------------------------

    def parse_group(self) -> tuple[GroupElement, ...]:
        self.expect_punct("{")
        elements: list[GroupElement] = []
        while not self.at_punct("}"):
            self.check_unsupported()
            if self.at_punct("{"):
                raise UnsupportedFeatureError(
                    f"line {self.tok.line}:{self.tok.col}: "
                    "unsupported feature: nested group pattern"
                )
            if self.is_word("FILTER"):
                self.advance()
                self.expect_punct("(")
                elements.append(FilterClause(self.parse_expr()))
                self.expect_punct(")")
            elif self.is_word("BIND"):
                self.advance()
                self.expect_punct("(")
                expr = self.parse_expr()
                self.expect_word("AS")
                v = self.advance()
                if v.kind != "var":
                    self.error("expected variable after AS")
                elements.append(BindClause(expr, v.value[1:]))
                self.expect_punct(")")
            else:
                elements.extend(self.parse_triples_same_subject())
            if self.at_punct("."):
                self.advance()
        self.expect_punct("}")
        return tuple(elements)

    def parse_triples_same_subject(self) -> list[TriplePatternAst]:
        subject = self.parse_pattern_term(position="subject")
        patterns: list[TriplePatternAst] = []
        while True:
            predicate = self.parse_verb()
            while True:
                obj = self.parse_pattern_term(position="object")
                patterns.append(TriplePatternAst(subject, predicate, obj))
                if self.at_punct(","):
                    self.advance()
                    continue
                break
            if self.at_punct(";"):
                self.advance()
                if self.at_punct(".") or self.at_punct("}"):
                    break  # tolerate a trailing semicolon
                continue
            break
        return patterns

    def parse_verb(self):
        t = self.tok
        if t.kind == "word" and t.value == "a":
            self.advance()
            return Term.iri(RDF_TYPE)
        if t.kind == "var":
            self.advance()
            return Var(t.value[1:])
        if t.kind == "iriref":
            self.advance()
            return Term.iri(t.value[1:-1])
        if t.kind == "pname":
            self.advance()
            return Term.iri(self.expand_pname(t.value, t))
        self.check_unsupported()
        self.error("expected predicate")

    def parse_pattern_term(self, position: str):
        t = self.tok
        if t.kind == "var":
            self.advance()
            return Var(t.value[1:])
        if t.kind == "iriref":
            self.advance()
            return Term.iri(t.value[1:-1])
        if t.kind == "pname":
            self.advance()
            return Term.iri(self.expand_pname(t.value, t))
        if t.kind == "number":
            self.advance()
            return _number_term(t.value)
        if t.kind == "string":
            self.advance()
            lex = _string_value(t.value)
            datatype = XSD_STRING
            if self.at_punct("^^"):
                self.advance()
                dt = self.advance()
                if dt.kind == "iriref":
                    datatype = dt.value[1:-1]
                elif dt.kind == "pname":
                    datatype = self.expand_pname(dt.value, dt)
                else:
                    self.error("expected datatype IRI")
            return Term.literal(lex, datatype)
        if t.kind == "word" and t.value.upper() in ("TRUE", "FALSE"):
            self.error("boolean literals are not valid pattern terms")
        self.check_unsupported()
        self.error(f"expected {position} term")

    # -- expressions ----------------------------------------------------------

    def parse_expr(self):
        return self.parse_or()

    def parse_or(self):
        left = self.parse_and()
        while self.at_punct("||"):
            self.advance()
            left = BinaryOp("||", left, self.parse_and())
        return left

    def parse_and(self):
        left = self.parse_compare()
        while self.at_punct("&&"):
            self.advance()
            left = BinaryOp("&&", left, self.parse_compare())
        return left

    def parse_compare(self):
        left = self.parse_additive()
        for op in ("<=", ">=", "!=", "=", "<", ">"):
            if self.at_punct(op):
                self.advance()
                return BinaryOp(op, left, self.parse_additive())
        return left

    def parse_additive(self):
        left = self.parse_multiplicative()
        while self.at_punct("+") or self.at_punct("-"):
            op = self.advance().value
            left = BinaryOp(op, left, self.parse_multiplicative())
        return left

    def parse_multiplicative(self):
        left = self.parse_unary()
        while self.at_punct("*") or self.at_punct("/"):
            op = self.advance().value
            left = BinaryOp(op, left, self.parse_unary())
        return left

    def parse_unary(self):
        if self.at_punct("!"):
            self.advance()
            return UnaryOp("!", self.parse_unary())
        if self.at_punct("-"):
            self.advance()
            return UnaryOp("-", self.parse_unary())
        if self.at_punct("+"):
            self.advance()
            return self.parse_unary()
        return self.parse_primary()

    def parse_primary(self):
        t = self.tok
        if self.at_punct("("):
            self.advance()
            expr = self.parse_expr()
            self.expect_punct(")")
            return expr
        if t.kind == "var":
            self.advance()
            return VarRef(t.value[1:])
        if t.kind == "number":
            self.advance()
            return LiteralExpr(_number_value(t.value))
        if t.kind == "string":
            self.advance()
            return LiteralExpr(_string_value(t.value))
        if t.kind == "word":
            upper = t.value.upper()
            if upper in AGGREGATES:
                return self.parse_aggregate()
            if upper == "TRUE":
                self.advance()
                return LiteralExpr(True)
            if upper == "FALSE":
                self.advance()
                return LiteralExpr(False)
            self.check_unsupported()
            self.error("unexpected word in expression")
        if t.kind in ("pname", "iriref"):
            self.advance()
            iri = t.value[1:-1] if t.kind == "iriref" else self.expand_pname(t.value, t)
            if self.at_punct("("):
                cast = _CASTS.get(iri)
                if cast is None:
                    raise UnsupportedFeatureError(
                        f"line {t.line}:{t.col}: unsupported function <{iri}>"
                    )
                self.advance()
                arg = self.parse_expr()
                self.expect_punct(")")
                return FuncCall(cast, (arg,))
            return IriExpr(iri)
        self.error("expected expression")

    def parse_aggregate(self):
        name = self.advance().value.upper()
        self.expect_punct("(")
        distinct = False
        if self.is_word("DISTINCT"):
            distinct = True
            self.advance()
        if self.at_punct("*"):
            if name != "COUNT":
                self.error("only COUNT accepts *")
            self.advance()
            self.expect_punct(")")
            return FuncCall("COUNT", (), distinct=distinct, star=True)
        arg = self.parse_expr()
        self.expect_punct(")")
        return FuncCall(name, (arg,), distinct=distinct)

    # -- semantic checks ----------------------------------------------------

    def validate(self, query: SelectQuery):
        bound: set[str] = set()
        for element in query.where:
            if isinstance(element, TriplePatternAst):
                for part in (element.subject, element.predicate, element.object):
                    if isinstance(part, Var):
                        bound.add(part.name)
            elif isinstance(element, BindClause):
                bound.add(element.var)

        def check_vars(expr, where: str, extra: set[str] = frozenset()):
            for name in _expr_vars(expr):
                if name not in bound and name not in extra:
                    raise QuerySyntaxError(
                        f"variable ?{name} in {where} is never bound"
                    )

        for element in query.where:
            if isinstance(element, FilterClause):
                check_vars(element.expr, "FILTER")
            elif isinstance(element, BindClause):
                check_vars(element.expr, "BIND")

        aliases = {i.var for i in query.select if i.expr is not None}
        for item in query.select:
            if item.expr is None:
                if item.var not in bound:
                    raise QuerySyntaxError(f"variable ?{item.var} is never bound")
            else:
                check_vars(item.expr, "SELECT")

        grouped = bool(query.group_by) or query.has_aggregates
        if grouped:
            keys = set(query.group_by)
            for item in query.select:
                if item.expr is None and item.var not in keys:
                    raise QuerySyntaxError(
                        f"?{item.var} must be a GROUP BY key to be selected bare"
                    )
                if item.expr is not None and not contains_aggregate(item.expr):
                    for name in _expr_vars(item.expr):
                        if name not in keys:
                            raise QuerySyntaxError(
                                f"non-aggregate expression over ?{name} requires "
                                "it to be a GROUP BY key"
                            )
        for key in query.group_by:
            if key not in bound:
                raise QuerySyntaxError(f"GROUP BY variable ?{key} is never bound")
        for order in query.order_by:
            check_vars(order.expr, "ORDER BY", extra=aliases)


def _expr_vars(expr) -> set[str]:
    if isinstance(expr, VarRef):
        return {expr.name}
    if isinstance(expr, FuncCall):
        out: set[str] = set()
        for a in expr.args:
            out |= _expr_vars(a)
        return out
    if isinstance(expr, UnaryOp):
        return _expr_vars(expr.operand)
    if isinstance(expr, BinaryOp):
        return _expr_vars(expr.left) | _expr_vars(expr.right)
    return set()


def _number_value(lex: str):
    if re.fullmatch(r"[0-9]+", lex):
        return int(lex)
    return float(lex)


def _number_term(lex: str) -> Term:
    if re.fullmatch(r"[0-9]+", lex):
        return Term.literal(lex, XSD_INTEGER)
    if "e" in lex or "E" in lex:
        return Term.literal(lex, XSD_DOUBLE)
    return Term.literal(lex, XSD_DECIMAL)


_STR_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", '"': '"', "'": "'", "\\": "\\"}


def _string_value(raw: str) -> str:
    body = raw[1:-1]
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\" and i + 1 < len(body):
            out.append(_STR_ESCAPES.get(body[i + 1], body[i + 1]))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def parse_query(text: str) -> SelectQuery:
    """Parse query text; raises QuerySyntaxError / UnsupportedFeatureError."""
    return _Parser(text).parse()
