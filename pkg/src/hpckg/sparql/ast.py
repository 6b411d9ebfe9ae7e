"""Query AST node types."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from hpckg.rdf_core import Term


@dataclass(frozen=True, slots=True)
class Var:
    name: str


PatternTerm = Union[Term, Var]


@dataclass(frozen=True, slots=True)
class VarRef:
    name: str


@dataclass(frozen=True, slots=True)
class LiteralExpr:
    value: object  # int | float | str | bool


@dataclass(frozen=True, slots=True)
class IriExpr:
    iri: str


@dataclass(frozen=True, slots=True)
class FuncCall:
    """Cast or aggregate call; aggregates may carry DISTINCT."""

    name: str
    args: tuple
    distinct: bool = False
    star: bool = False  # COUNT(*)


@dataclass(frozen=True, slots=True)
class UnaryOp:
    op: str
    operand: object


@dataclass(frozen=True, slots=True)
class BinaryOp:
    op: str
    left: object
    right: object


Expr = Union[VarRef, LiteralExpr, IriExpr, FuncCall, UnaryOp, BinaryOp]

AGGREGATES = frozenset({"COUNT", "SUM", "AVG", "MIN", "MAX"})


def contains_aggregate(expr: Expr) -> bool:
    if isinstance(expr, FuncCall):
        if expr.name in AGGREGATES:
            return True
        return any(contains_aggregate(a) for a in expr.args)
    if isinstance(expr, UnaryOp):
        return contains_aggregate(expr.operand)
    if isinstance(expr, BinaryOp):
        return contains_aggregate(expr.left) or contains_aggregate(expr.right)
    return False


@dataclass(frozen=True, slots=True)
class TriplePatternAst:
    subject: PatternTerm
    predicate: PatternTerm
    object: PatternTerm


@dataclass(frozen=True, slots=True)
class FilterClause:
    expr: Expr


@dataclass(frozen=True, slots=True)
class BindClause:
    expr: Expr
    var: str


GroupElement = Union[TriplePatternAst, FilterClause, BindClause]


@dataclass(frozen=True, slots=True)
class SelectItem:
    """``?v`` (expr is None) or ``(expr AS ?v)``."""

    var: str
    expr: Optional[Expr] = None


@dataclass(frozen=True, slots=True)
class OrderKey:
    expr: Expr
    descending: bool = False


@dataclass(frozen=True)
class SelectQuery:
    select: tuple[SelectItem, ...]
    where: tuple[GroupElement, ...]
    distinct: bool = False
    group_by: tuple[str, ...] = ()
    order_by: tuple[OrderKey, ...] = ()
    limit: Optional[int] = None
    offset: Optional[int] = None
    prefixes: dict = field(default_factory=dict)

    @property
    def has_aggregates(self) -> bool:
        return any(i.expr is not None and contains_aggregate(i.expr) for i in self.select)
