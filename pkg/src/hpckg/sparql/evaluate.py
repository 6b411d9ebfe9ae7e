"""Query evaluation over a sealed triple store.

Basic graph patterns join left to right through the store indexes; FILTER
drops rows whose condition is not strictly true (type errors count as
false), BIND extends rows, and grouping follows the usual aggregate
semantics: COUNT counts bound values, SUM/AVG/MIN/MAX skip unbound ones
and yield unbound on empty or non-numeric input (SUM of nothing is 0).

dateTime subtraction yields fractional days, so multiplying a difference
by 86400 gives seconds; the dateTime cast accepts both ISO 8601 strings
and integer Unix seconds.
"""

from __future__ import annotations

import csv
import functools
from dataclasses import dataclass
from typing import Iterable, Optional

from hpckg.rdf_core import TripleStore, parse_datetime
from hpckg.sparql.ast import (
    BinaryOp,
    BindClause,
    FilterClause,
    FuncCall,
    IriExpr,
    LiteralExpr,
    OrderKey,
    SelectQuery,
    TriplePatternAst,
    UnaryOp,
    Var,
    VarRef,
)
from hpckg.sparql.values import (
    ERROR,
    DateTimeVal,
    DurationVal,
    IriVal,
    is_numeric,
    render_value,
    sort_key,
    term_to_value,
    value_to_term,
)


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[tuple]

    def to_csv(self, fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([render_value(v) for v in row])

    def to_text(self) -> str:
        """Aligned-column rendering for terminals."""
        cells = [[render_value(v) for v in row] for row in self.rows]
        widths = [len(c) for c in self.columns]
        for row in cells:
            for i, cell in enumerate(row):
                widths[i] = max(widths[i], len(cell))
        lines = [
            "  ".join(name.ljust(widths[i]) for i, name in enumerate(self.columns)).rstrip(),
            "  ".join("-" * w for w in widths),
        ]
        for row in cells:
            lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
        return "\n".join(lines) + "\n"


# A binding is either a term id from the store or a computed value.
_ID = 0
_VAL = 1


class _Context:
    def __init__(self, store: TripleStore):
        self.store = store
        self._value_cache: dict[int, object] = {}

    def value_of(self, binding) -> object:
        tag, payload = binding
        if tag == _VAL:
            return payload
        cached = self._value_cache.get(payload)
        if cached is None:
            cached = term_to_value(self.store.resolve(payload))
            self._value_cache[payload] = cached
        return cached


def _pattern_slot(part, row, ctx: _Context) -> tuple[bool, Optional[int]]:
    """Resolve one pattern slot against a row.

    Returns (ok, id) where id is None for a wildcard; ok=False means the
    slot can never match (unknown term), killing the row.
    """
    if isinstance(part, Var):
        binding = row.get(part.name)
        if binding is None:
            return True, None
        if binding[0] == _ID:
            return True, binding[1]
        term = value_to_term(binding[1])
        if term is None:
            return False, None
        tid = ctx.store.term_id(term)
        return (tid is not None), tid
    tid = ctx.store.term_id(part)
    return (tid is not None), tid


def _join_pattern(rows, pattern: TriplePatternAst, ctx: _Context):
    out = []
    store = ctx.store
    for row in rows:
        ok_s, s = _pattern_slot(pattern.subject, row, ctx)
        ok_p, p = _pattern_slot(pattern.predicate, row, ctx)
        ok_o, o = _pattern_slot(pattern.object, row, ctx)
        if not (ok_s and ok_p and ok_o):
            continue
        for ts, tp, to in store.match_ids(s, p, o):
            new = dict(row)
            good = True
            for part, tid in ((pattern.subject, ts), (pattern.predicate, tp), (pattern.object, to)):
                if isinstance(part, Var):
                    existing = new.get(part.name)
                    if existing is None:
                        new[part.name] = (_ID, tid)
                    elif existing != (_ID, tid):
                        good = False
                        break
            if good:
                out.append(new)
    return out


# ---------------------------------------------------------------------------
# Expression evaluation


def _eval(expr, row, ctx: _Context):
    if isinstance(expr, VarRef):
        binding = row.get(expr.name)
        if binding is None:
            return ERROR
        return ctx.value_of(binding)
    if isinstance(expr, LiteralExpr):
        return expr.value
    if isinstance(expr, IriExpr):
        return IriVal(expr.iri)
    if isinstance(expr, UnaryOp):
        return _eval_unary(expr, row, ctx)
    if isinstance(expr, BinaryOp):
        return _eval_binary(expr, row, ctx)
    if isinstance(expr, FuncCall):
        return _eval_cast(expr, row, ctx)
    return ERROR


def _eval_unary(expr: UnaryOp, row, ctx):
    value = _eval(expr.operand, row, ctx)
    if value is ERROR:
        return ERROR
    if expr.op == "!":
        return (not value) if isinstance(value, bool) else ERROR
    if expr.op == "-":
        return -value if is_numeric(value) else ERROR
    return ERROR


def _eval_binary(expr: BinaryOp, row, ctx):
    op = expr.op
    if op in ("&&", "||"):
        left = _eval(expr.left, row, ctx)
        right = _eval(expr.right, row, ctx)
        left = left if isinstance(left, bool) else ERROR
        right = right if isinstance(right, bool) else ERROR
        if op == "&&":
            if left is False or right is False:
                return False
            if left is ERROR or right is ERROR:
                return ERROR
            return True
        if left is True or right is True:
            return True
        if left is ERROR or right is ERROR:
            return ERROR
        return False

    left = _eval(expr.left, row, ctx)
    if left is ERROR:
        return ERROR
    right = _eval(expr.right, row, ctx)
    if right is ERROR:
        return ERROR

    if op in ("=", "!=", "<", "<=", ">", ">="):
        return _compare(op, left, right)

    if op == "-" and isinstance(left, DateTimeVal) and isinstance(right, DateTimeVal):
        # Difference in fractional days, so "* 86400" yields seconds.
        return (left.epoch - right.epoch) / 86400.0
    if not (is_numeric(left) and is_numeric(right)):
        return ERROR
    if op == "+":
        return left + right
    if op == "-":
        return left - right
    if op == "*":
        return left * right
    if op == "/":
        if right == 0:
            return ERROR
        result = left / right
        return result
    return ERROR


def _compare(op: str, left, right):
    if is_numeric(left) and is_numeric(right):
        pass
    elif isinstance(left, str) and isinstance(right, str):
        pass
    elif isinstance(left, DateTimeVal) and isinstance(right, DateTimeVal):
        left, right = left.epoch, right.epoch
    elif isinstance(left, DurationVal) and isinstance(right, DurationVal):
        left, right = left.seconds, right.seconds
    elif isinstance(left, bool) and isinstance(right, bool):
        left, right = int(left), int(right)
    elif isinstance(left, IriVal) and isinstance(right, IriVal):
        if op == "=":
            return left == right
        if op == "!=":
            return left != right
        left, right = left.iri, right.iri
    else:
        return ERROR
    if op == "=":
        return left == right
    if op == "!=":
        return left != right
    if op == "<":
        return left < right
    if op == "<=":
        return left <= right
    if op == ">":
        return left > right
    return left >= right


def _eval_cast(expr: FuncCall, row, ctx):
    if expr.name in ("COUNT", "SUM", "AVG", "MIN", "MAX"):
        # Aggregates are evaluated by the grouping stage, never here.
        return ERROR
    value = _eval(expr.args[0], row, ctx)
    if value is ERROR:
        return ERROR
    name = expr.name
    try:
        if name == "integer":
            if isinstance(value, bool):
                return int(value)
            if is_numeric(value):
                return int(value)
            if isinstance(value, str):
                return int(value.strip())
            return ERROR
        if name in ("double", "decimal"):
            if isinstance(value, bool):
                return float(value)
            if is_numeric(value):
                return float(value)
            if isinstance(value, str):
                return float(value.strip())
            return ERROR
        if name == "dateTime":
            if isinstance(value, DateTimeVal):
                return value
            if is_numeric(value):
                return DateTimeVal(float(value))
            if isinstance(value, str):
                return DateTimeVal(parse_datetime(value).timestamp())
            return ERROR
    except ValueError:
        return ERROR
    return ERROR


# ---------------------------------------------------------------------------
# Aggregates


def _eval_aggregate_expr(expr, group_rows, ctx):
    """Evaluate a select expression over one group, folding aggregates."""
    if isinstance(expr, FuncCall) and expr.name in ("COUNT", "SUM", "AVG", "MIN", "MAX"):
        return _fold(expr, group_rows, ctx)
    if isinstance(expr, VarRef):
        if not group_rows:
            return ERROR
        return _eval(expr, group_rows[0], ctx)
    if isinstance(expr, (LiteralExpr, IriExpr)):
        return _eval(expr, {}, ctx)
    if isinstance(expr, UnaryOp):
        inner = _eval_aggregate_expr(expr.operand, group_rows, ctx)
        return _apply_unary(expr.op, inner)
    if isinstance(expr, BinaryOp):
        left = _eval_aggregate_expr(expr.left, group_rows, ctx)
        right = _eval_aggregate_expr(expr.right, group_rows, ctx)
        return _apply_binary(expr.op, left, right)
    if isinstance(expr, FuncCall):
        # Cast around an aggregate (or plain values of the first row).
        inner = _eval_aggregate_expr(expr.args[0], group_rows, ctx)
        return _eval_cast_value(expr.name, inner)
    return ERROR


def _apply_unary(op, value):
    if value is ERROR:
        return ERROR
    if op == "!":
        return (not value) if isinstance(value, bool) else ERROR
    if op == "-":
        return -value if is_numeric(value) else ERROR
    return ERROR


def _apply_binary(op, left, right):
    # Reuse the scalar logic by evaluating against constant wrappers.
    if left is ERROR or right is ERROR:
        if op in ("&&", "||"):
            left = left if isinstance(left, bool) else ERROR
            right = right if isinstance(right, bool) else ERROR
            if op == "&&" and (left is False or right is False):
                return False
            if op == "||" and (left is True or right is True):
                return True
        return ERROR
    fake = BinaryOp(op, LiteralExpr(left), LiteralExpr(right))
    return _eval_binary(fake, {}, None)


def _eval_cast_value(name, value):
    if value is ERROR:
        return ERROR
    fake = FuncCall(name, (LiteralExpr(value),))
    return _eval_cast(fake, {}, None)


def _fold(agg: FuncCall, group_rows, ctx):
    if agg.star:
        return len(group_rows)
    values = []
    for row in group_rows:
        v = _eval(agg.args[0], row, ctx)
        if v is ERROR:
            continue
        values.append(v)
    if agg.distinct:
        seen = set()
        unique = []
        for v in values:
            key = (type(v).__name__, v if not isinstance(v, float) else repr(v))
            if key not in seen:
                seen.add(key)
                unique.append(v)
        values = unique
    name = agg.name
    if name == "COUNT":
        return len(values)
    if name == "SUM":
        numeric = [v for v in values if is_numeric(v)]
        if len(numeric) != len(values):
            return ERROR
        return sum(numeric) if numeric else 0
    if name == "AVG":
        numeric = [v for v in values if is_numeric(v)]
        if not numeric or len(numeric) != len(values):
            return ERROR
        return sum(numeric) / len(numeric)
    if not values:
        return ERROR
    try:
        ordered = sorted(values, key=sort_key)
    except TypeError:
        return ERROR
    return ordered[0] if name == "MIN" else ordered[-1]


# ---------------------------------------------------------------------------
# Driver


def evaluate(query: SelectQuery, store: TripleStore) -> ResultTable:
    store.seal()
    ctx = _Context(store)
    rows: list[dict] = [{}]
    for element in query.where:
        if isinstance(element, TriplePatternAst):
            rows = _join_pattern(rows, element, ctx)
        elif isinstance(element, FilterClause):
            rows = [r for r in rows if _eval(element.expr, r, ctx) is True]
        elif isinstance(element, BindClause):
            new_rows = []
            for row in rows:
                value = _eval(element.expr, row, ctx)
                new = dict(row)
                if value is not ERROR:
                    new[element.var] = (_VAL, value)
                new_rows.append(new)
            rows = new_rows

    columns = [item.var for item in query.select]
    grouped = bool(query.group_by) or query.has_aggregates

    # Each output row keeps an environment (projected cells plus, for
    # ungrouped queries, every pattern binding) so ORDER BY can also sort
    # on variables that were not selected.
    out: list[tuple[tuple, dict]] = []
    if grouped:
        groups: dict[tuple, list[dict]] = {}
        for row in rows:
            key = tuple(_canon_binding(row.get(k), ctx) for k in query.group_by)
            groups.setdefault(key, []).append(row)
        if not groups and not query.group_by:
            groups[()] = []
        for group_rows in groups.values():
            cells = []
            env: dict[str, object] = {}
            if group_rows:
                for k in query.group_by:
                    binding = group_rows[0].get(k)
                    env[k] = ctx.value_of(binding) if binding is not None else None
            for item in query.select:
                if item.expr is None:
                    value = env.get(item.var)
                else:
                    value = _eval_aggregate_expr(item.expr, group_rows, ctx)
                    if value is ERROR:
                        value = None
                cells.append(value)
                env[item.var] = value
            out.append((tuple(cells), env))
    else:
        for row in rows:
            env = {
                name: ctx.value_of(binding) for name, binding in row.items()
            }
            cells = []
            for item in query.select:
                if item.expr is None:
                    value = env.get(item.var)
                else:
                    value = _eval(item.expr, row, ctx)
                    value = None if value is ERROR else value
                cells.append(value)
                env[item.var] = value
            out.append((tuple(cells), env))

    if query.order_by:
        out = _order_rows(out, query.order_by)

    out_rows = [cells for cells, _ in out]

    if query.distinct:
        seen = set()
        unique = []
        for row in out_rows:
            key = tuple(sort_key(v) for v in row)
            if key not in seen:
                seen.add(key)
                unique.append(row)
        out_rows = unique

    if query.offset:
        out_rows = out_rows[query.offset :]
    if query.limit is not None:
        out_rows = out_rows[: query.limit]

    return ResultTable(columns=columns, rows=out_rows)


def _canon_binding(binding, ctx) -> tuple:
    if binding is None:
        return (0,)
    return sort_key(ctx.value_of(binding))


def _order_rows(out: list[tuple[tuple, dict]], keys: Iterable[OrderKey]):
    keys = list(keys)

    def key_values(env):
        return [sort_key(_eval_over_env(k.expr, env)) for k in keys]

    decorated = [(key_values(env), cells, env) for cells, env in out]

    def compare(a, b):
        for i, k in enumerate(keys):
            if a[0][i] < b[0][i]:
                return 1 if k.descending else -1
            if a[0][i] > b[0][i]:
                return -1 if k.descending else 1
        return 0

    decorated.sort(key=functools.cmp_to_key(compare))
    return [(cells, env) for _, cells, env in decorated]


def _eval_over_env(expr, env: dict):
    """Evaluate an ORDER BY expression against one output environment."""
    if isinstance(expr, VarRef):
        return env.get(expr.name, ERROR)
    if isinstance(expr, LiteralExpr):
        return expr.value
    if isinstance(expr, IriExpr):
        return IriVal(expr.iri)
    if isinstance(expr, UnaryOp):
        return _apply_unary(expr.op, _eval_over_env(expr.operand, env))
    if isinstance(expr, BinaryOp):
        left = _eval_over_env(expr.left, env)
        right = _eval_over_env(expr.right, env)
        return _apply_binary(expr.op, left, right)
    if isinstance(expr, FuncCall) and expr.name in ("integer", "double", "decimal", "dateTime"):
        return _eval_cast_value(expr.name, _eval_over_env(expr.args[0], env))
    return ERROR
