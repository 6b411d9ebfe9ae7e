"""SPARQL-subset query engine: parser, evaluator, and result tables."""

from hpckg.sparql.ast import SelectQuery
from hpckg.sparql.evaluate import ResultTable, evaluate
from hpckg.sparql.parser import parse_query

__all__ = ["SelectQuery", "ResultTable", "evaluate", "parse_query"]
