"""Concrete textual syntax for specification units (`.arch` files)."""

from .grammar import parse_unit
from .lowering import lower_formula, lower_sort, lower_term
from .printer import print_expr, print_sort, print_unit
from .resolver import (
    LabeledAssertion,
    ResolvedAssertion,
    ResolvedBundle,
    TraceData,
    resolve,
)
from .syntax import Diagnostic, SourceUnit, Span

__all__ = [
    "Diagnostic",
    "LabeledAssertion",
    "ResolvedAssertion",
    "ResolvedBundle",
    "SourceUnit",
    "Span",
    "TraceData",
    "lower_formula",
    "lower_sort",
    "lower_term",
    "parse_unit",
    "print_expr",
    "print_sort",
    "print_unit",
    "resolve",
]
