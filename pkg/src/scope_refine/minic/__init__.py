"""MiniC: lexer, parser, canonical printer, scope resolver and interpreter.

MiniC is a small imperative stand-in language (int/bool, C-like statements,
no pointers/arrays/IO) used as the unit of validation and transformation.
The interpreter is the semantic-equivalence oracle for every rewrite.
"""

from . import nodes
from .interp import DEFAULT_FUEL, FaultKind, RunOutcome, interpret, wrap64
from .lexer import Token, lex
from .nodes import (
    DEFAULT_ENTRY,
    SourceUnit,
    clone,
    find_node,
    iter_nodes,
    parent_map,
    renumber,
    structurally_equal,
)
from .parser import SourceText, parse
from .printer import expr_prec, expr_str, print_source, wrap_left, wrap_operand, wrap_right
from .scopes import Binding, SymbolTable, resolve_scopes

__all__ = [
    "DEFAULT_ENTRY",
    "DEFAULT_FUEL",
    "Binding",
    "FaultKind",
    "RunOutcome",
    "SourceText",
    "SourceUnit",
    "SymbolTable",
    "Token",
    "clone",
    "expr_prec",
    "expr_str",
    "find_node",
    "interpret",
    "iter_nodes",
    "lex",
    "nodes",
    "parent_map",
    "parse",
    "print_source",
    "renumber",
    "resolve_scopes",
    "structurally_equal",
    "wrap64",
    "wrap_left",
    "wrap_operand",
    "wrap_right",
]
