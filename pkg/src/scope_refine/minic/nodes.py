"""AST node definitions for MiniC.

Every node carries a `node_id` (preorder index, assigned by `renumber`) and a
`pos` (line, col) filled in by the parser. Both are bookkeeping only:
`structurally_equal` ignores them. Nodes are treated as immutable once a unit
has been renumbered; transformations deep-copy before editing.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field, fields
from typing import Iterator, Union

INT = "int"
BOOL = "bool"

_BOOKKEEPING = ("node_id", "pos")


@dataclass(eq=False)
class Node:
    node_id: int = field(default=-1, kw_only=True)
    pos: tuple[int, int] = field(default=(0, 0), kw_only=True)


# --- expressions ----------------------------------------------------------


@dataclass(eq=False)
class IntLit(Node):
    # lexical value (always >= 0 as written); wrapped to 64 bits at evaluation
    value: int


@dataclass(eq=False)
class BoolLit(Node):
    value: bool


@dataclass(eq=False)
class Var(Node):
    name: str


@dataclass(eq=False)
class Unary(Node):
    op: str  # '-', '!', '++', '--'
    operand: "Expr"
    postfix: bool = False  # only meaningful for '++' / '--'


@dataclass(eq=False)
class Binary(Node):
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(eq=False)
class Ternary(Node):
    cond: "Expr"
    if_true: "Expr"
    if_false: "Expr"


@dataclass(eq=False)
class Call(Node):
    name: str
    args: list["Expr"]


@dataclass(eq=False)
class Paren(Node):
    inner: "Expr"


Expr = Union[IntLit, BoolLit, Var, Unary, Binary, Ternary, Call, Paren]


# --- statements -----------------------------------------------------------


@dataclass(eq=False)
class Declarator(Node):
    name: str
    init: Expr | None


@dataclass(eq=False)
class Decl(Node):
    var_type: str  # INT or BOOL
    declarators: list[Declarator]


@dataclass(eq=False)
class Assign(Node):
    target: Var
    value: Expr


@dataclass(eq=False)
class CompoundAssign(Node):
    target: Var
    op: str  # '+=', '-=', '*=', '/=', '%='
    value: Expr


@dataclass(eq=False)
class IncDec(Node):
    target: Var
    op: str  # '++' or '--'


@dataclass(eq=False)
class Block(Node):
    stmts: list["Stmt"]


@dataclass(eq=False)
class If(Node):
    cond: Expr
    then_branch: Block
    else_branch: "Block | If | None"  # If = an 'else if' chain link


@dataclass(eq=False)
class While(Node):
    cond: Expr
    body: Block


@dataclass(eq=False)
class For(Node):
    # init/step hold statement nodes (printed without the trailing semicolon)
    init: Union["Stmt", None]
    cond: Expr | None
    step: Union["Stmt", None]
    body: Block


@dataclass(eq=False)
class Case(Node):
    label: int
    stmts: list["Stmt"]


@dataclass(eq=False)
class Switch(Node):
    scrutinee: Expr
    cases: list[Case]
    default: list["Stmt"] | None  # parser requires default to be last


@dataclass(eq=False)
class Return(Node):
    value: Expr


@dataclass(eq=False)
class Break(Node):
    pass


@dataclass(eq=False)
class Continue(Node):
    pass


@dataclass(eq=False)
class ExprStmt(Node):
    expr: Expr


Stmt = Union[
    Decl, Assign, CompoundAssign, IncDec, Block, If, While, For,
    Switch, Return, Break, Continue, ExprStmt,
]


# --- top level ------------------------------------------------------------


@dataclass(eq=False)
class Param(Node):
    var_type: str
    name: str


@dataclass(eq=False)
class FunctionDef(Node):
    name: str
    params: list[Param]
    return_type: str
    body: Block


@dataclass(eq=False)
class SourceUnit(Node):
    functions: list[FunctionDef]


DEFAULT_ENTRY = "main_entry"


# --- tree utilities -------------------------------------------------------


def child_nodes(node: Node) -> Iterator[Node]:
    """Direct child nodes, in field declaration order."""
    for f in fields(node):
        if f.name in _BOOKKEEPING:
            continue
        value = getattr(node, f.name)
        if isinstance(value, Node):
            yield value
        elif isinstance(value, list):
            for item in value:
                if isinstance(item, Node):
                    yield item


def iter_nodes(root: Node) -> Iterator[Node]:
    """Preorder traversal of the subtree rooted at `root`."""
    yield root
    for child in child_nodes(root):
        yield from iter_nodes(child)


def renumber(unit: SourceUnit) -> SourceUnit:
    """Assign fresh preorder node ids; returns the same unit for chaining."""
    for i, node in enumerate(iter_nodes(unit)):
        node.node_id = i
    return unit


def find_node(root: Node, node_id: int) -> Node | None:
    for node in iter_nodes(root):
        if node.node_id == node_id:
            return node
    return None


def parent_map(root: Node) -> dict[int, tuple[Node, str, int | None]]:
    """Map node_id -> (parent, field name, list index or None)."""
    out: dict[int, tuple[Node, str, int | None]] = {}
    for node in iter_nodes(root):
        for f in fields(node):
            if f.name in _BOOKKEEPING:
                continue
            value = getattr(node, f.name)
            if isinstance(value, Node):
                out[value.node_id] = (node, f.name, None)
            elif isinstance(value, list):
                for i, item in enumerate(value):
                    if isinstance(item, Node):
                        out[item.node_id] = (node, f.name, i)
    return out


def structurally_equal(a: Node | None, b: Node | None) -> bool:
    """Deep equality ignoring node ids and source positions."""
    if a is None or b is None:
        return a is b
    if type(a) is not type(b):
        return False
    for f in fields(a):
        if f.name in _BOOKKEEPING:
            continue
        va = getattr(a, f.name)
        vb = getattr(b, f.name)
        if isinstance(va, Node) or isinstance(vb, Node):
            if not (isinstance(va, Node) and isinstance(vb, Node)):
                return False
            if not structurally_equal(va, vb):
                return False
        elif isinstance(va, list) and isinstance(vb, list):
            if len(va) != len(vb):
                return False
            for xa, xb in zip(va, vb):
                if isinstance(xa, Node) or isinstance(xb, Node):
                    if not (isinstance(xa, Node) and isinstance(xb, Node)):
                        return False
                    if not structurally_equal(xa, xb):
                        return False
                elif xa != xb:
                    return False
        elif va != vb:
            return False
    return True


def clone(node: Node):
    return copy.deepcopy(node)
