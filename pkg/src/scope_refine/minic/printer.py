"""Canonical MiniC printer: 4-space indent, one statement per line, braces
always, single spaces around binary operators.

The printer never invents parentheses; grouping in the tree is carried by
explicit Paren nodes. Code that constructs expressions (the parser via source
parens, transforms via `wrap_left`/`wrap_right`/`wrap_operand`) is responsible
for inserting Paren nodes wherever the flat rendering would otherwise
re-parse to a different shape. `parse(print_source(u))` is structurally equal
to `u` for every unit built through those paths.
"""

from __future__ import annotations

from . import nodes as n

BIN_PREC = {
    "||": 3, "&&": 4,
    "==": 5, "!=": 5,
    "<": 6, "<=": 6, ">": 6, ">=": 6,
    "+": 7, "-": 7,
    "*": 8, "/": 8, "%": 8,
}
TERNARY_PREC = 2
UNARY_PREC = 9
PRIMARY_PREC = 10

_INDENT = "    "


def expr_prec(e: n.Expr) -> int:
    if isinstance(e, n.Binary):
        return BIN_PREC[e.op]
    if isinstance(e, n.Ternary):
        return TERNARY_PREC
    if isinstance(e, n.Unary):
        return UNARY_PREC
    return PRIMARY_PREC


def wrap_left(child: n.Expr, op: str) -> n.Expr:
    """Make `child` printable as the left operand of binary `op`."""
    return child if expr_prec(child) >= BIN_PREC[op] else n.Paren(child)


def wrap_right(child: n.Expr, op: str) -> n.Expr:
    """Make `child` printable as the right operand of binary `op`
    (left-associative grammar: equal precedence needs parens)."""
    return child if expr_prec(child) > BIN_PREC[op] else n.Paren(child)


def wrap_operand(child: n.Expr) -> n.Expr:
    """Make `child` printable as a prefix unary operand."""
    return child if expr_prec(child) >= UNARY_PREC else n.Paren(child)


def expr_str(e: n.Expr) -> str:
    if isinstance(e, n.IntLit):
        return str(e.value)
    if isinstance(e, n.BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, n.Var):
        return e.name
    if isinstance(e, n.Unary):
        inner = expr_str(e.operand)
        if e.postfix:
            return inner + e.op
        # a space keeps '- -x' from lexing as '--x'
        if e.op == "-" and inner.startswith("-"):
            return "- " + inner
        return e.op + inner
    if isinstance(e, n.Binary):
        return f"{expr_str(e.left)} {e.op} {expr_str(e.right)}"
    if isinstance(e, n.Ternary):
        return f"{expr_str(e.cond)} ? {expr_str(e.if_true)} : {expr_str(e.if_false)}"
    if isinstance(e, n.Call):
        return f"{e.name}({', '.join(expr_str(a) for a in e.args)})"
    if isinstance(e, n.Paren):
        return f"({expr_str(e.inner)})"
    raise TypeError(f"not an expression node: {type(e).__name__}")


def _decl_str(d: n.Decl) -> str:
    parts = []
    for dec in d.declarators:
        if dec.init is None:
            parts.append(dec.name)
        else:
            parts.append(f"{dec.name} = {expr_str(dec.init)}")
    return f"{d.var_type} {', '.join(parts)}"


def _inline_stmt_str(s: n.Stmt) -> str:
    """Statement rendered without trailing semicolon, for for() slots."""
    if isinstance(s, n.Decl):
        return _decl_str(s)
    if isinstance(s, n.Assign):
        return f"{s.target.name} = {expr_str(s.value)}"
    if isinstance(s, n.CompoundAssign):
        return f"{s.target.name} {s.op} {expr_str(s.value)}"
    if isinstance(s, n.IncDec):
        return f"{s.target.name}{s.op}"
    if isinstance(s, n.ExprStmt):
        return expr_str(s.expr)
    raise TypeError(f"statement kind not allowed here: {type(s).__name__}")


def _emit_block_body(block: n.Block, indent: int, out: list[str]) -> None:
    for stmt in block.stmts:
        _emit_stmt(stmt, indent, out)


def _emit_stmt(s: n.Stmt, indent: int, out: list[str]) -> None:
    pad = _INDENT * indent
    if isinstance(s, (n.Decl, n.Assign, n.CompoundAssign, n.IncDec, n.ExprStmt)):
        out.append(f"{pad}{_inline_stmt_str(s)};")
    elif isinstance(s, n.Return):
        out.append(f"{pad}return {expr_str(s.value)};")
    elif isinstance(s, n.Break):
        out.append(f"{pad}break;")
    elif isinstance(s, n.Continue):
        out.append(f"{pad}continue;")
    elif isinstance(s, n.Block):
        out.append(f"{pad}{{")
        _emit_block_body(s, indent + 1, out)
        out.append(f"{pad}}}")
    elif isinstance(s, n.If):
        out.append(f"{pad}if ({expr_str(s.cond)}) {{")
        _emit_block_body(s.then_branch, indent + 1, out)
        node = s
        while isinstance(node.else_branch, n.If):
            node = node.else_branch
            out.append(f"{pad}}} else if ({expr_str(node.cond)}) {{")
            _emit_block_body(node.then_branch, indent + 1, out)
        if node.else_branch is None:
            out.append(f"{pad}}}")
        else:
            out.append(f"{pad}}} else {{")
            _emit_block_body(node.else_branch, indent + 1, out)
            out.append(f"{pad}}}")
    elif isinstance(s, n.While):
        out.append(f"{pad}while ({expr_str(s.cond)}) {{")
        _emit_block_body(s.body, indent + 1, out)
        out.append(f"{pad}}}")
    elif isinstance(s, n.For):
        init = _inline_stmt_str(s.init) if s.init is not None else ""
        cond = f" {expr_str(s.cond)}" if s.cond is not None else ""
        step = f" {_inline_stmt_str(s.step)}" if s.step is not None else ""
        out.append(f"{pad}for ({init};{cond};{step}) {{")
        _emit_block_body(s.body, indent + 1, out)
        out.append(f"{pad}}}")
    elif isinstance(s, n.Switch):
        out.append(f"{pad}switch ({expr_str(s.scrutinee)}) {{")
        for case in s.cases:
            out.append(f"{pad}{_INDENT}case {case.label}:")
            for cs in case.stmts:
                _emit_stmt(cs, indent + 2, out)
        if s.default is not None:
            out.append(f"{pad}{_INDENT}default:")
            for ds in s.default:
                _emit_stmt(ds, indent + 2, out)
        out.append(f"{pad}}}")
    else:
        raise TypeError(f"not a statement node: {type(s).__name__}")


def print_source(unit: n.SourceUnit) -> str:
    """Render the canonical form. Re-parsing the result yields a unit
    structurally equal to `unit`; printing is idempotent."""
    chunks = []
    for fn in unit.functions:
        out: list[str] = []
        params = ", ".join(f"{p.var_type} {p.name}" for p in fn.params)
        out.append(f"{fn.return_type} {fn.name}({params}) {{")
        _emit_block_body(fn.body, 1, out)
        out.append("}")
        chunks.append("\n".join(out) + "\n")
    return "\n".join(chunks)
