"""Scope resolution for MiniC.

Produces a SymbolTable binding every Var occurrence to its declaration,
plus per-statement read/write name sets (conservative: a nested declaration's
name counts even though it cannot escape) and a bottom-up static type for
every expression. Types are informational: an ill-typed expression resolves
fine and faults at interpretation; transforms use `stmt_clean`/`expr_types`
to keep reordering rewrites honest about fault kinds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import (
    ArityMismatchError,
    CallToUnknownFunctionError,
    DuplicateDeclError,
    UnboundVarError,
)
from . import nodes as n

_ARITH_OPS = frozenset({"+", "-", "*", "/", "%"})
_REL_OPS = frozenset({"<", "<=", ">", ">="})
_EQ_OPS = frozenset({"==", "!="})
_LOGIC_OPS = frozenset({"&&", "||"})


@dataclass
class Binding:
    decl_id: int  # node id of the Declarator or Param
    name: str
    var_type: str
    kind: str  # 'param' or 'local'


@dataclass
class SymbolTable:
    functions: dict[str, n.FunctionDef]
    binding: dict[int, Binding] = field(default_factory=dict)  # Var id -> Binding
    reads: dict[int, frozenset[str]] = field(default_factory=dict)  # Stmt id -> names
    writes: dict[int, frozenset[str]] = field(default_factory=dict)
    expr_types: dict[int, str | None] = field(default_factory=dict)  # Expr id -> type
    stmt_clean: dict[int, bool] = field(default_factory=dict)  # statically well-typed

    def binding_of(self, var: n.Var) -> Binding:
        return self.binding[var.node_id]


class _Resolver:
    def __init__(self, unit: n.SourceUnit):
        self.unit = unit
        functions: dict[str, n.FunctionDef] = {}
        for fn in unit.functions:
            if fn.name in functions:
                raise DuplicateDeclError(f"duplicate function {fn.name!r}")
            functions[fn.name] = fn
        self.table = SymbolTable(functions)
        self.scopes: list[dict[str, Binding]] = []

    def run(self) -> SymbolTable:
        for fn in self.unit.functions:
            self.resolve_function(fn)
        return self.table

    # --- scope plumbing ---

    def push(self):
        self.scopes.append({})

    def pop(self):
        self.scopes.pop()

    def declare(self, decl_id: int, name: str, var_type: str, kind: str):
        scope = self.scopes[-1]
        if name in scope:
            raise DuplicateDeclError(f"duplicate declaration of {name!r} in the same scope")
        scope[name] = Binding(decl_id, name, var_type, kind)

    def lookup(self, var: n.Var) -> Binding:
        for scope in reversed(self.scopes):
            if var.name in scope:
                return scope[var.name]
        line, col = var.pos
        raise UnboundVarError(f"{line}:{col}: unbound variable {var.name!r}")

    # --- functions ---

    def resolve_function(self, fn: n.FunctionDef):
        self.current_return = fn.return_type
        self.push()
        for p in fn.params:
            self.declare(p.node_id, p.name, p.var_type, "param")
        # the body block shares the parameter scope (C-style)
        reads, writes, _ = self.resolve_stmts(fn.body.stmts, fn.body.node_id)
        self.table.reads[fn.body.node_id] = reads
        self.table.writes[fn.body.node_id] = writes
        self.pop()

    # --- statements: return (reads, writes, clean) for the subtree ---

    def resolve_stmts(self, stmts: list[n.Stmt], owner_id: int | None = None):
        reads: set[str] = set()
        writes: set[str] = set()
        clean = True
        for s in stmts:
            r, w, c = self.resolve_stmt(s)
            reads |= r
            writes |= w
            clean = clean and c
        return frozenset(reads), frozenset(writes), clean

    def resolve_stmt(self, s: n.Stmt):
        reads: set[str] = set()
        writes: set[str] = set()
        clean = True

        def use(expr: n.Expr, want: str | None = None) -> str | None:
            nonlocal clean
            r, w, t = self.resolve_expr(expr)
            reads.update(r)
            writes.update(w)
            if t is None or (want is not None and t != want):
                clean = False
            return t

        if isinstance(s, n.Decl):
            for d in s.declarators:
                if d.init is not None:
                    use(d.init, s.var_type)
                self.declare(d.node_id, d.name, s.var_type, "local")
                writes.add(d.name)
        elif isinstance(s, n.Assign):
            b = self.lookup(s.target)
            self.table.binding[s.target.node_id] = b
            use(s.value, b.var_type)
            writes.add(s.target.name)
        elif isinstance(s, n.CompoundAssign):
            b = self.lookup(s.target)
            self.table.binding[s.target.node_id] = b
            if b.var_type != n.INT:
                clean = False
            use(s.value, n.INT)
            reads.add(s.target.name)
            writes.add(s.target.name)
        elif isinstance(s, n.IncDec):
            b = self.lookup(s.target)
            self.table.binding[s.target.node_id] = b
            if b.var_type != n.INT:
                clean = False
            reads.add(s.target.name)
            writes.add(s.target.name)
        elif isinstance(s, n.Block):
            self.push()
            r, w, clean = self.resolve_stmts(s.stmts)
            reads, writes = set(r), set(w)
            self.pop()
        elif isinstance(s, n.If):
            use(s.cond, n.BOOL)
            self.push()
            r, w, c = self.resolve_stmts(s.then_branch.stmts)
            self.table.reads[s.then_branch.node_id] = r
            self.table.writes[s.then_branch.node_id] = w
            self.table.stmt_clean[s.then_branch.node_id] = c
            reads |= r
            writes |= w
            clean = clean and c
            self.pop()
            if isinstance(s.else_branch, n.If):  # 'else if' chlink
                r, w, c = self.resolve_stmt(s.else_branch)
                reads |= r
                writes |= w
                clean = clean and c
            elif s.else_branch is not None:
                self.push()
                r, w, c = self.resolve_stmts(s.else_branch.stmts)
                self.table.reads[s.else_branch.node_id] = r
                self.table.writes[s.else_branch.node_id] = w
                self.table.stmt_clean[s.else_branch.node_id] = c
                reads |= r
                writes |= w
                clean = clean and c
                self.pop()
        elif isinstance(s, n.While):
            use(s.cond, n.BOOL)
            self.push()
            r, w, c = self.resolve_stmts(s.body.stmts)
            self.table.reads[s.body.node_id] = r
            self.table.writes[s.body.node_id] = w
            self.table.stmt_clean[s.body.node_id] = c
            reads |= r
            writes |= w
            clean = clean and c
            self.pop()
        elif isinstance(s, n.For):
            self.push()  # init declarations scope over cond/step/body
            if s.init is not None:
                r, w, c = self.resolve_stmt(s.init)
                reads |= r
                writes |= w
                clean = clean and c
            if s.cond is not None:
                use(s.cond, n.BOOL)
            if s.step is not None:
                r, w, c = self.resolve_stmt(s.step)
                reads |= r
                writes |= w
                clean = clean and c
            self.push()
            r, w, c = self.resolve_stmts(s.body.stmts)
            self.table.reads[s.body.node_id] = r
            self.table.writes[s.body.node_id] = w
            self.table.stmt_clean[s.body.node_id] = c
            reads |= r
            writes |= w
            clean = clean and c
            self.pop()
            self.pop()
        elif isinstance(s, n.Switch):
            use(s.scrutinee, n.INT)
            self.push()  # one scope for the whole switch body
            for case in s.cases:
                r, w, c = self.resolve_stmts(case.stmts)
                self.table.reads[case.node_id] = r
                self.table.writes[case.node_id] = w
                self.table.stmt_clean[case.node_id] = c
                reads |= r
                writes |= w
                clean = clean and c
            if s.default is not None:
                r, w, c = self.resolve_stmts(s.default)
                reads |= r
                writes |= w
                clean = clean and c
            self.pop()
        elif isinstance(s, n.Return):
            use(s.value, self.current_return)
        elif isinstance(s, (n.Break, n.Continue)):
            pass
        elif isinstance(s, n.ExprStmt):
            nonlocal_t = self.resolve_expr(s.expr)
            reads.update(nonlocal_t[0])
            writes.update(nonlocal_t[1])
            if nonlocal_t[2] is None:
                clean = False
        else:
            raise TypeError(f"not a statement node: {type(s).__name__}")

        self.table.reads[s.node_id] = frozenset(reads)
        self.table.writes[s.node_id] = frozenset(writes)
        self.table.stmt_clean[s.node_id] = clean
        return frozenset(reads), frozenset(writes), clean

    # --- expressions: return (reads, writes, type|None) ---

    def resolve_expr(self, e: n.Expr):
        reads: set[str] = set()
        writes: set[str] = set()

        def walk(x: n.Expr) -> str | None:
            t: str | None
            if isinstance(x, n.IntLit):
                t = n.INT
            elif isinstance(x, n.BoolLit):
                t = n.BOOL
            elif isinstance(x, n.Var):
                b = self.lookup(x)
                self.table.binding[x.node_id] = b
                reads.add(x.name)
                t = b.var_type
            elif isinstance(x, n.Unary):
                if x.op in ("++", "--"):
                    # operand is a Var by construction
                    ot = walk(x.operand)
                    writes.add(x.operand.name)  # type: ignore[union-attr]
                    t = n.INT if ot == n.INT else None
                elif x.op == "-":
                    t = n.INT if walk(x.operand) == n.INT else None
                else:  # '!'
                    t = n.BOOL if walk(x.operand) == n.BOOL else None
            elif isinstance(x, n.Binary):
                lt = walk(x.left)
                rt = walk(x.right)
                if x.op in _ARITH_OPS:
                    t = n.INT if (lt == n.INT and rt == n.INT) else None
                elif x.op in _REL_OPS:
                    t = n.BOOL if (lt == n.INT and rt == n.INT) else None
                elif x.op in _EQ_OPS:
                    t = n.BOOL if (lt is not None and lt == rt) else None
                elif x.op in _LOGIC_OPS:
                    t = n.BOOL if (lt == n.BOOL and rt == n.BOOL) else None
                else:
                    raise TypeError(f"unknown binary operator {x.op!r}")
            elif isinstance(x, n.Ternary):
                ct = walk(x.cond)
                tt = walk(x.if_true)
                ft = walk(x.if_false)
                t = tt if (ct == n.BOOL and tt is not None and tt == ft) else None
            elif isinstance(x, n.Call):
                fn = self.table.functions.get(x.name)
                if fn is None:
                    line, col = x.pos
                    raise CallToUnknownFunctionError(
                        f"{line}:{col}: call to unknown function {x.name!r}")
                if len(x.args) != len(fn.params):
                    line, col = x.pos
                    raise ArityMismatchError(
                        f"{line}:{col}: {x.name!r} takes {len(fn.params)} "
                        f"argument(s), got {len(x.args)}")
                ok = True
                for arg, p in zip(x.args, fn.params):
                    if walk(arg) != p.var_type:
                        ok = False
                t = fn.return_type if ok else None
            elif isinstance(x, n.Paren):
                t = walk(x.inner)
            else:
                raise TypeError(f"not an expression node: {type(x).__name__}")
            self.table.expr_types[x.node_id] = t
            return t

        t = walk(e)
        return frozenset(reads), frozenset(writes), t


def resolve_scopes(unit: n.SourceUnit) -> SymbolTable:
    """Bind names, compute read/write sets and static types.

    Raises UnboundVarError, DuplicateDeclError, CallToUnknownFunctionError or
    ArityMismatchError. Type mismatches never raise here; they surface as
    interpreter faults.
    """
    return _Resolver(unit).run()
