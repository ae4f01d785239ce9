"""Seeded random MiniC program generator.

Programs are well-typed by construction, halt by construction (loops are
counter-bounded; the only runtime fault left is division by zero, which is a
halting outcome), and exercise every statement form the transformation
operators anchor on. Division placement is steered by `div_mode`:

  "var"   - at least one division whose divisor is a variable (the
            defect-like property the default class rule labels 1)
  "const" - divisions appear but only with nonzero constant divisors
  "none"  - no '/' at all

so a corpus can mix unambiguous and confusable negatives.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from ..minic import nodes as n
from ..minic.nodes import DEFAULT_ENTRY


@dataclass(frozen=True)
class GeneratorConfig:
    div_mode: str = "none"  # 'var' | 'const' | 'none'
    min_stmts: int = 3
    max_stmts: int = 7
    with_helper_prob: float = 0.25


def div_risk_label(unit: n.SourceUnit) -> int:
    """1 iff some division's divisor is (syntactically) a variable."""
    for node in n.iter_nodes(unit):
        if isinstance(node, n.Binary) and node.op == "/" and isinstance(node.right, n.Var):
            return 1
    return 0


class ProgramSampler:
    def __init__(self, rng: random.Random, cfg: GeneratorConfig = GeneratorConfig()):
        self.rng = rng
        self.cfg = cfg
        self.int_vars: list[str] = []
        self.bool_vars: list[str] = []
        self.frozen: set[str] = set()  # loop counters: never reassigned
        self.counter = 0
        self.helper: n.FunctionDef | None = None
        self.div_done = False

    # --- names ---

    def fresh(self, prefix: str) -> str:
        self.counter += 1
        return f"{prefix}{self.counter}"

    def pick_int_var(self) -> str | None:
        return self.rng.choice(self.int_vars) if self.int_vars else None

    def pick_mutable_int(self) -> str | None:
        options = [v for v in self.int_vars if v not in self.frozen]
        return self.rng.choice(options) if options else None

    # --- expressions ---

    def int_leaf(self) -> n.Expr:
        if self.int_vars and self.rng.random() < 0.6:
            return n.Var(self.rng.choice(self.int_vars))
        return n.IntLit(self.rng.randint(0, 20))

    def int_expr(self, depth: int = 2) -> n.Expr:
        if depth <= 0 or self.rng.random() < 0.35:
            return self.int_leaf()
        roll = self.rng.random()
        if roll < 0.78:
            op = self.rng.choice(("+", "-", "*"))
            left = self.int_expr(depth - 1)
            right = self.int_expr(depth - 1)
            return n.Binary(op, self._wl(left, op), self._wr(right, op))
        if roll < 0.90 and self.cfg.div_mode != "none":
            return self.division(depth)
        if roll < 0.96:
            op = "%"
            left = self.int_expr(depth - 1)
            return n.Binary(op, self._wl(left, op), n.IntLit(self.rng.randint(2, 9)))
        return n.Unary("-", n.Paren(self.int_expr(depth - 1)))

    def division(self, depth: int = 1) -> n.Expr:
        left = self.int_expr(max(depth - 1, 0))
        if self.cfg.div_mode == "var" and self.int_vars:
            self.div_done = True
            divisor: n.Expr = n.Var(self.rng.choice(self.int_vars))
        else:
            divisor = n.IntLit(self.rng.randint(2, 9))
        return n.Binary("/", self._wl(left, "/"), self._wr(divisor, "/"))

    def _wl(self, e: n.Expr, op: str) -> n.Expr:
        from ..minic.printer import wrap_left
        return wrap_left(e, op)

    def _wr(self, e: n.Expr, op: str) -> n.Expr:
        from ..minic.printer import wrap_right
        return wrap_right(e, op)

    def comparison(self) -> n.Expr:
        op = self.rng.choice(("<", "<=", ">", ">=", "==", "!="))
        return n.Binary(op, self.int_expr(1), self.int_expr(1))

    def bool_expr(self, depth: int = 1) -> n.Expr:
        roll = self.rng.random()
        if self.bool_vars and roll < 0.25:
            return n.Var(self.rng.choice(self.bool_vars))
        if roll < 0.75 or depth <= 0:
            return self.comparison()
        if roll < 0.90:
            op = self.rng.choice(("&&", "||"))
            return n.Binary(op, n.Paren(self.comparison()), n.Paren(self.bool_expr(depth - 1)))
        return n.Unary("!", n.Paren(self.comparison()))

    # --- statements ---

    def decl_int(self) -> n.Stmt:
        if self.rng.random() < 0.2:
            names = [self.fresh("v") for _ in range(2)]
            decls = [n.Declarator(name, self.int_expr(1)) for name in names]
            self.int_vars.extend(names)
            return n.Decl(n.INT, decls)
        name = self.fresh("v")
        stmt = n.Decl(n.INT, [n.Declarator(name, self.int_expr(2))])
        self.int_vars.append(name)
        return stmt

    def decl_bool(self) -> n.Stmt:
        name = self.fresh("flag")
        stmt = n.Decl(n.BOOL, [n.Declarator(name, self.bool_expr())])
        self.bool_vars.append(name)
        return stmt

    def simple_stmt(self) -> n.Stmt:
        target = self.pick_mutable_int()
        if target is None:
            return self.decl_int()
        roll = self.rng.random()
        if roll < 0.45:
            return n.Assign(n.Var(target), self.int_expr(2))
        if roll < 0.70:
            op = self.rng.choice(("+=", "-=", "*="))
            return n.CompoundAssign(n.Var(target), op, self.int_expr(1))
        if roll < 0.85:
            return n.IncDec(n.Var(target), self.rng.choice(("++", "--")))
        return n.Assign(n.Var(target),
                        n.Ternary(self.bool_expr(0), self.int_expr(1), self.int_expr(1)))

    def if_stmt(self, allow_jump: str | None = None) -> n.Stmt:
        then_stmts: list[n.Stmt] = [self.simple_stmt()]
        if allow_jump and self.rng.random() < 0.35:
            then_stmts = [n.Continue() if allow_jump == "continue" else n.Break()]
        els = None
        if self.rng.random() < 0.4:
            els = n.Block([self.simple_stmt()])
        return n.If(self.bool_expr(), n.Block(then_stmts), els)

    def loop_body(self, counter: str, kind: str) -> list[n.Stmt]:
        stmts: list[n.Stmt] = []
        for _ in range(self.rng.randint(1, 2)):
            stmts.append(self.simple_stmt())
        if self.rng.random() < 0.3:
            # continue only where the step still runs (for loops); break anywhere
            jump = "continue" if (kind == "for" and self.rng.random() < 0.5) else "break"
            stmts.insert(self.rng.randrange(len(stmts) + 1), self.if_stmt(jump))
        return stmts

    def for_loop(self) -> n.Stmt:
        counter = self.fresh("i")
        bound = self.rng.randint(2, 8)
        self.int_vars.append(counter)
        self.frozen.add(counter)
        body = self.loop_body(counter, "for")
        stmt = n.For(
            n.Decl(n.INT, [n.Declarator(counter, n.IntLit(0))]),
            n.Binary("<", n.Var(counter), n.IntLit(bound)),
            n.IncDec(n.Var(counter), "++"),
            n.Block(body),
        )
        self.int_vars.remove(counter)
        self.frozen.discard(counter)
        return stmt

    def while_loop(self) -> list[n.Stmt]:
        counter = self.fresh("w")
        bound = self.rng.randint(2, 6)
        decl = n.Decl(n.INT, [n.Declarator(counter, n.IntLit(0))])
        self.int_vars.append(counter)
        self.frozen.add(counter)
        body = self.loop_body(counter, "while")
        self.frozen.discard(counter)
        body.append(n.CompoundAssign(n.Var(counter), "+=", n.IntLit(1)))
        loop = n.While(n.Binary("<", n.Var(counter), n.IntLit(bound)), n.Block(body))
        self.frozen.add(counter)
        return [decl, loop]

    def switch_stmt(self) -> n.Stmt | None:
        scrutinee = self.pick_int_var()
        if scrutinee is None:
            return None
        cases = []
        labels = self.rng.sample(range(0, 6), self.rng.randint(2, 3))
        for label in labels:
            cases.append(n.Case(label, [self.simple_stmt(), n.Break()]))
        default = [self.simple_stmt(), n.Break()] if self.rng.random() < 0.7 else None
        return n.Switch(n.Var(scrutinee), cases, default)

    def gen_stmts(self) -> list[n.Stmt]:
        stmts: list[n.Stmt] = [self.decl_int()]
        if self.rng.random() < 0.5:
            stmts.append(self.decl_bool())
        budget = self.rng.randint(self.cfg.min_stmts, self.cfg.max_stmts)
        for _ in range(budget):
            roll = self.rng.random()
            if roll < 0.34:
                stmts.append(self.simple_stmt())
            elif roll < 0.46:
                stmts.append(self.decl_int())
            elif roll < 0.60:
                stmts.append(self.if_stmt())
            elif roll < 0.74:
                stmts.append(self.for_loop())
            elif roll < 0.84:
                stmts.extend(self.while_loop())
            elif roll < 0.92:
                sw = self.switch_stmt()
                if sw is not None:
                    stmts.append(sw)
            else:
                stmts.append(n.Block([self.simple_stmt(), self.simple_stmt()]))
        if self.helper is not None and self.rng.random() < 0.8:
            name = self.fresh("h")
            args: list[n.Expr] = [self.int_expr(1) for _ in self.helper.params]
            stmts.append(n.Decl(n.INT, [n.Declarator(name, n.Call(self.helper.name, args))]))
            self.int_vars.append(name)
        return stmts

    def gen_helper(self) -> n.FunctionDef:
        saved = (self.int_vars, self.bool_vars, self.frozen)
        params = [n.Param(n.INT, name) for name in ("x", "y")[:self.rng.randint(1, 2)]]
        self.int_vars = [p.name for p in params]
        self.bool_vars = []
        self.frozen = set(self.int_vars)
        body: list[n.Stmt] = [self.decl_int()]
        if self.rng.random() < 0.5:
            body.append(self.simple_stmt())
        body.append(n.Return(self.int_expr(2)))
        fn = n.FunctionDef(self.fresh("helper"), params, n.INT, n.Block(body))
        self.int_vars, self.bool_vars, self.frozen = saved
        return fn

    def generate(self) -> n.SourceUnit:
        params = [n.Param(n.INT, name) for name in ("a", "b", "c")[:self.rng.randint(2, 3)]]
        self.int_vars = [p.name for p in params]
        self.bool_vars = []
        self.frozen = set()
        functions = []
        if self.rng.random() < self.cfg.with_helper_prob:
            self.helper = self.gen_helper()
            functions.append(self.helper)
        stmts = self.gen_stmts()
        if self.cfg.div_mode == "var" and not self.div_done:
            name = self.fresh("q")
            stmts.append(n.Decl(n.INT, [n.Declarator(name, self.division())]))
            self.int_vars.append(name)
        if self.cfg.div_mode == "const" and not any(
                isinstance(x, n.Binary) and x.op == "/"
                for s in stmts for x in n.iter_nodes(s)):
            name = self.fresh("q")
            stmts.append(n.Decl(n.INT, [n.Declarator(name, self.division())]))
            self.int_vars.append(name)
        stmts.append(n.Return(self.int_expr(2)))
        functions.append(n.FunctionDef(DEFAULT_ENTRY, params, n.INT, n.Block(stmts)))
        return n.renumber(n.SourceUnit(functions))


def sample_program(seed: int, cfg: GeneratorConfig = GeneratorConfig()) -> n.SourceUnit:
    return ProgramSampler(random.Random(seed), cfg).generate()
