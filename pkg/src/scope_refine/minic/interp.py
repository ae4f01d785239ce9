"""Deterministic tree-walking interpreter for MiniC.

Semantics:
  - 64-bit signed wrapping arithmetic; division truncates toward zero and a
    zero divisor is a DivByZero fault (including '%').
  - Values are Python int/bool; operator type mismatches are TypeFault at
    evaluation time (conditions must be bool).
  - '&&' / '||' short-circuit; ternary evaluates one arm.
  - One fuel step per statement execution and per expression-node evaluation.
    Exhaustion is a FuelExhausted outcome with steps_used == fuel.
  - Every failure is a RunOutcome fault; interpret never raises for program
    behavior, only for misuse (unknown entry, malformed argument list).
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from enum import Enum

from ..errors import InterpreterUsageError
from . import nodes as n

DEFAULT_FUEL = 100_000
_MAX_CALL_DEPTH = 128

# deep MiniC recursion costs several Python frames per call
sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))

_U64 = 1 << 64
_I64_MIN = -(1 << 63)

Value = int  # runtime values are Python int or bool


def wrap64(v: int) -> int:
    return ((v - _I64_MIN) % _U64) + _I64_MIN


class FaultKind(str, Enum):
    FUEL_EXHAUSTED = "FuelExhausted"
    DIV_BY_ZERO = "DivByZero"
    TYPE_FAULT = "TypeFault"
    UNBOUND_VAR = "UnboundVar"


@dataclass(frozen=True)
class RunOutcome:
    value: int | bool | None
    fault: FaultKind | None
    steps_used: int

    @property
    def ok(self) -> bool:
        return self.fault is None

    def same_result(self, other: "RunOutcome") -> bool:
        """Result equality: identical value, or identical fault kind.
        Step counts are deliberately not compared."""
        if self.fault is not None or other.fault is not None:
            return self.fault == other.fault
        return type(self.value) is type(other.value) and self.value == other.value


class _Fuel(Exception):
    pass


class _Fault(Exception):
    def __init__(self, kind: FaultKind):
        self.kind = kind


class _BreakSig(Exception):
    pass


class _ContinueSig(Exception):
    pass


class _ReturnSig(Exception):
    def __init__(self, value):
        self.value = value


def _is_int(v) -> bool:
    return type(v) is int


def _is_bool(v) -> bool:
    return type(v) is bool


class _Interp:
    def __init__(self, functions: dict[str, n.FunctionDef], fuel: int):
        self.functions = functions
        self.fuel = fuel
        self.steps = 0
        self.depth = 0

    def tick(self):
        if self.steps >= self.fuel:
            raise _Fuel()
        self.steps += 1

    # --- calls ---

    def call(self, fn: n.FunctionDef, args: list):
        if self.depth >= _MAX_CALL_DEPTH:
            # stack budget folds into the fuel budget
            raise _Fuel()
        self.depth += 1
        env = [dict(zip((p.name for p in fn.params), args))]
        try:
            self.exec_block(fn.body, env)
        except _ReturnSig as r:
            value = r.value
            if (fn.return_type == n.INT and not _is_int(value)) or (
                    fn.return_type == n.BOOL and not _is_bool(value)):
                raise _Fault(FaultKind.TYPE_FAULT)
            return value
        finally:
            self.depth -= 1
        # fell off the end without returning a value
        raise _Fault(FaultKind.TYPE_FAULT)

    # --- statements ---

    def exec_block(self, block: n.Block, env: list[dict]):
        self.tick()
        env.append({})
        try:
            for stmt in block.stmts:
                self.exec_stmt(stmt, env)
        finally:
            env.pop()

    def exec_stmt(self, s: n.Stmt, env: list[dict]):
        if isinstance(s, n.Block):
            self.exec_block(s, env)
            return
        self.tick()
        if isinstance(s, n.Decl):
            default = 0 if s.var_type == n.INT else False
            for d in s.declarators:
                value = default if d.init is None else self.eval(d.init, env)
                if (s.var_type == n.INT and not _is_int(value)) or (
                        s.var_type == n.BOOL and not _is_bool(value)):
                    raise _Fault(FaultKind.TYPE_FAULT)
                env[-1][d.name] = value
        elif isinstance(s, n.Assign):
            value = self.eval(s.value, env)
            self.store(s.target.name, value, env)
        elif isinstance(s, n.CompoundAssign):
            old = self.load(s.target.name, env)
            rhs = self.eval(s.value, env)
            value = self.arith(s.op[0], old, rhs)
            self.store(s.target.name, value, env)
        elif isinstance(s, n.IncDec):
            old = self.load(s.target.name, env)
            if not _is_int(old):
                raise _Fault(FaultKind.TYPE_FAULT)
            delta = 1 if s.op == "++" else -1
            self.store(s.target.name, wrap64(old + delta), env)
        elif isinstance(s, n.If):
            if self.truth(s.cond, env):
                self.exec_block(s.then_branch, env)
            elif isinstance(s.else_branch, n.If):
                self.exec_stmt(s.else_branch, env)
            elif s.else_branch is not None:
                self.exec_block(s.else_branch, env)
        elif isinstance(s, n.While):
            while True:
                if not self.truth(s.cond, env):
                    break
                try:
                    self.exec_block(s.body, env)
                except _BreakSig:
                    break
                except _ContinueSig:
                    continue
        elif isinstance(s, n.For):
            env.append({})
            try:
                if s.init is not None:
                    self.exec_stmt(s.init, env)
                while True:
                    if s.cond is not None and not self.truth(s.cond, env):
                        break
                    try:
                        self.exec_block(s.body, env)
                    except _BreakSig:
                        break
                    except _ContinueSig:
                        pass
                    if s.step is not None:
                        self.exec_stmt(s.step, env)
            finally:
                env.pop()
        elif isinstance(s, n.Switch):
            value = self.eval(s.scrutinee, env)
            if not _is_int(value):
                raise _Fault(FaultKind.TYPE_FAULT)
            env.append({})
            try:
                match = None
                for i, case in enumerate(s.cases):
                    if wrap64(case.label) == value:
                        match = i
                        break
                try:
                    if match is not None:
                        for case in s.cases[match:]:  # fallthrough
                            for stmt in case.stmts:
                                self.exec_stmt(stmt, env)
                        if s.default is not None:
                            for stmt in s.default:
                                self.exec_stmt(stmt, env)
                    elif s.default is not None:
                        for stmt in s.default:
                            self.exec_stmt(stmt, env)
                except _BreakSig:
                    pass
            finally:
                env.pop()
        elif isinstance(s, n.Return):
            raise _ReturnSig(self.eval(s.value, env))
        elif isinstance(s, n.Break):
            raise _BreakSig()
        elif isinstance(s, n.Continue):
            raise _ContinueSig()
        elif isinstance(s, n.ExprStmt):
            self.eval(s.expr, env)
        else:
            raise TypeError(f"not a statement node: {type(s).__name__}")

    # --- expressions ---

    def truth(self, cond: n.Expr, env) -> bool:
        value = self.eval(cond, env)
        if not _is_bool(value):
            raise _Fault(FaultKind.TYPE_FAULT)
        return value

    def load(self, name: str, env: list[dict]):
        for scope in reversed(env):
            if name in scope:
                return scope[name]
        raise _Fault(FaultKind.UNBOUND_VAR)

    def store(self, name: str, value, env: list[dict]):
        for scope in reversed(env):
            if name in scope:
                scope[name] = value
                return
        raise _Fault(FaultKind.UNBOUND_VAR)

    def arith(self, op: str, a, b):
        if not (_is_int(a) and _is_int(b)):
            raise _Fault(FaultKind.TYPE_FAULT)
        if op == "+":
            return wrap64(a + b)
        if op == "-":
            return wrap64(a - b)
        if op == "*":
            return wrap64(a * b)
        if b == 0:
            raise _Fault(FaultKind.DIV_BY_ZERO)
        q = abs(a) // abs(b)
        if (a < 0) != (b < 0):
            q = -q
        if op == "/":
            return wrap64(q)
        return wrap64(a - b * q)  # '%': remainder has the dividend's sign

    def eval(self, e: n.Expr, env: list[dict]):
        self.tick()
        if isinstance(e, n.IntLit):
            return wrap64(e.value)
        if isinstance(e, n.BoolLit):
            return e.value
        if isinstance(e, n.Var):
            return self.load(e.name, env)
        if isinstance(e, n.Paren):
            return self.eval(e.inner, env)
        if isinstance(e, n.Unary):
            if e.op in ("++", "--"):
                name = e.operand.name  # Var by construction
                old = self.load(name, env)
                if not _is_int(old):
                    raise _Fault(FaultKind.TYPE_FAULT)
                new = wrap64(old + (1 if e.op == "++" else -1))
                self.store(name, new, env)
                return old if e.postfix else new
            value = self.eval(e.operand, env)
            if e.op == "-":
                if not _is_int(value):
                    raise _Fault(FaultKind.TYPE_FAULT)
                return wrap64(-value)
            if not _is_bool(value):  # '!'
                raise _Fault(FaultKind.TYPE_FAULT)
            return not value
        if isinstance(e, n.Binary):
            op = e.op
            if op == "&&":
                left = self.eval(e.left, env)
                if not _is_bool(left):
                    raise _Fault(FaultKind.TYPE_FAULT)
                if not left:
                    return False
                right = self.eval(e.right, env)
                if not _is_bool(right):
                    raise _Fault(FaultKind.TYPE_FAULT)
                return right
            if op == "||":
                left = self.eval(e.left, env)
                if not _is_bool(left):
                    raise _Fault(FaultKind.TYPE_FAULT)
                if left:
                    return True
                right = self.eval(e.right, env)
                if not _is_bool(right):
                    raise _Fault(FaultKind.TYPE_FAULT)
                return right
            left = self.eval(e.left, env)
            right = self.eval(e.right, env)
            if op in ("+", "-", "*", "/", "%"):
                return self.arith(op, left, right)
            if op in ("<", "<=", ">", ">="):
                if not (_is_int(left) and _is_int(right)):
                    raise _Fault(FaultKind.TYPE_FAULT)
                return {"<": left < right, "<=": left <= right,
                        ">": left > right, ">=": left >= right}[op]
            if op in ("==", "!="):
                if type(left) is not type(right):
                    raise _Fault(FaultKind.TYPE_FAULT)
                return (left == right) if op == "==" else (left != right)
            raise TypeError(f"unknown binary operator {op!r}")
        if isinstance(e, n.Ternary):
            return self.eval(e.if_true if self.truth(e.cond, env) else e.if_false, env)
        if isinstance(e, n.Call):
            fn = self.functions.get(e.name)
            if fn is None:
                raise _Fault(FaultKind.UNBOUND_VAR)
            if len(e.args) != len(fn.params):
                raise _Fault(FaultKind.TYPE_FAULT)
            args = [self.eval(a, env) for a in e.args]
            for value, p in zip(args, fn.params):
                if (p.var_type == n.INT and not _is_int(value)) or (
                        p.var_type == n.BOOL and not _is_bool(value)):
                    raise _Fault(FaultKind.TYPE_FAULT)
            return self.call(fn, args)
        raise TypeError(f"not an expression node: {type(e).__name__}")


def interpret(unit: n.SourceUnit, entry: str = n.DEFAULT_ENTRY,
              args: tuple | list = (), fuel: int = DEFAULT_FUEL) -> RunOutcome:
    """Run `entry` with `args` under a step budget. Pure: identical inputs
    produce identical outcomes."""
    functions = {}
    for fn in unit.functions:
        functions[fn.name] = fn
    target = functions.get(entry)
    if target is None:
        raise InterpreterUsageError(f"no function named {entry!r}")
    if len(args) != len(target.params):
        raise InterpreterUsageError(
            f"{entry!r} takes {len(target.params)} argument(s), got {len(args)}")
    coerced = []
    for value, p in zip(args, target.params):
        if p.var_type == n.INT:
            if not _is_int(value):
                raise InterpreterUsageError(f"argument {p.name!r} must be int")
            coerced.append(wrap64(value))
        else:
            if not _is_bool(value):
                raise InterpreterUsageError(f"argument {p.name!r} must be bool")
            coerced.append(value)

    interp = _Interp(functions, fuel)
    try:
        value = interp.call(target, coerced)
        return RunOutcome(value, None, interp.steps)
    except _Fault as f:
        return RunOutcome(None, f.kind, interp.steps)
    except _Fuel:
        return RunOutcome(None, FaultKind.FUEL_EXHAUSTED, interp.fuel)
