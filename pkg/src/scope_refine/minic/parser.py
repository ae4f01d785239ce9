"""Recursive-descent parser producing renumbered MiniC ASTs.

Bodies of if/while/for are normalized to Block nodes so the canonical printer
can always emit braces; a braceless source statement parses to a one-element
block. Switch defaults must come last (fallthrough across a non-final default
is out of the language).
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ParseError
from . import nodes as n
from .lexer import EOF, IDENT, INT_LIT, Token, lex

_TYPE_KEYWORDS = ("int", "bool")
_COMPOUND_OPS = ("+=", "-=", "*=", "/=", "%=")

# binary precedence levels, loosest first; all left-associative
_BIN_LEVELS = (
    ("||",),
    ("&&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("+", "-"),
    ("*", "/", "%"),
)

_MAX_EXPR_DEPTH = 120
_MAX_STMT_DEPTH = 80


@dataclass(frozen=True)
class SourceText:
    text: str
    origin: str | None = None


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.expr_depth = 0
        self.stmt_depth = 0

    # --- token plumbing ---

    def peek(self, ahead: int = 0) -> Token:
        i = min(self.pos + ahead, len(self.tokens) - 1)
        return self.tokens[i]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != EOF:
            self.pos += 1
        return tok

    def at(self, *kinds: str) -> bool:
        return self.peek().kind in kinds

    def expect(self, kind: str, what: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            want = what or f"'{kind}'"
            raise ParseError(tok.line, tok.col, f"expected {want}", frozenset({kind}))
        return self.advance()

    def fail(self, message: str, expected: frozenset[str] = frozenset()):
        tok = self.peek()
        raise ParseError(tok.line, tok.col, message, expected)

    # --- program structure ---

    def parse_unit(self) -> n.SourceUnit:
        functions = []
        first = self.peek()
        if first.kind == EOF:
            self.fail("expected a function definition")
        while not self.at(EOF):
            functions.append(self.parse_function())
        unit = n.SourceUnit(functions, pos=(first.line, first.col))
        return n.renumber(unit)

    def parse_function(self) -> n.FunctionDef:
        start = self.peek()
        ret = self.parse_type()
        name = self.expect(IDENT, "function name").text
        self.expect("(")
        params: list[n.Param] = []
        if not self.at(")"):
            while True:
                ptok = self.peek()
                ptype = self.parse_type()
                pname = self.expect(IDENT, "parameter name").text
                params.append(n.Param(ptype, pname, pos=(ptok.line, ptok.col)))
                if self.at(","):
                    self.advance()
                    continue
                break
        self.expect(")")
        body = self.parse_block()
        return n.FunctionDef(name, params, ret, body, pos=(start.line, start.col))

    def parse_type(self) -> str:
        tok = self.peek()
        if tok.kind not in _TYPE_KEYWORDS:
            self.fail("expected type ('int' or 'bool')", frozenset(_TYPE_KEYWORDS))
        self.advance()
        return tok.kind

    # --- statements ---

    def parse_block(self) -> n.Block:
        start = self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.at(EOF):
                self.fail("expected '}'", frozenset({"}"}))
            stmts.append(self.parse_stmt())
        self.expect("}")
        return n.Block(stmts, pos=(start.line, start.col))

    def parse_stmt(self) -> n.Stmt:
        self.stmt_depth += 1
        if self.stmt_depth > _MAX_STMT_DEPTH:
            self.fail("statement nesting too deep")
        try:
            return self._parse_stmt_inner()
        finally:
            self.stmt_depth -= 1

    def _parse_stmt_inner(self) -> n.Stmt:
        tok = self.peek()
        kind = tok.kind
        if kind in _TYPE_KEYWORDS:
            stmt = self.parse_decl_core()
            self.expect(";")
            return stmt
        if kind == "{":
            return self.parse_block()
        if kind == "if":
            return self.parse_if()
        if kind == "while":
            return self.parse_while()
        if kind == "for":
            return self.parse_for()
        if kind == "switch":
            return self.parse_switch()
        if kind == "return":
            self.advance()
            value = self.parse_expr()
            self.expect(";")
            return n.Return(value, pos=(tok.line, tok.col))
        if kind == "break":
            self.advance()
            self.expect(";")
            return n.Break(pos=(tok.line, tok.col))
        if kind == "continue":
            self.advance()
            self.expect(";")
            return n.Continue(pos=(tok.line, tok.col))
        stmt = self.parse_simple_stmt()
        self.expect(";")
        return stmt

    def parse_decl_core(self) -> n.Decl:
        tok = self.peek()
        var_type = self.parse_type()
        declarators = []
        while True:
            dtok = self.peek()
            name = self.expect(IDENT, "variable name").text
            init = None
            if self.at("="):
                self.advance()
                init = self.parse_expr()
            declarators.append(n.Declarator(name, init, pos=(dtok.line, dtok.col)))
            if self.at(","):
                self.advance()
                continue
            break
        return n.Decl(var_type, declarators, pos=(tok.line, tok.col))

    def parse_simple_stmt(self) -> n.Stmt:
        """Assignment, compound assignment, statement inc/dec, or an
        expression statement. Used for plain statements and for() slots."""
        tok = self.peek()
        if tok.kind == IDENT:
            nxt = self.peek(1).kind
            if nxt == "=":
                target = n.Var(self.advance().text, pos=(tok.line, tok.col))
                self.advance()
                value = self.parse_expr()
                return n.Assign(target, value, pos=(tok.line, tok.col))
            if nxt in _COMPOUND_OPS:
                target = n.Var(self.advance().text, pos=(tok.line, tok.col))
                op = self.advance().kind
                value = self.parse_expr()
                return n.CompoundAssign(target, op, value, pos=(tok.line, tok.col))
            if nxt in ("++", "--") and self.peek(2).kind in (";", ")"):
                target = n.Var(self.advance().text, pos=(tok.line, tok.col))
                op = self.advance().kind
                return n.IncDec(target, op, pos=(tok.line, tok.col))
        expr = self.parse_expr()
        return n.ExprStmt(expr, pos=(tok.line, tok.col))

    def parse_body(self) -> n.Block:
        """Loop or branch body: a block, or a single statement wrapped in one."""
        if self.at("{"):
            return self.parse_block()
        tok = self.peek()
        stmt = self.parse_stmt()
        return n.Block([stmt], pos=(tok.line, tok.col))

    def parse_if(self) -> n.If:
        tok = self.expect("if")
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        then_branch = self.parse_body()
        else_branch: n.Block | n.If | None = None
        if self.at("else"):
            self.advance()
            if self.at("if"):
                else_branch = self.parse_if()
            else:
                else_branch = self.parse_body()
        return n.If(cond, then_branch, else_branch, pos=(tok.line, tok.col))

    def parse_while(self) -> n.While:
        tok = self.expect("while")
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        body = self.parse_body()
        return n.While(cond, body, pos=(tok.line, tok.col))

    def parse_for(self) -> n.For:
        tok = self.expect("for")
        self.expect("(")
        init: n.Stmt | None = None
        if not self.at(";"):
            if self.peek().kind in _TYPE_KEYWORDS:
                init = self.parse_decl_core()
            else:
                init = self.parse_simple_stmt()
        self.expect(";")
        cond = None if self.at(";") else self.parse_expr()
        self.expect(";")
        step: n.Stmt | None = None
        if not self.at(")"):
            step = self.parse_simple_stmt()
        self.expect(")")
        body = self.parse_body()
        return n.For(init, cond, step, body, pos=(tok.line, tok.col))

    def parse_switch(self) -> n.Switch:
        tok = self.expect("switch")
        self.expect("(")
        scrutinee = self.parse_expr()
        self.expect(")")
        self.expect("{")
        cases: list[n.Case] = []
        default: list[n.Stmt] | None = None
        while not self.at("}"):
            if self.at("case"):
                if default is not None:
                    self.fail("default must be the last switch clause")
                ctok = self.advance()
                label = self.parse_case_label()
                self.expect(":")
                cases.append(n.Case(label, self.parse_case_stmts(), pos=(ctok.line, ctok.col)))
            elif self.at("default"):
                if default is not None:
                    self.fail("duplicate default clause")
                self.advance()
                self.expect(":")
                default = self.parse_case_stmts()
            else:
                self.fail("expected 'case', 'default' or '}'", frozenset({"case", "default", "}"}))
        self.expect("}")
        return n.Switch(scrutinee, cases, default, pos=(tok.line, tok.col))

    def parse_case_label(self) -> int:
        neg = False
        if self.at("-"):
            self.advance()
            neg = True
        tok = self.expect(INT_LIT, "integer case label")
        value = int(tok.text)
        return -value if neg else value

    def parse_case_stmts(self) -> list[n.Stmt]:
        stmts = []
        while not self.at("case", "default", "}"):
            if self.at(EOF):
                self.fail("expected '}'", frozenset({"}"}))
            stmts.append(self.parse_stmt())
        return stmts

    # --- expressions ---

    def parse_expr(self) -> n.Expr:
        self.expr_depth += 1
        if self.expr_depth > _MAX_EXPR_DEPTH:
            self.fail("expression nesting too deep")
        try:
            return self.parse_ternary()
        finally:
            self.expr_depth -= 1

    def parse_ternary(self) -> n.Expr:
        cond = self.parse_binary(0)
        if self.at("?"):
            tok = self.advance()
            if_true = self.parse_ternary()
            self.expect(":")
            if_false = self.parse_ternary()
            return n.Ternary(cond, if_true, if_false, pos=(tok.line, tok.col))
        return cond

    def parse_binary(self, level: int) -> n.Expr:
        if level >= len(_BIN_LEVELS):
            return self.parse_unary()
        ops = _BIN_LEVELS[level]
        left = self.parse_binary(level + 1)
        while self.peek().kind in ops:
            tok = self.advance()
            right = self.parse_binary(level + 1)
            left = n.Binary(tok.kind, left, right, pos=(tok.line, tok.col))
        return left

    def parse_unary(self) -> n.Expr:
        tok = self.peek()
        if tok.kind in ("-", "!"):
            self.advance()
            operand = self.parse_unary()
            return n.Unary(tok.kind, operand, pos=(tok.line, tok.col))
        if tok.kind in ("++", "--"):
            self.advance()
            operand = self.parse_unary()
            if not isinstance(operand, n.Var):
                raise ParseError(tok.line, tok.col, f"'{tok.kind}' target must be a variable")
            return n.Unary(tok.kind, operand, pos=(tok.line, tok.col))
        return self.parse_postfix()

    def parse_postfix(self) -> n.Expr:
        expr = self.parse_primary()
        while self.at("++", "--"):
            tok = self.advance()
            if not isinstance(expr, n.Var):
                raise ParseError(tok.line, tok.col, f"'{tok.kind}' target must be a variable")
            expr = n.Unary(tok.kind, expr, postfix=True, pos=(tok.line, tok.col))
        return expr

    def parse_primary(self) -> n.Expr:
        tok = self.peek()
        if tok.kind == INT_LIT:
            self.advance()
            return n.IntLit(int(tok.text), pos=(tok.line, tok.col))
        if tok.kind in ("true", "false"):
            self.advance()
            return n.BoolLit(tok.kind == "true", pos=(tok.line, tok.col))
        if tok.kind == IDENT:
            self.advance()
            if self.at("("):
                self.advance()
                args = []
                if not self.at(")"):
                    while True:
                        args.append(self.parse_expr())
                        if self.at(","):
                            self.advance()
                            continue
                        break
                self.expect(")")
                return n.Call(tok.text, args, pos=(tok.line, tok.col))
            return n.Var(tok.text, pos=(tok.line, tok.col))
        if tok.kind == "(":
            self.advance()
            inner = self.parse_expr()
            self.expect(")")
            return n.Paren(inner, pos=(tok.line, tok.col))
        self.fail("expected expression")
        raise AssertionError("unreachable")


def parse(src: SourceText | str) -> n.SourceUnit:
    """Parse MiniC source into a renumbered SourceUnit.

    Raises LexError on illegal characters and ParseError on syntax errors,
    both carrying 1-based line/column positions.
    """
    text = src.text if isinstance(src, SourceText) else src
    if not text.strip():
        raise ParseError(1, 1, "empty source")
    return _Parser(lex(text)).parse_unit()
