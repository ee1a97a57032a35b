"""Recursive-descent parser for spec files, programs and formulas.

The grammar is documented in ``docs/format.md``.  Every rejection raises
:class:`~ptw.errors.ParseError` carrying a 1-based line and column.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from ptw.errors import ParseError, ScopeError
from ptw.syntax import (
    ARITH_OPS, CMP_OPS, FALSE, TRUE, And, Assign, BinOp, BVar, Cmp, Const,
    Diverge, Expr, Formula, If, Implies, Neg, Not, Notion, Or, Quant, Seq,
    Skip, Stmt, Triple, Var, VarDecl, While,
)

KEYWORDS = {
    "var", "program", "check", "query", "park", "variant", "backward_variant",
    "decompose", "while", "if", "else", "diverge", "skip", "true", "false",
    "forall", "exists", "in", "bool", "int", "expect",
}

TRANSFORMERS = ("wp", "wlp", "sp", "slp")

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*|\#[^\n]*)
  | (?P<int>\d+)
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym>:=|==|!=|<=|>=|->|&&|\|\||\.\.|[<>!+\-*%(){}\[\];:])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # ID, INT, KW, SYM, EOF
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        col = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "int":
            tokens.append(Token("INT", m.group(), line, col))
        elif kind == "id":
            word = m.group()
            tokens.append(Token("KW" if word in KEYWORDS else "ID", word, line, col))
        elif kind == "sym":
            tokens.append(Token("SYM", m.group(), line, col))
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


# -- spec-file values ------------------------------------------------------

@dataclass(frozen=True)
class CheckDirective:
    triple: Triple
    program_name: str
    expect: Optional[bool] = None
    line: int = 0


@dataclass(frozen=True)
class QueryDirective:
    transformer: str
    program_name: str
    program: Stmt
    argument: Formula
    line: int = 0


@dataclass(frozen=True)
class ParkDirective:
    program_name: str
    loop: While
    transformer: str  # wlp | slp
    invariant: Formula
    argument: Formula
    expect: Optional[bool] = None
    line: int = 0


@dataclass(frozen=True)
class VariantDirective:
    program_name: str
    loop: While
    variant: Expr
    backward: bool = False
    expect: Optional[bool] = None
    line: int = 0


@dataclass(frozen=True)
class DecomposeDirective:
    kind: str  # correctness | incorrectness
    program_name: str
    pre: Formula
    program: Stmt
    post: Formula
    expect: Optional[bool] = None
    line: int = 0


Directive = Union[CheckDirective, QueryDirective, ParkDirective, VariantDirective, DecomposeDirective]


@dataclass
class SpecFile:
    decls: list[VarDecl] = field(default_factory=list)
    programs: dict[str, Stmt] = field(default_factory=dict)
    directives: list[Directive] = field(default_factory=list)


# -- parser ----------------------------------------------------------------

class Parser:
    def __init__(self, text: str, decls: Optional[list[VarDecl]] = None):
        self.tokens = tokenize(text)
        self.pos = 0
        # None disables scope checking (standalone formula parsing)
        self.decls: Optional[dict[str, VarDecl]] = (
            None if decls is None else {d.name: d for d in decls})
        self.bound: list[str] = []
        self.spec = SpecFile(decls=list(decls or []))

    # token helpers
    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def error(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        raise ParseError(message, tok.line, tok.col)

    def at(self, *texts: str) -> bool:
        return self.tok.kind in ("SYM", "KW") and self.tok.text in texts

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            self.error(f"expected '{text}', found '{found}'")
        tok = self.tok
        self.pos += 1
        return tok

    def ident(self) -> Token:
        if self.tok.kind != "ID":
            found = self.tok.text or "end of input"
            self.error(f"expected identifier, found '{found}'")
        tok = self.tok
        self.pos += 1
        return tok

    def signed_int(self) -> int:
        neg = self.accept("-")
        if self.tok.kind != "INT":
            self.error("expected integer literal")
        value = int(self.tok.text)
        self.pos += 1
        return -value if neg else value

    def finish(self):
        if self.tok.kind != "EOF":
            self.error(f"unexpected '{self.tok.text}'")

    # scope helpers
    def check_var(self, tok: Token) -> None:
        name = tok.text
        if name in self.bound or self.decls is None:
            return
        if name not in self.decls:
            self.error(f"undeclared variable '{name}'", tok)

    def check_target(self, tok: Token) -> None:
        if self.decls is None:
            return
        if tok.text in self.bound or tok.text not in self.decls:
            self.error(f"assignment to undeclared variable '{tok.text}'", tok)

    # expressions
    def parse_expr(self) -> Expr:
        left = self.parse_term()
        while self.at("+", "-"):
            op = self.tok.text
            self.pos += 1
            left = BinOp(op, left, self.parse_term())
        return left

    def parse_term(self) -> Expr:
        left = self.parse_unary_expr()
        while self.at("*", "%"):
            op = self.tok.text
            self.pos += 1
            left = BinOp(op, left, self.parse_unary_expr())
        return left

    def parse_unary_expr(self) -> Expr:
        if self.accept("-"):
            if self.tok.kind == "INT":
                value = int(self.tok.text)
                self.pos += 1
                return Const(-value)
            return Neg(self.parse_unary_expr())
        return self.parse_expr_atom()

    def parse_expr_atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "INT":
            self.pos += 1
            return Const(int(tok.text))
        if tok.kind == "ID":
            self.pos += 1
            self.check_var(tok)
            return Var(tok.text)
        if self.accept("("):
            e = self.parse_expr()
            self.expect(")")
            return e
        self.error(f"expected expression, found '{tok.text or 'end of input'}'")

    # formulas
    def parse_formula(self) -> Formula:
        if self.at("forall", "exists"):
            return self.parse_quant()
        left = self.parse_or()
        if self.accept("->"):
            return Implies(left, self.parse_formula())
        return left

    def parse_quant(self) -> Formula:
        kind = self.tok.text
        self.pos += 1
        tok = self.ident()
        name = tok.text
        if name in self.bound or (self.decls is not None and name in self.decls):
            self.error(f"bound variable '{name}' shadows an existing name", tok)
        self.expect("in")
        lo = self.signed_int()
        self.expect("..")
        hi = self.signed_int()
        if lo > hi:
            self.error(f"empty quantifier range {lo}..{hi}", tok)
        self.expect(":")
        self.bound.append(name)
        try:
            body = self.parse_formula()
        finally:
            self.bound.pop()
        return Quant(kind, name, lo, hi, body)

    def parse_or(self) -> Formula:
        left = self.parse_and()
        while self.accept("||"):
            left = Or(left, self.parse_and())
        return left

    def parse_and(self) -> Formula:
        left = self.parse_unary()
        while self.accept("&&"):
            left = And(left, self.parse_unary())
        return left

    def parse_unary(self) -> Formula:
        if self.accept("!"):
            return Not(self.parse_unary())
        if self.at("forall", "exists"):
            return self.parse_quant()
        return self.parse_atom()

    def parse_atom(self) -> Formula:
        if self.accept("true"):
            return TRUE
        if self.accept("false"):
            return FALSE
        if self.at("("):
            start = self.pos
            bound = list(self.bound)
            try:
                self.pos += 1
                f = self.parse_formula()
                self.expect(")")
                if not (self.at(*CMP_OPS) or self.at(*ARITH_OPS)):
                    return f
            except ParseError:
                pass
            # "(x + 1) == 2": the parenthesis belonged to an expression
            self.pos = start
            self.bound = bound
        tok = self.tok
        left = self.parse_expr()
        if self.at(*CMP_OPS):
            op = self.tok.text
            self.pos += 1
            return Cmp(op, left, self.parse_expr())
        if isinstance(left, Var):
            name = left.name
            if self.decls is not None and name not in self.bound and not self.decls[name].is_bool:
                self.error(f"integer variable '{name}' used as a predicate", tok)
            return BVar(name)
        self.error("expected comparison operator")

    # statements
    def parse_stmt(self) -> Stmt:
        parts = [self.parse_simple_stmt()]
        while self.accept(";"):
            if self.at("}") or self.tok.kind == "EOF":
                break
            parts.append(self.parse_simple_stmt())
        out = parts[-1]
        for s in reversed(parts[:-1]):
            out = Seq(s, out)
        return out

    def parse_block(self) -> Stmt:
        self.expect("{")
        body = self.parse_stmt()
        self.expect("}")
        return body

    def parse_simple_stmt(self) -> Stmt:
        tok = self.tok
        if self.accept("diverge"):
            return Diverge()
        if self.accept("skip"):
            return Skip()
        if self.accept("if"):
            self.expect("(")
            guard = self.parse_guard()
            self.expect(")")
            then = self.parse_block()
            self.expect("else")
            return If(guard, then, self.parse_block())
        if self.accept("while"):
            self.expect("(")
            guard = self.parse_guard()
            self.expect(")")
            return While(guard, self.parse_block())
        if tok.kind == "ID":
            self.pos += 1
            self.check_target(tok)
            self.expect(":=")
            return Assign(tok.text, self.parse_expr())
        self.error(f"expected statement, found '{tok.text or 'end of input'}'")

    def parse_guard(self) -> Formula:
        tok = self.tok
        g = self.parse_formula()
        if _has_quantifier(g):
            self.error("guards must be quantifier-free", tok)
        return g

    # spec files
    def parse_file(self) -> SpecFile:
        if self.decls is None:
            self.decls = {}
        while self.tok.kind != "EOF":
            if self.at("var"):
                self.parse_decl()
            elif self.at("program"):
                self.parse_program_def()
            else:
                self.parse_directive()
        return self.spec

    def parse_decl(self) -> None:
        self.expect("var")
        tok = self.ident()
        if tok.text in self.decls:
            self.error(f"duplicate variable '{tok.text}'", tok)
        self.expect(":")
        if self.accept("bool"):
            decl = VarDecl.boolean(tok.text)
        else:
            self.expect("int")
            self.expect("[")
            lo = self.signed_int()
            self.expect("..")
            hi = self.signed_int()
            self.expect("]")
            if lo > hi:
                self.error(f"empty domain [{lo}..{hi}]", tok)
            decl = VarDecl.interval(tok.text, lo, hi)
        self.expect(";")
        self.decls[decl.name] = decl
        self.spec.decls.append(decl)

    def parse_program_def(self) -> None:
        self.expect("program")
        tok = self.ident()
        if tok.text in self.spec.programs:
            self.error(f"duplicate program '{tok.text}'", tok)
        body = self.parse_block()
        if any(isinstance(s, Skip) for s in _walk(body)) and not self.spec.decls:
            self.error("'skip' needs at least one declared variable", tok)
        self.spec.programs[tok.text] = body

    def program_ref(self) -> tuple[str, Stmt]:
        tok = self.ident()
        if tok.text not in self.spec.programs:
            self.error(f"undefined program '{tok.text}'", tok)
        return tok.text, self.spec.programs[tok.text]

    def loop_ref(self) -> tuple[str, While]:
        tok = self.tok
        name, prog = self.program_ref()
        if not isinstance(prog, While):
            self.error(f"program '{name}' must be a single while loop", tok)
        return name, prog

    def delimited_formula(self, brackets_ok: bool) -> tuple[Formula, str]:
        if brackets_ok and self.at("["):
            self.pos += 1
            f = self.parse_formula()
            self.expect("]")
            return f, "["
        self.expect("{")
        f = self.parse_formula()
        self.expect("}")
        return f, "{"

    def parse_expectation(self) -> Optional[bool]:
        if not self.accept("expect"):
            return None
        tok = self.ident()
        if tok.text not in ("valid", "invalid"):
            self.error("expected 'valid' or 'invalid'", tok)
        return tok.text == "valid"

    def parse_directive(self) -> None:
        tok = self.tok
        if self.accept("check"):
            nt = self.ident()
            try:
                notion = Notion(nt.text)
            except ValueError:
                self.error(f"unknown notion '{nt.text}'", nt)
            brackets = not notion.is_correctness
            pre, _ = self.delimited_formula(brackets)
            name, prog = self.program_ref()
            post, _ = self.delimited_formula(brackets)
            expect = self.parse_expectation()
            self.expect(";")
            self.spec.directives.append(
                CheckDirective(Triple(pre, prog, post, notion), name, expect, tok.line))
        elif self.accept("query"):
            tt = self.ident()
            if tt.text not in TRANSFORMERS:
                self.error(f"unknown transformer '{tt.text}'", tt)
            name, prog = self.program_ref()
            arg, _ = self.delimited_formula(False)
            self.expect(";")
            self.spec.directives.append(QueryDirective(tt.text, name, prog, arg, tok.line))
        elif self.accept("park"):
            name, loop = self.loop_ref()
            tt = self.ident()
            if tt.text not in ("wlp", "slp"):
                self.error("park needs transformer 'wlp' or 'slp'", tt)
            inv, _ = self.delimited_formula(False)
            arg, _ = self.delimited_formula(False)
            expect = self.parse_expectation()
            self.expect(";")
            self.spec.directives.append(
                ParkDirective(name, loop, tt.text, inv, arg, expect, tok.line))
        elif self.at("variant", "backward_variant"):
            backward = self.tok.text == "backward_variant"
            self.pos += 1
            name, loop = self.loop_ref()
            v = self.parse_expr()
            expect = self.parse_expectation()
            self.expect(";")
            self.spec.directives.append(
                VariantDirective(name, loop, v, backward, expect, tok.line))
        elif self.accept("decompose"):
            kt = self.ident()
            if kt.text not in ("correctness", "incorrectness"):
                self.error("expected 'correctness' or 'incorrectness'", kt)
            brackets = kt.text == "incorrectness"
            pre, _ = self.delimited_formula(brackets)
            name, prog = self.program_ref()
            post, _ = self.delimited_formula(brackets)
            expect = self.parse_expectation()
            self.expect(";")
            self.spec.directives.append(
                DecomposeDirective(kt.text, name, pre, prog, post, expect, tok.line))
        else:
            self.error(f"expected declaration, program or directive, found '{tok.text}'")


def _walk(s: Stmt):
    yield s
    if isinstance(s, Seq):
        yield from _walk(s.first)
        yield from _walk(s.second)
    elif isinstance(s, If):
        yield from _walk(s.then)
        yield from _walk(s.orelse)
    elif isinstance(s, While):
        yield from _walk(s.body)


def _has_quantifier(f: Formula) -> bool:
    if isinstance(f, Quant):
        return True
    if isinstance(f, Not):
        return _has_quantifier(f.operand)
    if isinstance(f, (And, Or, Implies)):
        return _has_quantifier(f.left) or _has_quantifier(f.right)
    return False


# -- entry points ----------------------------------------------------------

def parse_spec(text: str) -> SpecFile:
    return Parser(text).parse_file()


def parse_formula(text: str, decls: Optional[list[VarDecl]] = None) -> Formula:
    p = Parser(text, decls)
    f = p.parse_formula()
    p.finish()
    return f


def parse_expr(text: str, decls: Optional[list[VarDecl]] = None) -> Expr:
    p = Parser(text, decls)
    e = p.parse_expr()
    p.finish()
    return e


def parse_program(text: str, decls: Optional[list[VarDecl]] = None) -> Stmt:
    p = Parser(text, decls)
    s = p.parse_stmt()
    p.finish()
    return s


def load_spec(path: str) -> SpecFile:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read())


__all__ = [
    "CheckDirective", "DecomposeDirective", "Directive", "ParkDirective",
    "Parser", "QueryDirective", "ScopeError", "SpecFile", "Token",
    "VariantDirective", "load_spec", "parse_expr", "parse_formula",
    "parse_program", "parse_spec", "tokenize",
]
