"""Abstract syntax for the while-language, its expressions and predicates.

All nodes are frozen dataclasses, so trees are hashable values that can be
shared freely.  ``show_*`` functions print the concrete syntax accepted by
:mod:`ptw.parser`; printing and re-parsing yields a structurally equal tree.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Union

from ptw.errors import ScopeError


# -- declarations ----------------------------------------------------------

@dataclass(frozen=True)
class VarDecl:
    name: str
    lo: int
    hi: int
    is_bool: bool = False

    def __post_init__(self):
        if self.lo > self.hi:
            raise ScopeError(f"empty domain for '{self.name}': [{self.lo}..{self.hi}]")

    @classmethod
    def boolean(cls, name: str) -> "VarDecl":
        return cls(name, 0, 1, True)

    @classmethod
    def interval(cls, name: str, lo: int, hi: int) -> "VarDecl":
        return cls(name, lo, hi, False)

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1

    def show(self) -> str:
        if self.is_bool:
            return f"var {self.name} : bool;"
        return f"var {self.name} : int[{self.lo}..{self.hi}];"


# -- expressions -----------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * %
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


Expr = Union[Const, Var, BinOp, Neg]

ARITH_OPS = ("+", "-", "*", "%")


# -- formulas --------------------------------------------------------------

@dataclass(frozen=True)
class BoolConst:
    value: bool


TRUE = BoolConst(True)
FALSE = BoolConst(False)


@dataclass(frozen=True)
class BVar:
    """A variable used as a predicate; holds iff its value is nonzero."""
    name: str


@dataclass(frozen=True)
class Cmp:
    op: str  # one of == != < <= > >=
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Not:
    operand: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Quant:
    kind: str  # "forall" | "exists"
    var: str
    lo: int
    hi: int
    body: "Formula"


Formula = Union[BoolConst, BVar, Cmp, Not, And, Or, Implies, Quant]

CMP_OPS = ("==", "!=", "<", "<=", ">", ">=")
NEGATED_CMP = {"==": "!=", "!=": "==", "<": ">=", ">=": "<", ">": "<=", "<=": ">"}


def conj(*fs: Formula) -> Formula:
    if not fs:
        return TRUE
    out = fs[0]
    for f in fs[1:]:
        out = And(out, f)
    return out


def disj(*fs: Formula) -> Formula:
    if not fs:
        return FALSE
    out = fs[0]
    for f in fs[1:]:
        out = Or(out, f)
    return out


# -- statements ------------------------------------------------------------

@dataclass(frozen=True)
class Diverge:
    pass


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Assign:
    var: str
    expr: Expr


@dataclass(frozen=True)
class Seq:
    first: "Stmt"
    second: "Stmt"


@dataclass(frozen=True)
class If:
    guard: Formula
    then: "Stmt"
    orelse: "Stmt"


@dataclass(frozen=True)
class While:
    guard: Formula
    body: "Stmt"


Stmt = Union[Diverge, Skip, Assign, Seq, If, While]
Program = Stmt


def seq(*stmts: Stmt) -> Stmt:
    """Right-nested sequence, the shape the parser produces."""
    if not stmts:
        raise ValueError("seq() needs at least one statement")
    out = stmts[-1]
    for s in reversed(stmts[:-1]):
        out = Seq(s, out)
    return out


class Notion(str, Enum):
    TOTAL_CORRECTNESS = "total_correctness"
    PARTIAL_CORRECTNESS = "partial_correctness"
    TOTAL_INCORRECTNESS = "total_incorrectness"
    PARTIAL_INCORRECTNESS = "partial_incorrectness"

    @property
    def is_correctness(self) -> bool:
        return self in (Notion.TOTAL_CORRECTNESS, Notion.PARTIAL_CORRECTNESS)

    @property
    def transformer(self) -> str:
        return {
            Notion.TOTAL_CORRECTNESS: "wp",
            Notion.PARTIAL_CORRECTNESS: "wlp",
            Notion.TOTAL_INCORRECTNESS: "sp",
            Notion.PARTIAL_INCORRECTNESS: "slp",
        }[self]


@dataclass(frozen=True)
class Triple:
    pre: Formula
    program: Stmt
    post: Formula
    notion: Notion


# -- traversals ------------------------------------------------------------

def expr_vars(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Const):
        return set()
    if isinstance(e, Neg):
        return expr_vars(e.operand)
    return expr_vars(e.left) | expr_vars(e.right)


def free_vars(f: Formula) -> set[str]:
    """Identifiers occurring unbound in ``f``."""
    if isinstance(f, BoolConst):
        return set()
    if isinstance(f, BVar):
        return {f.name}
    if isinstance(f, Cmp):
        return expr_vars(f.left) | expr_vars(f.right)
    if isinstance(f, Not):
        return free_vars(f.operand)
    if isinstance(f, (And, Or, Implies)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, Quant):
        return free_vars(f.body) - {f.var}
    raise TypeError(f"not a formula: {f!r}")


def all_names(f: Formula) -> set[str]:
    """Free and bound identifiers of ``f``; used to pick fresh names."""
    if isinstance(f, Quant):
        return all_names(f.body) | {f.var}
    if isinstance(f, Not):
        return all_names(f.operand)
    if isinstance(f, (And, Or, Implies)):
        return all_names(f.left) | all_names(f.right)
    return free_vars(f)


def fresh_name(base: str, avoid: set[str]) -> str:
    if base not in avoid:
        return base
    i = 1
    while f"{base}_{i}" in avoid:
        i += 1
    return f"{base}_{i}"


def formula_size(f: Formula) -> int:
    if isinstance(f, (BoolConst, BVar)):
        return 1
    if isinstance(f, Cmp):
        return 1 + _expr_size(f.left) + _expr_size(f.right)
    if isinstance(f, Not):
        return 1 + formula_size(f.operand)
    if isinstance(f, Quant):
        return 1 + formula_size(f.body)
    return 1 + formula_size(f.left) + formula_size(f.right)


def _expr_size(e: Expr) -> int:
    if isinstance(e, (Const, Var)):
        return 1
    if isinstance(e, Neg):
        return 1 + _expr_size(e.operand)
    return 1 + _expr_size(e.left) + _expr_size(e.right)


def stmt_vars(s: Stmt) -> set[str]:
    if isinstance(s, (Diverge, Skip)):
        return set()
    if isinstance(s, Assign):
        return {s.var} | expr_vars(s.expr)
    if isinstance(s, Seq):
        return stmt_vars(s.first) | stmt_vars(s.second)
    if isinstance(s, If):
        return free_vars(s.guard) | stmt_vars(s.then) | stmt_vars(s.orelse)
    return free_vars(s.guard) | stmt_vars(s.body)


def statements(s: Stmt) -> Iterator[Stmt]:
    """Pre-order walk over the non-sequence statements of ``s``."""
    if isinstance(s, Seq):
        yield from statements(s.first)
        yield from statements(s.second)
        return
    yield s
    if isinstance(s, If):
        yield from statements(s.then)
        yield from statements(s.orelse)
    elif isinstance(s, While):
        yield from statements(s.body)


def desugar(s: Stmt, decls: list[VarDecl] | tuple[VarDecl, ...]) -> Stmt:
    """Replace every ``skip`` with a self-assignment of the first declared variable."""
    if isinstance(s, Skip):
        if not decls:
            raise ScopeError("'skip' needs at least one declared variable")
        name = decls[0].name
        return Assign(name, Var(name))
    if isinstance(s, Seq):
        return Seq(desugar(s.first, decls), desugar(s.second, decls))
    if isinstance(s, If):
        return If(s.guard, desugar(s.then, decls), desugar(s.orelse, decls))
    if isinstance(s, While):
        return While(s.guard, desugar(s.body, decls))
    return s


# -- pretty printing -------------------------------------------------------

_EXPR_PREC = {"+": 1, "-": 1, "*": 2, "%": 2}


def _expr_prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _EXPR_PREC[e.op]
    if isinstance(e, Neg) or (isinstance(e, Const) and e.value < 0):
        return 3
    return 4


def show_expr(e: Expr, ctx: int = 0) -> str:
    if isinstance(e, Const):
        text = str(e.value)
    elif isinstance(e, Var):
        text = e.name
    elif isinstance(e, Neg):
        inner = e.operand
        # "-3" would re-parse as a negative literal
        if isinstance(inner, Const) and inner.value >= 0:
            text = f"-({inner.value})"
        else:
            text = "-" + show_expr(inner, 3)
    else:
        p = _EXPR_PREC[e.op]
        text = f"{show_expr(e.left, p)} {e.op} {show_expr(e.right, p + 1)}"
    return f"({text})" if _expr_prec(e) < ctx else text


def _formula_prec(f: Formula) -> int:
    if isinstance(f, Quant):
        return 0
    if isinstance(f, Implies):
        return 1
    if isinstance(f, Or):
        return 2
    if isinstance(f, And):
        return 3
    if isinstance(f, Not):
        return 4
    return 5


def show_formula(f: Formula, ctx: int = 0) -> str:
    if isinstance(f, BoolConst):
        text = "true" if f.value else "false"
    elif isinstance(f, BVar):
        text = f.name
    elif isinstance(f, Cmp):
        text = f"{show_expr(f.left)} {f.op} {show_expr(f.right)}"
    elif isinstance(f, Not):
        text = "!" + show_formula(f.operand, 4)
    elif isinstance(f, Implies):
        text = f"{show_formula(f.left, 2)} -> {show_formula(f.right, 1)}"
    elif isinstance(f, Or):
        text = f"{show_formula(f.left, 2)} || {show_formula(f.right, 3)}"
    elif isinstance(f, And):
        text = f"{show_formula(f.left, 3)} && {show_formula(f.right, 4)}"
    elif isinstance(f, Quant):
        text = f"{f.kind} {f.var} in {f.lo}..{f.hi}: {show_formula(f.body, 0)}"
    else:
        raise TypeError(f"not a formula: {f!r}")
    # a quantifier body extends to the right, so any enclosing operator needs parens
    if _formula_prec(f) < ctx or (isinstance(f, Quant) and ctx > 0):
        return f"({text})"
    return text


def show_stmt(s: Stmt, indent: int = 0) -> str:
    return "\n".join(stmt_lines(s, indent))


def stmt_lines(s: Stmt, indent: int = 0) -> list[str]:
    pad = "  " * indent
    if isinstance(s, Diverge):
        return [pad + "diverge"]
    if isinstance(s, Skip):
        return [pad + "skip"]
    if isinstance(s, Assign):
        return [f"{pad}{s.var} := {show_expr(s.expr)}"]
    if isinstance(s, Seq):
        first = stmt_lines(s.first, indent)
        first[-1] += ";"
        return first + stmt_lines(s.second, indent)
    if isinstance(s, If):
        return ([f"{pad}if ({show_formula(s.guard)}) {{"]
                + stmt_lines(s.then, indent + 1)
                + [pad + "} else {"]
                + stmt_lines(s.orelse, indent + 1)
                + [pad + "}"])
    if isinstance(s, While):
        return ([f"{pad}while ({show_formula(s.guard)}) {{"]
                + stmt_lines(s.body, indent + 1)
                + [pad + "}"])
    raise TypeError(f"not a statement: {s!r}")
