import pytest
from hypothesis import given, settings

from ptw.errors import ParseError, ScopeError
from ptw.parser import parse_expr, parse_formula, parse_program, parse_spec
from ptw.syntax import (
    Assign, BinOp, BVar, Cmp, Const, Diverge, If, Neg, Quant, Seq, Skip, Var,
    VarDecl, While, desugar, show_expr, show_formula, show_stmt,
)

from strategies import DECLS, exprs, formulas, stmts

SPEC = """
var x : int[0..31];
var y : int[0..31];
program p { if (x % 2 == 0) { y := y + 1 } else { y := 2 * y } }
check partial_incorrectness [y == 10] p [y == 11] expect valid;
"""


def test_spec_structure():
    spec = parse_spec(SPEC)
    assert [d.name for d in spec.decls] == ["x", "y"]
    (d,) = spec.directives
    assert d.expect is True and d.program_name == "p" and d.line == 5
    p = spec.programs["p"]
    assert isinstance(p, If)
    assert p.then == Assign("y", BinOp("+", Var("y"), Const(1)))
    assert p.orelse == Assign("y", BinOp("*", Const(2), Var("y")))


def test_precedence():
    assert parse_expr("1 + 2 * x") == BinOp("+", Const(1), BinOp("*", Const(2), Var("x")))
    assert parse_expr("1 - 2 - 3") == BinOp("-", BinOp("-", Const(1), Const(2)), Const(3))
    assert parse_expr("-x") == Neg(Var("x"))
    assert parse_expr("-3") == Const(-3)
    f = parse_formula("a || b && !c")
    assert show_formula(f) == "a || b && !c"
    assert parse_formula("(x + 1) == 2") == Cmp("==", BinOp("+", Var("x"), Const(1)), Const(2))


def test_quantifier_scope():
    f = parse_formula("forall k in 0..3: k != x || b", DECLS)
    assert isinstance(f, Quant) and f.hi == 3
    assert isinstance(f.body.right, BVar)


def test_statement_list_is_right_nested():
    p = parse_program("x := 1; x := 2; x := 3;", DECLS)
    assert p == Seq(Assign("x", Const(1)), Seq(Assign("x", Const(2)), Assign("x", Const(3))))


@pytest.mark.parametrize("text, message, where", [
    ("var x : int[0..3];\nprogram p { z := 1 }", "undeclared variable 'z'", (2, 13)),
    ("var x : int[0..3];\nvar x : bool;", "duplicate variable", (2, 5)),
    ("var x : int[3..0];", "empty domain", (1, 5)),
    ("var x : int[0..3];\ncheck total_correctness {true} q {true};", "undefined program", (2, 32)),
    ("var x : int[0..3];\nprogram p { x := 1 }\nvariant p x;", "single while loop", (3, 9)),
    ("var x : int[0..3];\nprogram p { while (x) { x := 0 } }", "used as a predicate", (2, 20)),
    ("var x : int[0..3];\nprogram p { while (forall k in 0..1: k == x) { x := 0 } }",
     "quantifier-free", (2, 20)),
    ("var x : int[0..3];\nquery wp p {forall x in 0..1: true};", "undefined program", (2, 10)),
    ("var x : int[0..3];\nprogram p { x := 1 }\nquery wp p {forall x in 0..1: true};",
     "shadows", (3, 20)),
    ("var x : int[0..3];\nprogram p { x := 1 }\ncheck weird {true} p {true};",
     "unknown notion", (3, 7)),
    ("var x : int[0..3];\nprogram p { x := 1 }\ncheck total_correctness [true] p {true};",
     "expected '{'", (3, 25)),
    ("var x : int[0..3];\nprogram p { x := 1 ", "expected '}'", (2, 20)),
    ("var x : int[0..3]; @", "unexpected character", (1, 20)),
])
def test_parse_errors(text, message, where):
    with pytest.raises(ParseError) as info:
        parse_spec(text)
    assert message in info.value.message
    assert (info.value.line, info.value.col) == where


def test_desugar_skip():
    p = parse_program("skip; x := 1", DECLS)
    assert isinstance(p.first, Skip)
    assert desugar(p, DECLS).first == Assign("x", Var("x"))
    with pytest.raises(ScopeError):
        desugar(Skip(), [])


@settings(max_examples=300, deadline=None)
@given(stmts())
def test_program_round_trip(p):
    assert parse_program(show_stmt(p), DECLS) == p


@settings(max_examples=300, deadline=None)
@given(formulas())
def test_formula_round_trip(f):
    assert parse_formula(show_formula(f), DECLS) == f


@settings(max_examples=300, deadline=None)
@given(exprs())
def test_expr_round_trip(e):
    assert parse_expr(show_expr(e), DECLS) == e


@settings(max_examples=100, deadline=None)
@given(stmts())
def test_desugar_idempotent(p):
    once = desugar(p, DECLS)
    assert desugar(once, DECLS) == once


def test_diverge_and_loops():
    p = parse_program("while (b) { diverge }", DECLS)
    assert p == While(BVar("b"), Diverge())
