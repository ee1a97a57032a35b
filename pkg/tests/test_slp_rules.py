import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ptw.formula_eval import states_of
from ptw.parser import parse_formula, parse_program
from ptw.slp_rules import (
    SlpRules, describe_set, expr_range, set_to_formula, simplify, slp_formula,
)
from ptw.statespace import StateSet, StateSpace
from ptw.syntax import Assign, BinOp, Const, Var, VarDecl, desugar, show_formula
from ptw.transformers import slp

from strategies import DECLS, formulas

SPACE = StateSpace(DECLS)


def test_expr_range():
    r = {"x": (0, 31)}
    assert expr_range(BinOp("+", Var("x"), Const(1)), r) == (1, 32)
    assert expr_range(BinOp("*", Const(-2), Var("x")), r) == (-62, 0)
    assert expr_range(BinOp("%", Var("x"), Const(4)), r) == (0, 3)
    assert expr_range(BinOp("%", Var("x"), Var("x")), r) is None


def test_assign_rule_shape(xy32):
    rules = SlpRules(xy32)
    f = rules.assign(Assign("y", BinOp("+", Var("y"), Const(1))), parse_formula("y == 10"))
    assert show_formula(f) == "forall alpha in 0..31: y != (alpha + 1) % 32 || alpha == 10"
    # an in-range image needs no wrap
    f = rules.assign(Assign("y", BinOp("%", Var("x"), Const(4))), parse_formula("true"))
    assert show_formula(f) == "forall alpha in 0..31: y != x % 4 || true"


def test_fresh_bound_name(xy32):
    rules = SlpRules(xy32)
    f = rules.assign(Assign("y", Var("x")), parse_formula("forall alpha in 0..1: alpha != y"))
    assert f.var == "alpha_1"


def test_even_odd_even_branch(xy32):
    decls = list(xy32.decls)
    p = parse_program("if (x % 2 == 0) { y := y + 1 } else { y := 2 * y }", decls)
    f, steps = slp_formula(p, parse_formula("y == 10", decls), xy32)
    assert states_of(f, xy32) == slp(p, states_of(parse_formula("y == 10"), xy32))
    assert [s.rule for s in steps] == ["assign", "assign", "ite"]


@pytest.mark.parametrize("text", [
    "while (!open) { dead := spill }; dead := spill",
    "while (open && !dead) { dead := 1; diverge }",
    "if (spill) { open := 1 - open } else { while (!dead) { dead := spill } }",
])
def test_loops_match_semantic(cat_space, text):
    decls = list(cat_space.decls)
    p = desugar(parse_program(text, decls), decls)
    for pre in ("open", "true", "false", "dead || !spill"):
        f = parse_formula(pre, decls)
        g, _ = slp_formula(p, f, cat_space)
        assert states_of(g, cat_space) == slp(p, states_of(f, cat_space)), pre


def test_cat_invariant_is_readable(cat_space):
    decls = list(cat_space.decls)
    p = parse_program("while (!open) { dead := spill }", decls)
    rules = SlpRules(cat_space)
    y = rules.loop_invariant(p, parse_formula("open", decls))
    assert show_formula(y) == "open"
    assert rules.loop_iterations == [2]


@settings(max_examples=300, deadline=None)
@given(formulas())
def test_simplify_preserves_extension(f):
    assert states_of(simplify(f), SPACE) == states_of(f, SPACE)
    assert states_of(simplify(f, SPACE), SPACE) == states_of(f, SPACE)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.booleans(), min_size=SPACE.size, max_size=SPACE.size))
def test_set_to_formula_round_trip(bits):
    s = StateSet(SPACE, np.array(bits))
    assert states_of(set_to_formula(s), SPACE) == s


def test_set_rendering(xy32):
    assert describe_set(states_of(parse_formula("x % 2 == 1 && y == 20"), xy32)) == \
        "x % 2 == 1 && y == 20"
    assert describe_set(xy32.full()) == "true"
    assert describe_set(xy32.empty()) == "false"
    rng = np.random.default_rng(0)
    noisy = StateSet(xy32, rng.random(xy32.size) < 0.5)
    assert describe_set(noisy) == f"<{len(noisy)} of 1024 states>"


def test_wrapped_assignment_with_offset_domain():
    space = StateSpace([VarDecl.interval("z", 3, 5)])
    p = parse_program("z := z + 1", list(space.decls))
    f, _ = slp_formula(p, parse_formula("z == 5"), space)
    # z := z + 1 permutes 3..5, so the only image of z == 5 is z == 3
    assert states_of(f, space) == states_of(parse_formula("z == 3"), space)
