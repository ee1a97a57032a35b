import numpy as np
from hypothesis import given, settings, strategies as st

from ptw.formula_eval import equivalent, holds_at, states_of, substitute, truth
from ptw.parser import parse_formula
from ptw.statespace import StateSpace, eval_expr
from ptw.syntax import And, Not, Or, Quant, Var, free_vars

from strategies import DECLS, exprs, formulas

SPACE = StateSpace(DECLS)


def ext(text):
    return states_of(parse_formula(text, DECLS), SPACE)


def test_basic_extensions():
    assert len(ext("true")) == SPACE.size
    assert len(ext("false")) == 0
    assert len(ext("x == 0")) == SPACE.size // 4
    assert ext("b") == ext("!(!b)")
    assert ext("x == 1 -> y == 2") == ext("x != 1 || y == 2")


def test_quantifiers():
    # forall k in 0..2: y != k is unsatisfiable because y ranges over 0..2
    assert len(ext("forall k in 0..2: y != k")) == 0
    assert ext("exists k in -1..2: x == k") == SPACE.full()
    assert ext("exists k in 0..1: x == 2 * k") == ext("x == 0 || x == 2")


@settings(max_examples=200, deadline=None)
@given(formulas(), formulas())
def test_boolean_structure(f, g):
    a, b = states_of(f, SPACE), states_of(g, SPACE)
    assert states_of(Not(f), SPACE) == ~a
    assert states_of(And(f, g), SPACE) == a & b
    assert states_of(Or(f, g), SPACE) == a | b


@settings(max_examples=150, deadline=None)
@given(formulas())
def test_vectorised_matches_pointwise(f):
    s = states_of(f, SPACE)
    for i in range(0, SPACE.size, 5):
        assert (i in s) == holds_at(f, SPACE.state(i))


@settings(max_examples=300, deadline=None)
@given(formulas(), st.sampled_from(["x", "y"]), exprs(["x", "y"]))
def test_substitution_lemma(f, x, e):
    # f[x/e] holds at s iff f holds at s with x set to the value of e
    g = substitute(f, x, e)
    lhs = states_of(g, SPACE)
    for i in range(SPACE.size):
        st_ = SPACE.state(i)
        updated = dict(st_, **{x: int(eval_expr(e, st_))})
        assert (i in lhs) == bool(truth(f, updated))


def test_substitution_avoids_capture():
    f = Quant("forall", "k", 0, 2, parse_formula("k != x", None))
    g = substitute(f, "x", Var("k"))
    assert g.var != "k"
    assert "k" in free_vars(g)
    # forall j: j != k is false whenever k lies in 0..2
    env = {"k": np.arange(5)}
    assert truth(g, env).tolist() == [False, False, False, True, True]


def test_equivalent():
    f = parse_formula("x % 2 == 0", DECLS)
    g = parse_formula("x == 0 || x == 2 || x == -2", DECLS)
    assert equivalent(f, g, SPACE)
    assert not equivalent(f, parse_formula("x == 0", DECLS), SPACE)
