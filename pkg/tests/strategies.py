"""Hypothesis strategies for ASTs over a fixed small declaration list."""

from hypothesis import strategies as st

from ptw.syntax import (
    FALSE, TRUE, And, Assign, BinOp, BVar, Cmp, Const, Diverge, If, Implies,
    Neg, Not, Or, Quant, Seq, Var, VarDecl, While,
)

DECLS = [VarDecl.interval("x", -1, 2), VarDecl.interval("y", 0, 2), VarDecl.boolean("b")]
INTS = ["x", "y"]

consts = st.integers(-3, 5).map(Const)


def exprs(names=INTS):
    leaves = st.one_of(consts, st.sampled_from(names).map(Var))
    return st.recursive(leaves, lambda sub: st.one_of(
        st.builds(BinOp, st.sampled_from(["+", "-", "*", "%"]), sub, sub),
        st.builds(Neg, sub),
    ), max_leaves=6)


def atoms(names=INTS, bools=("b",)):
    cmp = st.builds(Cmp, st.sampled_from(["==", "!=", "<", "<=", ">", ">="]),
                    exprs(names), exprs(names))
    return st.one_of(cmp, st.sampled_from(list(bools)).map(BVar), st.just(TRUE), st.just(FALSE))


def guards():
    return st.recursive(atoms(), lambda sub: st.one_of(
        st.builds(Not, sub), st.builds(And, sub, sub), st.builds(Or, sub, sub),
    ), max_leaves=4)


def formulas():
    def extend(sub):
        return st.one_of(
            st.builds(Not, sub), st.builds(And, sub, sub), st.builds(Or, sub, sub),
            st.builds(Implies, sub, sub),
        )
    base = st.recursive(atoms(), extend, max_leaves=5)
    quant_body = st.recursive(atoms(INTS + ["k"]), extend, max_leaves=4)
    quant = st.builds(Quant, st.sampled_from(["forall", "exists"]), st.just("k"),
                      st.just(0), st.integers(0, 3), quant_body)
    return st.one_of(base, quant, st.builds(And, base, quant), st.builds(Or, quant, base))


def _leaves(s):
    return _leaves(s.first) + _leaves(s.second) if isinstance(s, Seq) else [s]


def _right_nest(parts):
    # the parser always builds right-nested sequences
    parts = [leaf for part in parts for leaf in _leaves(part)]
    out = parts[-1]
    for s in reversed(parts[:-1]):
        out = Seq(s, out)
    return out


def stmts(depth=2):
    simple = st.one_of(
        st.builds(Assign, st.sampled_from(INTS), exprs()),
        st.builds(Assign, st.just("b"), st.sampled_from([Const(0), Const(1)])),
        st.just(Diverge()),
    )
    if depth == 0:
        return simple
    inner = stmts(depth - 1)
    block = st.lists(inner, min_size=1, max_size=3).map(_right_nest)
    compound = st.one_of(
        simple,
        st.builds(If, guards(), block, block),
        st.builds(While, guards(), block),
    )
    return st.lists(compound, min_size=1, max_size=3).map(_right_nest)
