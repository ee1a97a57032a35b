"""Extensional meaning of formulas and capture-avoiding substitution."""

from __future__ import annotations

from typing import Mapping

import numpy as np

from ptw.statespace import StateSet, StateSpace, Value, eval_expr
from ptw.syntax import (
    And, BinOp, BoolConst, BVar, Cmp, Const, Expr, Formula, Implies, Neg, Not,
    Or, Quant, Var, all_names, expr_vars, fresh_name,
)

_CMP = {
    "==": np.equal, "!=": np.not_equal, "<": np.less,
    "<=": np.less_equal, ">": np.greater, ">=": np.greater_equal,
}


def truth(f: Formula, env: Mapping[str, Value]):
    """Truth value of ``f``; a bool array when ``env`` holds columns."""
    if isinstance(f, BoolConst):
        return f.value
    if isinstance(f, BVar):
        return np.not_equal(env[f.name], 0)
    if isinstance(f, Cmp):
        return _CMP[f.op](eval_expr(f.left, env), eval_expr(f.right, env))
    if isinstance(f, Not):
        return np.logical_not(truth(f.operand, env))
    if isinstance(f, And):
        return np.logical_and(truth(f.left, env), truth(f.right, env))
    if isinstance(f, Or):
        return np.logical_or(truth(f.left, env), truth(f.right, env))
    if isinstance(f, Implies):
        return np.logical_or(np.logical_not(truth(f.left, env)), truth(f.right, env))
    if isinstance(f, Quant):
        inner = dict(env)
        forall = f.kind == "forall"
        acc = forall
        for v in range(f.lo, f.hi + 1):
            inner[f.var] = v
            t = truth(f.body, inner)
            acc = np.logical_and(acc, t) if forall else np.logical_or(acc, t)
        return acc
    raise TypeError(f"not a formula: {f!r}")


def states_of(f: Formula, space: StateSpace) -> StateSet:
    return StateSet(space, truth(f, space.columns))


def holds_at(f: Formula, state: Mapping[str, int]) -> bool:
    return bool(truth(f, state))


def equivalent(f: Formula, g: Formula, space: StateSpace) -> bool:
    return states_of(f, space).is_equal(states_of(g, space))


# -- substitution ----------------------------------------------------------

def subst_expr(e: Expr, x: str, r: Expr) -> Expr:
    if isinstance(e, Var):
        return r if e.name == x else e
    if isinstance(e, Const):
        return e
    if isinstance(e, Neg):
        return Neg(subst_expr(e.operand, x, r))
    return BinOp(e.op, subst_expr(e.left, x, r), subst_expr(e.right, x, r))


def substitute(f: Formula, x: str, e: Expr) -> Formula:
    """``f[x / e]``, renaming bound variables that would capture ``e``."""
    if isinstance(f, BoolConst):
        return f
    if isinstance(f, BVar):
        if f.name != x:
            return f
        if isinstance(e, Var):
            return BVar(e.name)
        return Cmp("!=", e, Const(0))
    if isinstance(f, Cmp):
        return Cmp(f.op, subst_expr(f.left, x, e), subst_expr(f.right, x, e))
    if isinstance(f, Not):
        return Not(substitute(f.operand, x, e))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(substitute(f.left, x, e), substitute(f.right, x, e))
    if isinstance(f, Quant):
        if f.var == x:
            return f
        body, var = f.body, f.var
        if var in expr_vars(e):
            var = fresh_name(var, all_names(body) | expr_vars(e) | {x})
            body = substitute(body, f.var, Var(var))
        return Quant(f.kind, var, f.lo, f.hi, substitute(body, x, e))
    raise TypeError(f"not a formula: {f!r}")
