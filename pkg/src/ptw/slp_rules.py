"""Syntactic strongest liberal postconditions.

Rules, by statement form:

    diverge          true
    x := e           forall a in dom(x): x != e[x/a] || F[x/a]
    C1; C2           slp(C2, slp(C1, F))
    if (g) C1 else C2   slp(C1, !g || F) && slp(C2, g || F)
    while (g) C      g || nu Y. F && slp(C, !g || Y)

Assignments wrap modulo the target's domain, so ``e[x/a]`` is wrapped in the
emitted formula unless interval analysis shows it already stays in range.
The loop's greatest fixed point is iterated from ``Y = true`` and stops when
two iterates have the same extension.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ptw.formula_eval import equivalent, states_of, substitute, subst_expr
from ptw.statespace import StateSet, StateSpace, floor_mod
from ptw.syntax import (
    FALSE, TRUE, And, Assign, BinOp, BoolConst, BVar, Cmp, Const, Diverge,
    Expr, Formula, If, Implies, Neg, NEGATED_CMP, Not, Or, Quant, Seq, Skip,
    Stmt, Var, VarDecl, While, all_names, expr_vars, formula_size, free_vars,
    fresh_name, show_formula,
)

EXPAND_LIMIT = 8
# formulas larger than this are replaced by an equivalent decision form
COMPACT_LIMIT = 600


@dataclass(frozen=True)
class RuleStep:
    rule: str  # diverge | assign | seq | ite | while
    input: Formula
    output: Formula


# -- interval analysis -----------------------------------------------------

def expr_range(e: Expr, ranges: dict[str, tuple[int, int]]) -> Optional[tuple[int, int]]:
    if isinstance(e, Const):
        return e.value, e.value
    if isinstance(e, Var):
        return ranges.get(e.name)
    if isinstance(e, Neg):
        r = expr_range(e.operand, ranges)
        return None if r is None else (-r[1], -r[0])
    a = expr_range(e.left, ranges)
    if e.op == "%":
        if isinstance(e.right, Const) and e.right.value > 0:
            return 0, e.right.value - 1
        if isinstance(e.right, Const) and e.right.value < 0:
            return e.right.value + 1, 0
        return None
    b = expr_range(e.right, ranges)
    if a is None or b is None:
        return None
    if e.op == "+":
        return a[0] + b[0], a[1] + b[1]
    if e.op == "-":
        return a[0] - b[1], a[1] - b[0]
    prods = [x * y for x in a for y in b]
    return min(prods), max(prods)


def wrapped(e: Expr, decl: VarDecl, ranges: dict[str, tuple[int, int]]) -> Expr:
    r = expr_range(e, ranges)
    if r is not None and decl.lo <= r[0] and r[1] <= decl.hi:
        return e
    if decl.lo == 0:
        return BinOp("%", e, Const(decl.size))
    return BinOp("+", Const(decl.lo),
                 BinOp("%", BinOp("-", e, Const(decl.lo)), Const(decl.size)))


# -- simplification --------------------------------------------------------

def simplify_expr(e: Expr) -> Expr:
    if isinstance(e, (Const, Var)):
        return e
    if isinstance(e, Neg):
        inner = simplify_expr(e.operand)
        if isinstance(inner, Const):
            return Const(-inner.value)
        if isinstance(inner, Neg):
            return inner.operand
        return Neg(inner)
    a, b = simplify_expr(e.left), simplify_expr(e.right)
    if isinstance(a, Const) and isinstance(b, Const):
        x, y = a.value, b.value
        if e.op == "%":
            return Const(floor_mod(x, y))
        return Const({"+": x + y, "-": x - y, "*": x * y}[e.op])
    if e.op == "+" and _is_const(a, 0):
        return b
    if e.op in "+-" and _is_const(b, 0):
        return a
    if e.op == "*" and (_is_const(a, 0) or _is_const(b, 0)):
        return Const(0)
    if e.op == "*" and _is_const(a, 1):
        return b
    if e.op == "*" and _is_const(b, 1):
        return a
    return BinOp(e.op, a, b)


def _is_const(e: Expr, v: int) -> bool:
    return isinstance(e, Const) and e.value == v


def _flatten(f: Formula, cls) -> list[Formula]:
    if isinstance(f, cls):
        return _flatten(f.left, cls) + _flatten(f.right, cls)
    return [f]


def _negate(f: Formula) -> Formula:
    if isinstance(f, BoolConst):
        return BoolConst(not f.value)
    if isinstance(f, Not):
        return f.operand
    if isinstance(f, Cmp):
        return Cmp(NEGATED_CMP[f.op], f.left, f.right)
    return Not(f)


def _junction(parts: list[Formula], cls, unit: bool) -> Formula:
    """Flatten, drop units, dedupe and short-circuit an And (unit true) or Or (unit false)."""
    out: list[Formula] = []
    seen = set()
    for p in parts:
        for q in _flatten(p, cls):
            if isinstance(q, BoolConst):
                if q.value == unit:
                    continue
                return BoolConst(not unit)
            if q in seen:
                continue
            seen.add(q)
            out.append(q)
    for q in out:
        if _negate(q) in seen:
            return BoolConst(not unit)
    if not out:
        return BoolConst(unit)
    acc = out[0]
    for q in out[1:]:
        acc = cls(acc, q)
    return acc


def _syntactic_simplify(f: Formula) -> Formula:
    if isinstance(f, (BoolConst, BVar)):
        return f
    if isinstance(f, Cmp):
        a, b = simplify_expr(f.left), simplify_expr(f.right)
        if isinstance(a, Const) and isinstance(b, Const):
            x, y = a.value, b.value
            return BoolConst({"==": x == y, "!=": x != y, "<": x < y,
                              "<=": x <= y, ">": x > y, ">=": x >= y}[f.op])
        if a == b:
            return BoolConst(f.op in ("==", "<=", ">="))
        return Cmp(f.op, a, b)
    if isinstance(f, Not):
        return _negate(_syntactic_simplify(f.operand))
    if isinstance(f, And):
        return _junction([_syntactic_simplify(f.left), _syntactic_simplify(f.right)], And, True)
    if isinstance(f, Or):
        return _junction([_syntactic_simplify(f.left), _syntactic_simplify(f.right)], Or, False)
    if isinstance(f, Implies):
        a, b = _syntactic_simplify(f.left), _syntactic_simplify(f.right)
        if isinstance(a, BoolConst):
            return b if a.value else TRUE
        if isinstance(b, BoolConst):
            return TRUE if b.value else _negate(a)
        return Implies(a, b)
    if isinstance(f, Quant):
        body = _syntactic_simplify(f.body)
        if f.var not in free_vars(body):
            return body  # ranges are never empty
        forall = f.kind == "forall"
        if f.hi - f.lo + 1 <= EXPAND_LIMIT:
            parts = [_syntactic_simplify(substitute(body, f.var, Const(v)))
                     for v in range(f.lo, f.hi + 1)]
            return _junction(parts, And if forall else Or, forall)
        # forall a: (P || Q(a))  ==  P || forall a: Q(a)  when a is not free in P
        cls = Or if forall else And
        parts = _flatten(body, cls)
        inside = [p for p in parts if f.var in free_vars(p)]
        outside = [p for p in parts if f.var not in free_vars(p)]
        q = Quant(f.kind, f.var, f.lo, f.hi, _junction(inside, cls, not forall))
        if not outside:
            return q
        return _junction(outside + [q], cls, not forall)
    raise TypeError(f"not a formula: {f!r}")


def simplify(f: Formula, space: Optional[StateSpace] = None) -> Formula:
    """Extension-preserving cleanup.

    With a state space, formulas that stay larger than ``COMPACT_LIMIT``
    nodes are replaced by the decision form of their own extension.
    """
    g = _syntactic_simplify(f)
    if space is not None and formula_size(g) > COMPACT_LIMIT:
        h = set_to_formula(states_of(g, space))
        if formula_size(h) < formula_size(g):
            return h
    return g


# -- rendering sets as formulas --------------------------------------------

def _membership(d: VarDecl, values: list[int]) -> Formula:
    if d.is_bool:
        return BVar(d.name) if values == [1] else Not(BVar(d.name))
    x = Var(d.name)
    all_vals = list(range(d.lo, d.hi + 1))
    missing = [v for v in all_vals if v not in values]
    if len(missing) == 1:
        return Cmp("!=", x, Const(missing[0]))
    for k in range(2, d.size // 2 + 1):
        r = values[0] % k
        if len(values) > 1 and values == [v for v in all_vals if v % k == r]:
            return Cmp("==", BinOp("%", x, Const(k)), Const(r))
    if values == list(range(values[0], values[-1] + 1)) and len(values) > 2:
        lo, hi = values[0], values[-1]
        if lo == d.lo:
            return Cmp("<=", x, Const(hi))
        if hi == d.hi:
            return Cmp(">=", x, Const(lo))
        return And(Cmp(">=", x, Const(lo)), Cmp("<=", x, Const(hi)))
    acc: Formula = Cmp("==", x, Const(values[0]))
    for v in values[1:]:
        acc = Or(acc, Cmp("==", x, Const(v)))
    return acc


def set_to_formula(s: StateSet) -> Formula:
    """Decision form of a state set, splitting on variables in declaration order."""
    decls = s.space.decls
    shape = tuple(d.size for d in decls)
    arr = s.bits.reshape(shape) if decls else s.bits.reshape(())

    def build(a: np.ndarray, level: int) -> Formula:
        if a.all():
            return TRUE
        if not a.any():
            return FALSE
        d = decls[level]
        groups: dict[bytes, list[int]] = {}
        subs: dict[bytes, np.ndarray] = {}
        for k in range(d.size):
            key = np.ascontiguousarray(a[k]).tobytes()
            groups.setdefault(key, []).append(d.lo + k)
            subs[key] = a[k]
        terms = []
        for key, values in groups.items():
            sub = build(subs[key], level + 1)
            if sub == FALSE:
                continue
            cond = None if len(values) == d.size else _membership(d, values)
            if cond is None:
                terms.append(sub)
            elif sub == TRUE:
                terms.append(cond)
            else:
                terms.append(And(cond, sub))
        out = terms[0]
        for t in terms[1:]:
            out = Or(out, t)
        return out

    return build(arr, 0)


def describe_set(s: StateSet, max_chars: int = 240) -> str:
    text = show_formula(set_to_formula(s))
    if len(text) > max_chars:
        return f"<{len(s)} of {s.space.size} states>"
    return text


# -- the rule engine -------------------------------------------------------

class SlpRules:
    def __init__(self, space: StateSpace):
        self.space = space
        self.steps: list[RuleStep] = []
        self.loop_iterations: list[int] = []
        self.ranges = {d.name: (d.lo, d.hi) for d in space.decls}

    def _log(self, rule: str, f: Formula, out: Formula) -> Formula:
        out = simplify(out, self.space)
        self.steps.append(RuleStep(rule, f, out))
        return out

    def assign(self, s: Assign, f: Formula) -> Formula:
        decl = self.space.by_name[s.var]
        avoid = all_names(f) | expr_vars(s.expr) | set(self.space.names)
        alpha = fresh_name("alpha", avoid)
        ranges = dict(self.ranges)
        ranges[alpha] = (decl.lo, decl.hi)
        image = wrapped(subst_expr(s.expr, s.var, Var(alpha)), decl, ranges)
        body = Or(Cmp("!=", Var(s.var), image), substitute(f, s.var, Var(alpha)))
        return Quant("forall", alpha, decl.lo, decl.hi, body)

    def slp(self, s: Stmt, f: Formula) -> Formula:
        if isinstance(s, Diverge):
            return self._log("diverge", f, TRUE)
        if isinstance(s, Assign):
            return self._log("assign", f, self.assign(s, f))
        if isinstance(s, Seq):
            return self._log("seq", f, self.slp(s.second, self.slp(s.first, f)))
        if isinstance(s, If):
            g = s.guard
            return self._log("ite", f, And(self.slp(s.then, Or(Not(g), f)),
                                           self.slp(s.orelse, Or(g, f))))
        if isinstance(s, While):
            y = self.loop_invariant(s, f)
            return self._log("while", f, Or(s.guard, y))
        if isinstance(s, Skip):
            raise ValueError("rule engine expects a desugared program (no 'skip')")
        raise TypeError(f"not a statement: {s!r}")

    def loop_invariant(self, s: While, f: Formula) -> Formula:
        """nu Y. F && slp(body, !g || Y), iterated from true to semantic stability."""
        y: Formula = TRUE
        for k in range(1, self.space.size + 2):
            ny = simplify(And(f, self.slp(s.body, Or(Not(s.guard), y))), self.space)
            if equivalent(ny, y, self.space):
                self.loop_iterations.append(k)
                return y
            y = ny
        raise RuntimeError("loop rule did not stabilise within |States|+1 iterations")


def slp_formula(p: Stmt, f: Formula, space: StateSpace) -> tuple[Formula, list[RuleStep]]:
    rules = SlpRules(space)
    out = rules.slp(p, f)
    return out, rules.steps
