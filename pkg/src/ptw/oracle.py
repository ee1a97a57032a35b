"""Brute-force operational reference semantics.

Programs run by small-step execution over configurations (continuation
stack, state).  Configurations are finite, so a revisited configuration
means the run diverges.  The four reference transformers are read directly
off the resulting input/output relation.

Expression and guard evaluation is re-implemented here on plain ints, on
purpose: the oracle must not share code paths with the engines it checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from ptw.statespace import StateSet, StateSpace
from ptw.errors import SpaceMismatch
from ptw.syntax import (
    And, Assign, BinOp, BoolConst, BVar, Cmp, Const, Diverge, Expr, Formula,
    If, Implies, Neg, Not, Or, Quant, Seq, Skip, Stmt, Var, While,
)


@dataclass(frozen=True)
class Final:
    state: tuple[int, ...]


@dataclass(frozen=True)
class Diverges:
    pass


Outcome = Union[Final, Diverges]


def _value(e: Expr, env: dict[str, int]) -> int:
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return env[e.name]
    if isinstance(e, Neg):
        return -_value(e.operand, env)
    a, b = _value(e.left, env), _value(e.right, env)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    return a if b == 0 else a % b


def _holds(f: Formula, env: dict[str, int]) -> bool:
    if isinstance(f, BoolConst):
        return f.value
    if isinstance(f, BVar):
        return env[f.name] != 0
    if isinstance(f, Cmp):
        a, b = _value(f.left, env), _value(f.right, env)
        return {"==": a == b, "!=": a != b, "<": a < b,
                "<=": a <= b, ">": a > b, ">=": a >= b}[f.op]
    if isinstance(f, Not):
        return not _holds(f.operand, env)
    if isinstance(f, And):
        return _holds(f.left, env) and _holds(f.right, env)
    if isinstance(f, Or):
        return _holds(f.left, env) or _holds(f.right, env)
    if isinstance(f, Implies):
        return (not _holds(f.left, env)) or _holds(f.right, env)
    if isinstance(f, Quant):
        vals = (_holds(f.body, {**env, f.var: v}) for v in range(f.lo, f.hi + 1))
        return all(vals) if f.kind == "forall" else any(vals)
    raise TypeError(f"not a formula: {f!r}")


def _step(stack: tuple, state: tuple[int, ...], space: StateSpace):
    """One small step; ``stack`` holds pending statements, top last."""
    s = stack[-1]
    rest = stack[:-1]
    if isinstance(s, Diverge):
        return stack, state
    if isinstance(s, Assign):
        env = dict(zip(space.names, state))
        d = space.by_name[s.var]
        v = _value(s.expr, env)
        env[s.var] = d.lo + (v - d.lo) % d.size
        return rest, tuple(env[n] for n in space.names)
    if isinstance(s, Seq):
        return rest + (s.second, s.first), state
    if isinstance(s, If):
        env = dict(zip(space.names, state))
        return rest + ((s.then if _holds(s.guard, env) else s.orelse),), state
    if isinstance(s, While):
        env = dict(zip(space.names, state))
        if _holds(s.guard, env):
            return rest + (s, s.body), state
        return rest, state
    if isinstance(s, Skip):
        raise ValueError("oracle expects a desugared program")
    raise TypeError(f"not a statement: {s!r}")


def _key(stack: tuple, state: tuple[int, ...]):
    # sub-statements are shared objects of the one program tree, so identity is exact
    return tuple(map(id, stack)), state


def run(p: Stmt, s: tuple[int, ...], space: StateSpace) -> Outcome:
    stack: tuple = (p,)
    state = tuple(s)
    seen = set()
    while stack:
        key = _key(stack, state)
        if key in seen:
            return Diverges()
        seen.add(key)
        stack, state = _step(stack, state, space)
    return Final(state)


class OutcomeMap:
    """Total map from initial state index to final state index, or None for divergence."""

    def __init__(self, space: StateSpace, finals: list[Optional[int]]):
        if len(finals) != space.size:
            raise ValueError("outcome map must cover the whole state space")
        self.space = space
        self.finals = finals

    def outcome(self, index: int) -> Outcome:
        f = self.finals[index]
        return Diverges() if f is None else Final(self.space.decode(f))

    def __getitem__(self, index: int) -> Optional[int]:
        return self.finals[index]

    def __len__(self):
        return len(self.finals)


def relation(p: Stmt, space: StateSpace) -> OutcomeMap:
    """Tabulate :func:`run` over every initial state.

    Outcomes are memoised per configuration; since execution is
    deterministic, every configuration on a run shares that run's outcome.
    """
    memo: dict = {}
    finals: list[Optional[int]] = []
    for i in range(space.size):
        stack: tuple = (p,)
        state = space.decode(i)
        path = []
        on_path = set()
        while True:
            if not stack:
                result = space.encode(state)
                break
            key = _key(stack, state)
            if key in memo:
                result = memo[key]
                break
            if key in on_path:
                result = None
                break
            on_path.add(key)
            path.append(key)
            stack, state = _step(stack, state, space)
        for key in path:
            memo[key] = result
        finals.append(result)
    return OutcomeMap(space, finals)


def _check(m: OutcomeMap, a: StateSet) -> None:
    if a.space != m.space:
        raise SpaceMismatch("argument set and relation over different spaces")


def ref_wp(m: OutcomeMap, c: StateSet) -> StateSet:
    _check(m, c)
    return m.space.from_indices(
        i for i, f in enumerate(m.finals) if f is not None and f in c)


def ref_wlp(m: OutcomeMap, c: StateSet) -> StateSet:
    _check(m, c)
    return m.space.from_indices(
        i for i, f in enumerate(m.finals) if f is None or f in c)


def ref_sp(m: OutcomeMap, b: StateSet) -> StateSet:
    _check(m, b)
    return m.space.from_indices(
        f for i, f in enumerate(m.finals) if f is not None and i in b)


def ref_slp(m: OutcomeMap, b: StateSet) -> StateSet:
    _check(m, b)
    # every predecessor lies in b; states without predecessors qualify vacuously
    bad = {f for i, f in enumerate(m.finals) if f is not None and i not in b}
    return m.space.from_indices(j for j in range(m.space.size) if j not in bad)


def reachable(m: OutcomeMap) -> StateSet:
    return ref_sp(m, m.space.full())
